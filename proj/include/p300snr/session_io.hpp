#ifndef P300SNR_SESSION_IO_HPP
#define P300SNR_SESSION_IO_HPP

#include <string>

#include "p300snr/model.hpp"

namespace p300snr {

// Optional provenance carried in the session file header. Zero means unknown
// (e.g. a recording whose electrode layout was not declared).
struct SessionFileInfo {
    int electrode_count = 0;
    int samples_per_electrode = 0;
};

// Single-document JSON session format, lossless for doubles. See README for
// the field-by-field schema.
void write_session(const SessionData& session, const std::string& path, const SessionFileInfo& info = {});
SessionData read_session(const std::string& path, SessionFileInfo* info = nullptr);

// Class-mean ERPs (target vs. non-target) over every trial of the session,
// for external plotting. Columns: class,index,value.
void write_erp_csv(const SessionData& session, const std::string& path);

}  // namespace p300snr

#endif
