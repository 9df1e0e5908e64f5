#ifndef P300SNR_ERRORS_HPP
#define P300SNR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace p300snr {

// Error taxonomy mirrored by the CLI exit codes:
//   std::invalid_argument / std::domain_error -> bad parameters or config (exit 2)
//   data_error                                -> malformed or insufficient data (exit 3)
//   numerical_error                           -> factorization / convergence failure (exit 4)

struct data_error : std::runtime_error {
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace p300snr

#endif
