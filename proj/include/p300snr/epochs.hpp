#ifndef P300SNR_EPOCHS_HPP
#define P300SNR_EPOCHS_HPP

#include <cstdint>
#include <vector>

#include "p300snr/model.hpp"

namespace p300snr {

struct RecordingEvent {
    std::int64_t sample_index = 0;  // flash onset, in samples of the recording it sits in
    int stimulus_id = 0;
    int is_target = 0;
    int symbol_index = 0;
    int cycle_index = 0;
};

// Pre-filtered multichannel recording. channels[e][s] is electrode e at
// sample s, in microvolts.
struct RawRecording {
    double sample_rate = 256.0;
    std::vector<Vector> channels;
    std::vector<RecordingEvent> events;

    std::size_t n_samples() const { return channels.empty() ? 0 : channels.front().size(); }
};

// Block averaging by `factor`: each output sample is the mean of factor
// consecutive input samples; trailing remainder samples are dropped. Event
// sample indices divide by factor (floor), the rate divides exactly.
RawRecording downsample(const RawRecording& raw, int factor);

struct EpochConfig {
    double window_ms = 600.0;
    int downsample_factor = 4;
    std::vector<int> electrode_order;  // empty means all channels in file order
};

// Sample instants strictly inside [0, window) at the given rate.
int samples_per_epoch(double window_ms, double sample_rate);

// Downsamples per the config, then slices one window per event from each
// listed electrode and concatenates electrode-major (all samples of the first
// electrode, then the next). Windows may overlap.
std::vector<Trial> extract_epochs(const RawRecording& raw, const EpochConfig& config);

}  // namespace p300snr

#endif
