#include "p300snr/epochs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "p300snr/errors.hpp"

namespace p300snr {

RawRecording downsample(const RawRecording& raw, int factor) {
    if (factor < 1) throw std::invalid_argument("downsample: factor must be at least 1");
    if (factor == 1) return raw;
    if (std::fmod(raw.sample_rate, static_cast<double>(factor)) != 0.0)
        throw std::invalid_argument("downsample: sample rate " + std::to_string(raw.sample_rate) +
                                    " is not divisible by " + std::to_string(factor));
    RawRecording out;
    out.sample_rate = raw.sample_rate / factor;
    out.channels.reserve(raw.channels.size());
    for (const Vector& channel : raw.channels) {
        const std::size_t n_out = channel.size() / static_cast<std::size_t>(factor);
        Vector ds(n_out);
        for (std::size_t i = 0; i < n_out; ++i) {
            double sum = 0.0;
            for (int k = 0; k < factor; ++k) sum += channel[i * static_cast<std::size_t>(factor) + k];
            ds[i] = sum / factor;
        }
        out.channels.push_back(std::move(ds));
    }
    out.events = raw.events;
    for (RecordingEvent& e : out.events) e.sample_index /= factor;
    return out;
}

int samples_per_epoch(double window_ms, double sample_rate) {
    if (!(window_ms > 0.0) || !(sample_rate > 0.0))
        throw std::invalid_argument("samples_per_epoch: window and rate must be positive");
    return static_cast<int>(std::ceil(window_ms / 1000.0 * sample_rate));
}

std::vector<Trial> extract_epochs(const RawRecording& raw, const EpochConfig& config) {
    const RawRecording ds = config.downsample_factor > 1 ? downsample(raw, config.downsample_factor) : raw;
    const int window = samples_per_epoch(config.window_ms, ds.sample_rate);
    if (window < 1) throw std::invalid_argument("extract_epochs: epoch window is empty");

    std::vector<int> order = config.electrode_order;
    if (order.empty()) {
        order.resize(ds.channels.size());
        for (std::size_t e = 0; e < order.size(); ++e) order[e] = static_cast<int>(e);
    }
    for (int e : order) {
        if (e < 0 || static_cast<std::size_t>(e) >= ds.channels.size())
            throw std::invalid_argument("extract_epochs: electrode index " + std::to_string(e) +
                                        " out of range");
    }

    const std::size_t n_samples = ds.n_samples();
    std::vector<Trial> trials;
    trials.reserve(ds.events.size());
    for (std::size_t i = 0; i < ds.events.size(); ++i) {
        const RecordingEvent& event = ds.events[i];
        if (event.sample_index < 0 ||
            static_cast<std::size_t>(event.sample_index) + static_cast<std::size_t>(window) > n_samples) {
            throw data_error("extract_epochs: event " + std::to_string(i) + " window [" +
                             std::to_string(event.sample_index) + ", " +
                             std::to_string(event.sample_index + window) + ") exceeds recording length " +
                             std::to_string(n_samples));
        }
        Trial trial;
        trial.features.reserve(order.size() * static_cast<std::size_t>(window));
        for (int e : order) {
            const Vector& channel = ds.channels[static_cast<std::size_t>(e)];
            const auto begin = channel.begin() + static_cast<std::ptrdiff_t>(event.sample_index);
            trial.features.insert(trial.features.end(), begin, begin + window);
        }
        trial.label = event.is_target ? 1 : 0;
        trial.stimulus_id = event.stimulus_id;
        trial.cycle_index = event.cycle_index;
        trial.symbol_index = event.symbol_index;
        trials.push_back(std::move(trial));
    }
    return trials;
}

}  // namespace p300snr
