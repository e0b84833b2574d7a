#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ns {

/// Time-ordered multi-channel observation sequence. Channel data is stored
/// column-wise: channels[c][i] is channel c at times[i].
struct Trajectory {
    std::vector<std::string> channel_names;
    std::vector<double> times;
    std::vector<std::vector<double>> channels;

    std::size_t sample_count() const { return times.size(); }
    std::size_t channel_count() const { return channel_names.size(); }

    /// Index of a named channel; throws ArgumentError if absent.
    std::size_t channel_index(std::string_view name) const;

    /// Throws ArgumentError unless times are strictly increasing, every
    /// channel has one value per sample, and all values are finite.
    void validate() const;
};

/// CSV with header "t,<channel>[,<channel>...]", one sample per line, values
/// as shortest round-trip decimal doubles. Reload reproduces the trajectory
/// bitwise.
std::string to_csv(const Trajectory& trajectory);
Trajectory trajectory_from_csv(std::string_view csv);

}  // namespace ns
