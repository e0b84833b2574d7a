#include "ns/trajectory.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "ns/errors.hpp"

namespace ns {

namespace {

void append_double(std::string& out, double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, res.ptr);
}

double parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ArgumentError("trajectory CSV: malformed number '" + std::string(text) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

std::size_t Trajectory::channel_index(std::string_view name) const {
    for (std::size_t c = 0; c < channel_names.size(); ++c)
        if (channel_names[c] == name) return c;
    throw ArgumentError("trajectory has no channel named '" + std::string(name) + "'");
}

void Trajectory::validate() const {
    if (channel_names.empty()) throw ArgumentError("trajectory has no channels");
    if (channels.size() != channel_names.size())
        throw ArgumentError("trajectory channel count does not match channel names");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ArgumentError("trajectory times must be strictly increasing");
    for (const auto& channel : channels) {
        if (channel.size() != times.size())
            throw ArgumentError("trajectory channel length does not match sample count");
        for (double v : channel)
            if (!std::isfinite(v)) throw ArgumentError("trajectory contains a non-finite value");
    }
    for (double t : times)
        if (!std::isfinite(t)) throw ArgumentError("trajectory contains a non-finite time");
}

std::string to_csv(const Trajectory& trajectory) {
    trajectory.validate();
    std::string out = "t";
    for (const auto& name : trajectory.channel_names) {
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
        append_double(out, trajectory.times[i]);
        for (const auto& channel : trajectory.channels) {
            out += ',';
            append_double(out, channel[i]);
        }
        out += '\n';
    }
    return out;
}

Trajectory trajectory_from_csv(std::string_view csv) {
    Trajectory traj;
    std::size_t pos = 0;
    bool header = true;
    while (pos < csv.size()) {
        std::size_t eol = csv.find('\n', pos);
        if (eol == std::string_view::npos) eol = csv.size();
        std::string_view line = csv.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        if (line.empty()) continue;

        const auto fields = split(line, ',');
        if (header) {
            if (fields.size() < 2 || fields[0] != "t")
                throw ArgumentError("trajectory CSV: header must be t,<channel>[,...]");
            for (std::size_t i = 1; i < fields.size(); ++i)
                traj.channel_names.emplace_back(fields[i]);
            traj.channels.resize(traj.channel_names.size());
            header = false;
            continue;
        }
        if (fields.size() != traj.channel_names.size() + 1)
            throw ArgumentError("trajectory CSV: row width does not match header");
        traj.times.push_back(parse_double(fields[0]));
        for (std::size_t c = 0; c < traj.channels.size(); ++c)
            traj.channels[c].push_back(parse_double(fields[c + 1]));
    }
    if (header) throw ArgumentError("trajectory CSV: empty input");
    traj.validate();
    return traj;
}

}  // namespace ns
