#include "ns/track.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "ns/errors.hpp"

namespace ns {

std::string to_string(TrackEventKind kind) {
    switch (kind) {
        case TrackEventKind::LockAcquired: return "lock_acquired";
        case TrackEventKind::Checked: return "checked";
        case TrackEventKind::MismatchDetected: return "mismatch_detected";
        case TrackEventKind::RefitTriggered: return "refit_triggered";
    }
    return "unknown";
}

TrackEventKind track_event_kind_from_string(std::string_view name) {
    if (name == "lock_acquired") return TrackEventKind::LockAcquired;
    if (name == "checked") return TrackEventKind::Checked;
    if (name == "mismatch_detected") return TrackEventKind::MismatchDetected;
    if (name == "refit_triggered") return TrackEventKind::RefitTriggered;
    throw ArgumentError("unknown track event kind '" + std::string(name) + "'");
}

std::string event_log_to_jsonl(std::span<const TrackEvent> events) {
    std::string out;
    for (const TrackEvent& e : events) {
        nlohmann::ordered_json record;
        record["kind"] = to_string(e.kind);
        record["t"] = e.t;
        if (e.residual) record["residual"] = *e.residual;
        out += record.dump();
        out += '\n';
    }
    return out;
}

std::vector<TrackEvent> event_log_from_jsonl(std::string_view jsonl) {
    std::vector<TrackEvent> events;
    std::size_t pos = 0;
    while (pos < jsonl.size()) {
        std::size_t eol = jsonl.find('\n', pos);
        if (eol == std::string_view::npos) eol = jsonl.size();
        const std::string_view line = jsonl.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        const auto record = nlohmann::json::parse(line);
        TrackEvent e;
        e.kind = track_event_kind_from_string(record.at("kind").get<std::string>());
        e.t = record.at("t").get<double>();
        if (record.contains("residual")) e.residual = record["residual"].get<double>();
        events.push_back(e);
    }
    return events;
}

void TrackerConfig::validate() const {
    fit.validate();
    const int min_window = std::max(2 * fit.max_terms, 4);
    if (window < min_window)
        throw ArgumentError("TrackerConfig: window smaller than the fit's minimum sample count");
    if (consecutive_k < 1) throw ArgumentError("TrackerConfig: consecutive_k must be >= 1");
    if (!(check_eps > 0.0)) throw ArgumentError("TrackerConfig: check_eps must be > 0");
    if (!(mass > 0.0)) throw ArgumentError("TrackerConfig: mass must be > 0");
}

Tracker::Tracker(TrackerConfig config, std::vector<std::string> channel_names)
    : config_(std::move(config)), channel_names_(std::move(channel_names)) {
    config_.validate();
    if (channel_names_.empty()) throw ArgumentError("Tracker: at least one channel required");
}

std::vector<TrackEvent> Tracker::emit_and_log(std::vector<TrackEvent> events) {
    state_.event_log.insert(state_.event_log.end(), events.begin(), events.end());
    return events;
}

std::optional<FitResult> Tracker::try_fit() const {
    Trajectory window;
    window.channel_names = channel_names_;
    window.times.reserve(state_.buffer.size());
    window.channels.assign(channel_names_.size(), {});
    for (const TimedSample& s : state_.buffer) {
        window.times.push_back(s.t);
        for (std::size_t c = 0; c < channel_names_.size(); ++c)
            window.channels[c].push_back(s.values[c]);
    }
    FitResult result = fit_trajectory(window, config_.library, config_.fit);
    if (!result.accepted()) return std::nullopt;
    return result;
}

std::vector<TrackEvent> Tracker::observe(double t, std::span<const double> values) {
    if (values.size() != channel_names_.size())
        throw ArgumentError("Tracker::observe: sample width does not match channel count");
    if (seen_sample_ && !(t > last_time_))
        throw ArgumentError("Tracker::observe: sample times must be strictly increasing");
    last_time_ = t;
    seen_sample_ = true;

    std::vector<TrackEvent> events;

    if (state_.phase == TrackPhase::Locked) {
        const FitResult& model = *state_.locked_model;
        double worst = 0.0;
        bool match = true;
        for (std::size_t c = 0; c < channel_names_.size(); ++c) {
            const ChannelFit& fit = model.channels[c];
            const double predicted = fit.model.eval(t);
            const double err = std::abs(predicted - values[c]);
            worst = std::max(worst, err);
            if (err > config_.check_eps * fit.data_scale) match = false;
        }
        if (match) {
            state_.mismatch_count = 0;
            mismatch_run_.clear();
            events.push_back({TrackEventKind::Checked, t, worst});
            return emit_and_log(std::move(events));
        }
        ++state_.mismatch_count;
        mismatch_run_.push_back({t, {values.begin(), values.end()}});
        if (state_.mismatch_count < config_.consecutive_k) return {};

        // Sustained mismatch: drop the lock and rebuild from the first
        // sample of the run, so stale-regime data is excluded.
        events.push_back({TrackEventKind::MismatchDetected, t, worst});
        events.push_back({TrackEventKind::RefitTriggered, t, std::nullopt});
        state_.locked_model.reset();
        state_.mismatch_count = 0;
        state_.phase = TrackPhase::Refitting;
        state_.buffer = std::move(mismatch_run_);
        mismatch_run_.clear();
        return emit_and_log(std::move(events));
    }

    // Collecting (initial) or Refitting (collecting after a mismatch).
    state_.buffer.push_back({t, {values.begin(), values.end()}});
    if (static_cast<int>(state_.buffer.size()) < config_.window)
        return emit_and_log(std::move(events));

    ++state_.fits_attempted;
    std::optional<FitResult> fitted = try_fit();
    if (!fitted) {
        // Sliding window: drop the oldest sample and keep collecting.
        state_.buffer.erase(state_.buffer.begin());
        return emit_and_log(std::move(events));
    }

    double worst_rmse = 0.0;
    for (const ChannelFit& c : fitted->channels) worst_rmse = std::max(worst_rmse, c.model.rmse);
    state_.locked_model = std::move(*fitted);
    state_.phase = TrackPhase::Locked;
    state_.mismatch_count = 0;
    state_.buffer.clear();
    mismatch_run_.clear();
    events.push_back({TrackEventKind::LockAcquired, t, worst_rmse});
    return emit_and_log(std::move(events));
}

std::vector<double> Tracker::predict_at(double t) const {
    if (state_.phase != TrackPhase::Locked || !state_.locked_model)
        throw StateError("Tracker::predict_at requires a locked model");
    std::vector<double> out;
    out.reserve(channel_names_.size());
    for (const ChannelFit& c : state_.locked_model->channels) out.push_back(c.model.eval(t));
    return out;
}

}  // namespace ns
