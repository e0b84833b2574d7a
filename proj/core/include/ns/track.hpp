#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ns/fit.hpp"

namespace ns {

enum class TrackPhase { Collecting, Locked, Refitting };

enum class TrackEventKind { LockAcquired, Checked, MismatchDetected, RefitTriggered };

struct TrackEvent {
    TrackEventKind kind = TrackEventKind::Checked;
    double t = 0.0;
    std::optional<double> residual;  // max per-channel |pred - obs| where meaningful
};

std::string to_string(TrackEventKind kind);
TrackEventKind track_event_kind_from_string(std::string_view name);

/// Line-delimited JSON records {kind, t, residual?}.
std::string event_log_to_jsonl(std::span<const TrackEvent> events);
std::vector<TrackEvent> event_log_from_jsonl(std::string_view jsonl);

struct TrackerConfig {
    int window = 100;          // samples collected before a fit is attempted
    double check_eps = 1e-4;   // relative to the locked fit's data_scale
    int consecutive_k = 3;     // debounce: misses required to drop a lock
    FitConfig fit{};
    double mass = 1.0;         // kg, for force reporting
    Library library = Library::full();

    void validate() const;
};

struct TimedSample {
    double t = 0.0;
    std::vector<double> values;
};

struct TrackerState {
    TrackPhase phase = TrackPhase::Collecting;
    std::vector<TimedSample> buffer;
    std::optional<FitResult> locked_model;
    int mismatch_count = 0;
    std::vector<TrackEvent> event_log;
    long fits_attempted = 0;
};

/// The streaming loop: collect a window, lock a fitted pattern, check
/// predictions against incoming observations, refit on sustained mismatch.
///
/// Collecting: buffer samples; at `window` samples run model selection. On
/// acceptance emit LockAcquired and go Locked; otherwise slide the window.
/// Locked: compare the locked prediction per channel against the observation
/// at check_eps * data_scale. A pass emits Checked and clears the mismatch
/// run; at consecutive_k misses emit MismatchDetected and RefitTriggered,
/// drop the model, and restart collection from the first sample of the run.
class Tracker {
public:
    Tracker(TrackerConfig config, std::vector<std::string> channel_names);

    /// Feed one observation. Sample times must be strictly increasing
    /// (ArgumentError otherwise). Returns the events emitted by this sample.
    std::vector<TrackEvent> observe(double t, std::span<const double> values);

    /// Locked-model channel values at time t. Pure. Throws StateError unless
    /// the tracker is Locked.
    std::vector<double> predict_at(double t) const;

    const TrackerState& state() const { return state_; }
    const TrackerConfig& config() const { return config_; }
    const std::vector<std::string>& channel_names() const { return channel_names_; }

private:
    std::vector<TrackEvent> emit_and_log(std::vector<TrackEvent> events);
    std::optional<FitResult> try_fit() const;

    TrackerConfig config_;
    std::vector<std::string> channel_names_;
    TrackerState state_;
    double last_time_ = 0.0;
    bool seen_sample_ = false;
    std::vector<TimedSample> mismatch_run_;
};

}  // namespace ns
