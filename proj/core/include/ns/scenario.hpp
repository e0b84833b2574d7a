#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ns/trajectory.hpp"

namespace ns {

inline constexpr double kStandardGravity = 9.80665;  // m/s^2

/// x(t) = x0 + v0*t + accel*t^2/2, channel "x".
struct FreeFallSpec {
    double x0 = 0.0;
    double v0 = 0.0;
    double accel = 0.0;
};

/// x(t) = amplitude * exp(-gamma*t) * cos(omega*t - phase), channel "x".
struct DampedPendulumSpec {
    double amplitude = 1.0;
    double gamma = 0.0;   // >= 0
    double omega = 1.0;   // > 0
    double phase = 0.0;   // radians
};

/// Spinning-ball spiral in the horizontal plane, measured by arc length and
/// velocity angle:
///   s(t)     = length * ln(t/tau + 1)
///   theta(t) = theta0 + (lambda * spin / tau) * t,  spin = radius*omega0/v0xy
/// Channels "s", "theta" plus Cartesian "x", "y" reconstructed by fixed-step
/// composite Simpson quadrature of (ds/du)*(cos theta, sin theta) at the
/// sample step. With gravity enabled, a third channel z(t) = z0 - g*t^2/2.
struct CurveBallSpec {
    double theta0 = 0.0;
    double lambda = 1.0;
    double radius = 0.11;  // m
    double omega0 = 50.0;  // rad/s initial spin
    double v0xy = 25.0;    // m/s initial horizontal speed, > 0
    double tau = 1.0;      // s, > 0
    double length = 20.0;  // m, characteristic penetration length, > 0
    double x0 = 0.0;
    double y0 = 0.0;
    bool with_gravity = false;
    double z0 = 0.0;
    double g = kStandardGravity;

    double spin() const { return radius * omega0 / v0xy; }
};

/// Canonical regime-switch composite: uniform velocity v0 from x=0, switching
/// to free fall with the given acceleration (starting from the switch
/// position, zero vertical speed) at switch_time. Channel "x".
struct PiecewiseSpec {
    double v0 = 1.0;
    double switch_time = 5.0;  // absolute seconds
    double accel = -9.8;
};

using ScenarioParams = std::variant<FreeFallSpec, DampedPendulumSpec, CurveBallSpec, PiecewiseSpec>;

/// Generator configuration. Samples lie at t_start + k/sample_rate, inclusive
/// of t_start, exclusive of points at or beyond t_end.
struct ScenarioSpec {
    ScenarioParams params;
    double t_start = 0.0;
    double t_end = 1.0;
    double sample_rate = 100.0;  // Hz, > 0

    void validate() const;  // throws ArgumentError on bad bounds
};

/// Deterministic additive Gaussian perturbation.
struct NoiseSpec {
    double sigma = 0.0;  // channel units, >= 0
    std::uint64_t seed = 0;
};

/// The uniform sample grid for a window: t_start + k/rate for k = 0.. while
/// strictly below t_end.
std::vector<double> sample_times(double t_start, double t_end, double sample_rate);

Trajectory gen_free_fall(const ScenarioSpec& spec);
Trajectory gen_damped_pendulum(const ScenarioSpec& spec);
Trajectory gen_curve_ball(const ScenarioSpec& spec);

/// Dispatch on the spec's parameter kind.
Trajectory generate(const ScenarioSpec& spec);

/// One stage of a composite trajectory. The spec's window is ignored except
/// for sample_rate (which must agree across segments); the segment spans
/// [previous end, previous end + duration) in local time.
struct PiecewiseSegment {
    ScenarioSpec spec;
    double duration = 0.0;  // seconds, > 0
};

struct PiecewiseTrajectory {
    Trajectory trajectory;
    std::vector<double> switch_times;  // one per interior segment boundary
};

/// Concatenate segments into one trajectory, offsetting each segment so its
/// initial position equals the previous segment's final position. Positions
/// are continuous at every switch time by construction; derivatives may jump.
PiecewiseTrajectory gen_piecewise(std::span<const PiecewiseSegment> segments);

/// Adds i.i.d. zero-mean Gaussian noise of the stated sigma to every channel
/// value; times and names untouched. Deterministic given (trajectory, seed);
/// sigma = 0 returns a bitwise-identical copy.
Trajectory add_noise(const Trajectory& trajectory, const NoiseSpec& noise);

/// Closed-form channel values of a scenario at an arbitrary time (curve-ball
/// x/y via the same fixed-step quadrature from t = 0 at the spec's sample
/// step). Channel order matches the generated trajectory.
std::vector<double> oracle_values(const ScenarioSpec& spec, double t);
std::vector<std::string> scenario_channel_names(const ScenarioSpec& spec);

/// Flat key-value form of a spec (documented keys per kind); values are
/// shortest round-trip decimals. Round-trips exactly.
std::map<std::string, std::string> to_key_values(const ScenarioSpec& spec);
ScenarioSpec scenario_from_key_values(const std::map<std::string, std::string>& kv);

/// Spiral-rate coefficient from experimental lift/drag coefficients:
/// lambda = 4*Cn/Cd.
double lambda_from_lift_drag(double c_n, double c_d);

}  // namespace ns
