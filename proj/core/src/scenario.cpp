#include "ns/scenario.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <system_error>

#include "ns/errors.hpp"

namespace ns {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double free_fall_at(const FreeFallSpec& p, double t) {
    return p.x0 + p.v0 * t + 0.5 * p.accel * t * t;
}

double pendulum_at(const DampedPendulumSpec& p, double t) {
    return p.amplitude * std::exp(-p.gamma * t) * std::cos(p.omega * t - p.phase);
}

double piecewise_at(const PiecewiseSpec& p, double t) {
    if (t < p.switch_time) return p.v0 * t;
    const double u = t - p.switch_time;
    return p.v0 * p.switch_time + 0.5 * p.accel * u * u;
}

double curve_arc_at(const CurveBallSpec& p, double t) {
    return p.length * std::log(t / p.tau + 1.0);
}

double curve_angle_at(const CurveBallSpec& p, double t) {
    return p.theta0 + (p.lambda * p.spin() / p.tau) * t;
}

double curve_speed_at(const CurveBallSpec& p, double u) { return p.length / (u + p.tau); }

// One composite-Simpson step of the planar velocity (ds/du)*(cos, sin).
void simpson_step(const CurveBallSpec& p, double a, double h, double& x, double& y) {
    const double mid = a + 0.5 * h;
    const double b = a + h;
    const double fa = curve_speed_at(p, a);
    const double fm = curve_speed_at(p, mid);
    const double fb = curve_speed_at(p, b);
    const double ta = curve_angle_at(p, a);
    const double tm = curve_angle_at(p, mid);
    const double tb = curve_angle_at(p, b);
    x += h / 6.0 * (fa * std::cos(ta) + 4.0 * fm * std::cos(tm) + fb * std::cos(tb));
    y += h / 6.0 * (fa * std::sin(ta) + 4.0 * fm * std::sin(tm) + fb * std::sin(tb));
}

// Planar position at time t, integrating from 0 at step h (partial tail step
// included).
void curve_position_at(const CurveBallSpec& p, double t, double h, double& x, double& y) {
    x = p.x0;
    y = p.y0;
    if (t <= 0.0) return;
    const auto steps = static_cast<std::size_t>(std::floor(t / h + 1e-9));
    double u = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
        simpson_step(p, u, h, x, y);
        u += h;
    }
    const double rest = t - u;
    if (rest > 1e-12) simpson_step(p, u, rest, x, y);
}

void validate_params(const ScenarioParams& params) {
    if (const auto* p = std::get_if<DampedPendulumSpec>(&params)) {
        if (!(p->omega > 0.0)) throw ArgumentError("damped pendulum requires omega > 0");
        if (!(p->gamma >= 0.0)) throw ArgumentError("damped pendulum requires gamma >= 0");
    } else if (const auto* c = std::get_if<CurveBallSpec>(&params)) {
        if (!(c->tau > 0.0)) throw ArgumentError("curve ball requires tau > 0");
        if (!(c->length > 0.0)) throw ArgumentError("curve ball requires length > 0");
        if (!(c->v0xy > 0.0)) throw ArgumentError("curve ball requires v0xy > 0");
    } else if (const auto* w = std::get_if<PiecewiseSpec>(&params)) {
        if (!(w->switch_time > 0.0)) throw ArgumentError("piecewise requires switch_time > 0");
    }
}

void append_double(std::string& out, double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, res.ptr);
}

std::string double_str(double value) {
    std::string s;
    append_double(s, value);
    return s;
}

double kv_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    double value = 0.0;
    const char* first = it->second.data();
    const char* last = first + it->second.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last)
        throw ArgumentError("scenario config: malformed value for '" + key + "'");
    return value;
}

}  // namespace

void ScenarioSpec::validate() const {
    if (!(t_end > t_start)) throw ArgumentError("scenario requires t_end > t_start");
    if (!(sample_rate > 0.0)) throw ArgumentError("scenario requires sample_rate > 0");
    validate_params(params);
}

std::vector<double> sample_times(double t_start, double t_end, double sample_rate) {
    if (!(t_end > t_start)) throw ArgumentError("sample_times requires t_end > t_start");
    if (!(sample_rate > 0.0)) throw ArgumentError("sample_times requires sample_rate > 0");
    const auto count =
        static_cast<std::size_t>(std::ceil((t_end - t_start) * sample_rate - 1e-9));
    std::vector<double> times(std::max<std::size_t>(count, 1));
    for (std::size_t k = 0; k < times.size(); ++k)
        times[k] = t_start + static_cast<double>(k) / sample_rate;
    return times;
}

std::vector<std::string> scenario_channel_names(const ScenarioSpec& spec) {
    if (std::holds_alternative<CurveBallSpec>(spec.params)) {
        const auto& p = std::get<CurveBallSpec>(spec.params);
        std::vector<std::string> names = {"s", "theta", "x", "y"};
        if (p.with_gravity) names.push_back("z");
        return names;
    }
    return {"x"};
}

std::vector<double> oracle_values(const ScenarioSpec& spec, double t) {
    spec.validate();
    if (const auto* p = std::get_if<FreeFallSpec>(&spec.params)) return {free_fall_at(*p, t)};
    if (const auto* p = std::get_if<DampedPendulumSpec>(&spec.params))
        return {pendulum_at(*p, t)};
    if (const auto* p = std::get_if<PiecewiseSpec>(&spec.params)) return {piecewise_at(*p, t)};
    const auto& p = std::get<CurveBallSpec>(spec.params);
    double x = 0.0, y = 0.0;
    curve_position_at(p, t, 1.0 / spec.sample_rate, x, y);
    std::vector<double> out = {curve_arc_at(p, t), curve_angle_at(p, t), x, y};
    if (p.with_gravity) out.push_back(p.z0 - 0.5 * p.g * t * t);
    return out;
}

Trajectory gen_free_fall(const ScenarioSpec& spec) {
    spec.validate();
    const auto& p = std::get<FreeFallSpec>(spec.params);
    Trajectory traj;
    traj.channel_names = {"x"};
    traj.times = sample_times(spec.t_start, spec.t_end, spec.sample_rate);
    traj.channels.resize(1);
    traj.channels[0].reserve(traj.times.size());
    for (double t : traj.times) traj.channels[0].push_back(free_fall_at(p, t));
    return traj;
}

Trajectory gen_damped_pendulum(const ScenarioSpec& spec) {
    spec.validate();
    const auto& p = std::get<DampedPendulumSpec>(spec.params);
    Trajectory traj;
    traj.channel_names = {"x"};
    traj.times = sample_times(spec.t_start, spec.t_end, spec.sample_rate);
    traj.channels.resize(1);
    traj.channels[0].reserve(traj.times.size());
    for (double t : traj.times) traj.channels[0].push_back(pendulum_at(p, t));
    return traj;
}

Trajectory gen_curve_ball(const ScenarioSpec& spec) {
    spec.validate();
    const auto& p = std::get<CurveBallSpec>(spec.params);
    Trajectory traj;
    traj.channel_names = scenario_channel_names(spec);
    traj.times = sample_times(spec.t_start, spec.t_end, spec.sample_rate);
    traj.channels.resize(traj.channel_names.size());
    for (auto& channel : traj.channels) channel.reserve(traj.times.size());

    const double h = 1.0 / spec.sample_rate;
    double x = p.x0, y = p.y0;
    // March the quadrature forward once; quadrature nodes are the sample
    // times themselves plus their midpoints.
    if (spec.t_start > 0.0) curve_position_at(p, spec.t_start, h, x, y);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const double t = traj.times[k];
        if (k > 0) simpson_step(p, traj.times[k - 1], t - traj.times[k - 1], x, y);
        traj.channels[0].push_back(curve_arc_at(p, t));
        traj.channels[1].push_back(curve_angle_at(p, t));
        traj.channels[2].push_back(x);
        traj.channels[3].push_back(y);
        if (p.with_gravity) traj.channels[4].push_back(p.z0 - 0.5 * p.g * t * t);
    }
    return traj;
}

Trajectory generate(const ScenarioSpec& spec) {
    spec.validate();
    if (std::holds_alternative<FreeFallSpec>(spec.params)) return gen_free_fall(spec);
    if (std::holds_alternative<DampedPendulumSpec>(spec.params))
        return gen_damped_pendulum(spec);
    if (std::holds_alternative<CurveBallSpec>(spec.params)) return gen_curve_ball(spec);

    const auto& p = std::get<PiecewiseSpec>(spec.params);
    if (spec.t_start != 0.0)
        throw ArgumentError("piecewise scenario requires t_start = 0");
    if (!(p.switch_time > spec.t_start && p.switch_time < spec.t_end))
        throw ArgumentError("piecewise switch_time must lie inside the sample window");
    ScenarioSpec uniform = spec;
    uniform.params = FreeFallSpec{0.0, p.v0, 0.0};
    ScenarioSpec falling = spec;
    falling.params = FreeFallSpec{0.0, 0.0, p.accel};
    const PiecewiseSegment segments[] = {
        {uniform, p.switch_time - spec.t_start},
        {falling, spec.t_end - p.switch_time},
    };
    return gen_piecewise(segments).trajectory;
}

PiecewiseTrajectory gen_piecewise(std::span<const PiecewiseSegment> segments) {
    if (segments.empty()) throw ArgumentError("gen_piecewise: at least one segment required");
    const double rate = segments[0].spec.sample_rate;
    const auto names = scenario_channel_names(segments[0].spec);
    for (const auto& seg : segments) {
        if (!(seg.duration > 0.0))
            throw ArgumentError("gen_piecewise: segment durations must be positive");
        if (seg.spec.sample_rate != rate)
            throw ArgumentError("gen_piecewise: segments must share one sample rate");
        if (scenario_channel_names(seg.spec) != names)
            throw ArgumentError("gen_piecewise: segment channels are incompatible");
    }

    PiecewiseTrajectory out;
    out.trajectory.channel_names = names;
    out.trajectory.channels.resize(names.size());

    double segment_start = 0.0;
    std::vector<double> offset(names.size(), 0.0);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        ScenarioSpec local = segments[s].spec;
        local.t_start = 0.0;
        local.t_end = segments[s].duration;
        if (s > 0) {
            // Previous segment's closed-form end position minus this
            // segment's own start defines the continuity offset.
            ScenarioSpec prev = segments[s - 1].spec;
            prev.t_start = 0.0;
            prev.t_end = segments[s - 1].duration;
            const auto prev_end = oracle_values(prev, segments[s - 1].duration);
            const auto own_start = oracle_values(local, 0.0);
            for (std::size_t c = 0; c < names.size(); ++c)
                offset[c] += prev_end[c] - own_start[c];
            out.switch_times.push_back(segment_start);
        }
        const Trajectory piece = generate(local);
        for (std::size_t i = 0; i < piece.times.size(); ++i)
            out.trajectory.times.push_back(segment_start + piece.times[i]);
        for (std::size_t c = 0; c < names.size(); ++c)
            for (double v : piece.channels[c]) out.trajectory.channels[c].push_back(v + offset[c]);
        segment_start += segments[s].duration;
    }
    out.trajectory.validate();
    return out;
}

Trajectory add_noise(const Trajectory& trajectory, const NoiseSpec& noise) {
    if (!(noise.sigma >= 0.0)) throw ArgumentError("add_noise requires sigma >= 0");
    Trajectory out = trajectory;
    if (noise.sigma == 0.0) return out;

    std::mt19937_64 engine(noise.seed);
    const auto uniform = [&engine](bool open_at_zero) {
        // 53-bit mantissa draw; the +1 variant avoids log(0).
        const std::uint64_t bits = engine() >> 11;
        return open_at_zero ? (static_cast<double>(bits) + 1.0) * 0x1.0p-53
                            : static_cast<double>(bits) * 0x1.0p-53;
    };
    for (std::size_t i = 0; i < out.times.size(); ++i) {
        for (auto& channel : out.channels) {
            const double u1 = uniform(true);
            const double u2 = uniform(false);
            const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
            channel[i] += noise.sigma * z;
        }
    }
    return out;
}

std::map<std::string, std::string> to_key_values(const ScenarioSpec& spec) {
    std::map<std::string, std::string> kv;
    kv["t_start"] = double_str(spec.t_start);
    kv["t_end"] = double_str(spec.t_end);
    kv["rate"] = double_str(spec.sample_rate);
    if (const auto* p = std::get_if<FreeFallSpec>(&spec.params)) {
        kv["scenario"] = "free_fall";
        kv["x0"] = double_str(p->x0);
        kv["v0"] = double_str(p->v0);
        kv["accel"] = double_str(p->accel);
    } else if (const auto* p = std::get_if<DampedPendulumSpec>(&spec.params)) {
        kv["scenario"] = "damped_pendulum";
        kv["amplitude"] = double_str(p->amplitude);
        kv["gamma"] = double_str(p->gamma);
        kv["omega"] = double_str(p->omega);
        kv["phi"] = double_str(p->phase);
    } else if (const auto* p = std::get_if<CurveBallSpec>(&spec.params)) {
        kv["scenario"] = "curve_ball";
        kv["theta0"] = double_str(p->theta0);
        kv["lambda"] = double_str(p->lambda);
        kv["radius"] = double_str(p->radius);
        kv["omega0"] = double_str(p->omega0);
        kv["v0xy"] = double_str(p->v0xy);
        kv["tau"] = double_str(p->tau);
        kv["length"] = double_str(p->length);
        kv["x0"] = double_str(p->x0);
        kv["y0"] = double_str(p->y0);
        kv["with_gravity"] = p->with_gravity ? "1" : "0";
        kv["z0"] = double_str(p->z0);
        kv["g"] = double_str(p->g);
    } else {
        const auto& pw = std::get<PiecewiseSpec>(spec.params);
        kv["scenario"] = "piecewise";
        kv["v0"] = double_str(pw.v0);
        kv["switch_at"] = double_str(pw.switch_time);
        kv["accel"] = double_str(pw.accel);
    }
    return kv;
}

ScenarioSpec scenario_from_key_values(const std::map<std::string, std::string>& kv) {
    const auto it = kv.find("scenario");
    if (it == kv.end()) throw ArgumentError("scenario config: missing 'scenario' key");
    const std::string& kind = it->second;

    ScenarioSpec spec;
    spec.t_start = kv_double(kv, "t_start", 0.0);
    spec.t_end = kv_double(kv, "t_end", 1.0);
    spec.sample_rate = kv_double(kv, "rate", 100.0);
    if (kind == "free_fall") {
        FreeFallSpec p;
        p.x0 = kv_double(kv, "x0", p.x0);
        p.v0 = kv_double(kv, "v0", p.v0);
        p.accel = kv_double(kv, "accel", p.accel);
        spec.params = p;
    } else if (kind == "damped_pendulum") {
        DampedPendulumSpec p;
        p.amplitude = kv_double(kv, "amplitude", p.amplitude);
        p.gamma = kv_double(kv, "gamma", p.gamma);
        p.omega = kv_double(kv, "omega", p.omega);
        p.phase = kv_double(kv, "phi", p.phase);
        spec.params = p;
    } else if (kind == "curve_ball") {
        CurveBallSpec p;
        p.theta0 = kv_double(kv, "theta0", p.theta0);
        p.lambda = kv_double(kv, "lambda", p.lambda);
        p.radius = kv_double(kv, "radius", p.radius);
        p.omega0 = kv_double(kv, "omega0", p.omega0);
        p.v0xy = kv_double(kv, "v0xy", p.v0xy);
        p.tau = kv_double(kv, "tau", p.tau);
        p.length = kv_double(kv, "length", p.length);
        p.x0 = kv_double(kv, "x0", p.x0);
        p.y0 = kv_double(kv, "y0", p.y0);
        p.with_gravity = kv_double(kv, "with_gravity", 0.0) != 0.0;
        p.z0 = kv_double(kv, "z0", p.z0);
        p.g = kv_double(kv, "g", p.g);
        spec.params = p;
    } else if (kind == "piecewise") {
        PiecewiseSpec p;
        p.v0 = kv_double(kv, "v0", p.v0);
        p.switch_time = kv_double(kv, "switch_at", p.switch_time);
        p.accel = kv_double(kv, "accel", p.accel);
        spec.params = p;
    } else {
        throw ArgumentError("scenario config: unknown scenario '" + kind + "'");
    }
    spec.validate();
    return spec;
}

double lambda_from_lift_drag(double c_n, double c_d) {
    if (c_d == 0.0) throw ArgumentError("lambda_from_lift_drag requires C_D != 0");
    return 4.0 * c_n / c_d;
}

}  // namespace ns
