#include "cli_app.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ns/errors.hpp"
#include "ns/fit.hpp"
#include "ns/model_io.hpp"
#include "ns/scenario.hpp"
#include "ns/track.hpp"
#include "ns/trajectory.hpp"

namespace ns::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot read input file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

struct OutputFile {
    std::string path;
    std::string content;
};

// All outputs of a run are staged in memory and written at the very end via
// temp-file + rename, so a failing run leaves no partial files behind.
void write_outputs(const std::vector<OutputFile>& files) {
    for (const OutputFile& f : files) {
        const std::string tmp = f.path + ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw Error("cannot open '" + tmp + "' for writing");
            out.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
            if (!out) {
                std::remove(tmp.c_str());
                throw Error("failed writing '" + tmp + "'");
            }
        }
        std::error_code ec;
        std::filesystem::rename(tmp, f.path, ec);
        if (ec) {
            std::remove(tmp.c_str());
            throw Error("failed to move '" + tmp + "' into place: " + ec.message());
        }
    }
}

ordered_json manifest_skeleton(const std::string& command, std::uint64_t seed) {
    ordered_json m;
    m["format"] = "ns-run-manifest";
    m["version"] = 1;
    m["command"] = command;
    m["seed"] = seed;
    return m;
}

ordered_json kv_to_json(const std::map<std::string, std::string>& kv) {
    ordered_json out;
    for (const auto& [key, value] : kv) out[key] = value;
    return out;
}

std::map<std::string, std::string> kv_from_json(const nlohmann::json& obj) {
    std::map<std::string, std::string> kv;
    for (const auto& [key, value] : obj.items()) kv[key] = value.get<std::string>();
    return kv;
}

// --- scenario flags -------------------------------------------------------

struct ScenarioFlags {
    std::string scenario;
    double rate = 100.0;
    std::optional<double> duration;
    std::optional<double> x0, v0, accel;
    std::optional<double> amplitude, gamma, omega, phi;
    std::optional<double> theta0, lambda, radius, omega0, v0xy, tau, length, z0, g;
    std::optional<double> switch_at;
    bool with_gravity = false;
};

void register_scenario_flags(CLI::App* cmd, ScenarioFlags& f, bool scenario_required) {
    auto* opt = cmd->add_option("--scenario", f.scenario,
                                "free_fall | damped_pendulum | curve_ball | piecewise");
    if (scenario_required) opt->required();
    cmd->add_option("--rate", f.rate, "sample rate in Hz");
    cmd->add_option("--duration", f.duration, "seconds of data to generate");
    cmd->add_option("--x0", f.x0, "free fall: initial position");
    cmd->add_option("--v0", f.v0, "free fall / piecewise: initial velocity");
    cmd->add_option("--accel", f.accel, "free fall / piecewise: acceleration");
    cmd->add_option("--amplitude", f.amplitude, "pendulum: amplitude");
    cmd->add_option("--gamma", f.gamma, "pendulum: damping rate");
    cmd->add_option("--omega", f.omega, "pendulum: angular frequency");
    cmd->add_option("--phi", f.phi, "pendulum: phase");
    cmd->add_option("--theta0", f.theta0, "curve ball: initial velocity angle");
    cmd->add_option("--lambda", f.lambda, "curve ball: spiral-rate coefficient");
    cmd->add_option("--radius", f.radius, "curve ball: ball radius");
    cmd->add_option("--omega0", f.omega0, "curve ball: initial spin rate");
    cmd->add_option("--v0xy", f.v0xy, "curve ball: initial horizontal speed");
    cmd->add_option("--tau", f.tau, "curve ball: characteristic time");
    cmd->add_option("--length", f.length, "curve ball: characteristic penetration length");
    cmd->add_flag("--with-gravity", f.with_gravity, "curve ball: add the z channel");
    cmd->add_option("--z0", f.z0, "curve ball: initial height of the z channel");
    cmd->add_option("--g", f.g, "curve ball: gravitational acceleration");
    cmd->add_option("--switch-at", f.switch_at, "piecewise: regime switch time");
}

ScenarioSpec build_scenario(const ScenarioFlags& f) {
    ScenarioSpec spec;
    spec.t_start = 0.0;
    spec.sample_rate = f.rate;
    if (f.scenario == "free_fall") {
        FreeFallSpec p;
        p.x0 = f.x0.value_or(10.0);
        p.v0 = f.v0.value_or(0.0);
        p.accel = f.accel.value_or(-9.8);
        spec.params = p;
        spec.t_end = f.duration.value_or(20.0);
    } else if (f.scenario == "damped_pendulum") {
        DampedPendulumSpec p;
        p.amplitude = f.amplitude.value_or(1.0);
        p.gamma = f.gamma.value_or(0.1);
        p.omega = f.omega.value_or(kTwoPi);
        p.phase = f.phi.value_or(0.0);
        spec.params = p;
        spec.t_end = f.duration.value_or(20.0);
    } else if (f.scenario == "curve_ball") {
        CurveBallSpec p;
        p.theta0 = f.theta0.value_or(0.0);
        p.lambda = f.lambda.value_or(1.2);
        p.radius = f.radius.value_or(0.11);
        p.omega0 = f.omega0.value_or(50.0);
        p.v0xy = f.v0xy.value_or(25.0);
        p.tau = f.tau.value_or(1.0);
        p.length = f.length.value_or(20.0);
        p.with_gravity = f.with_gravity;
        p.z0 = f.z0.value_or(0.0);
        p.g = f.g.value_or(kStandardGravity);
        spec.params = p;
        spec.t_end = f.duration.value_or(3.0);
    } else if (f.scenario == "piecewise") {
        PiecewiseSpec p;
        p.v0 = f.v0.value_or(1.0);
        p.switch_time = f.switch_at.value_or(5.0);
        p.accel = f.accel.value_or(-9.8);
        spec.params = p;
        spec.t_end = f.duration.value_or(10.0);
    } else {
        throw ArgumentError("unknown --scenario '" + f.scenario + "'");
    }
    spec.validate();
    return spec;
}

// --- fit configuration flags ----------------------------------------------

struct FitFlags {
    std::string library = "full";
    int max_terms = 3;
    double rmse_accept = 1e-8;
};

void register_fit_flags(CLI::App* cmd, FitFlags& f) {
    cmd->add_option("--library", f.library, "candidate library: full | poly")
        ->check(CLI::IsMember({"full", "poly"}));
    cmd->add_option("--max-terms", f.max_terms, "largest candidate subset size");
    cmd->add_option("--rmse-accept", f.rmse_accept, "acceptance threshold relative to data scale");
}

Library library_from_flags(const FitFlags& f) {
    return f.library == "poly" ? Library::polynomial_only() : Library::full();
}

FitConfig fit_config_from_flags(const FitFlags& f) {
    FitConfig config;
    config.max_terms = f.max_terms;
    config.rmse_accept = f.rmse_accept;
    config.validate();
    return config;
}

std::optional<std::map<std::string, std::string>> load_provenance(const std::string& input_path) {
    const std::string manifest_path = input_path + ".manifest.json";
    std::ifstream probe(manifest_path);
    if (!probe) return std::nullopt;
    try {
        const auto doc = nlohmann::json::parse(read_file(manifest_path));
        if (!doc.contains("scenario")) return std::nullopt;
        return kv_from_json(doc["scenario"]);
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;  // a foreign manifest is not an error, just no oracle
    }
}

std::string channel_report(const std::string& name, const ChannelFit& fit, double mass) {
    std::ostringstream out;
    out << "channel " << name << ": " << (fit.accepted ? "accepted" : "NOT accepted")
        << "  rmse=" << fit.model.rmse << "  data_scale=" << fit.data_scale
        << "  candidates=" << fit.candidates_evaluated << "\n";
    for (std::size_t j = 0; j < fit.model.terms.size(); ++j)
        out << "  " << fit.model.terms[j].name() << "  coefficient="
            << format_double(fit.model.coefficients[j]) << "\n";
    bool uses_omega = false, uses_gamma = false, uses_tau = false;
    for (const auto& term : fit.model.terms) {
        uses_omega = uses_omega || term.uses(PrimitiveKind::Harmonic);
        uses_gamma = uses_gamma || term.uses(PrimitiveKind::ExpDecay);
        uses_tau = uses_tau || term.uses(PrimitiveKind::LogShift);
    }
    if (uses_omega) out << "  omega=" << format_double(fit.model.params.omega) << "\n";
    if (uses_gamma) out << "  gamma=" << format_double(fit.model.params.gamma) << "\n";
    if (uses_tau) out << "  tau=" << format_double(fit.model.params.tau) << "\n";
    if (mass > 0.0) {
        const double t0 = 0.0;
        try {
            const ForceBreakdown force = force_of(fit.model, mass, t0);
            out << "  force(t=0, mass=" << format_double(mass)
                << ")=" << format_double(force.total) << " N\n";
        } catch (const Error&) {
        }
    }
    return out.str();
}

// --- generate ---------------------------------------------------------------

struct GenerateOptions {
    ScenarioFlags scenario;
    std::string out;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

int run_generate(const GenerateOptions& opt) {
    const ScenarioSpec spec = build_scenario(opt.scenario);
    Trajectory traj = generate(spec);
    if (opt.noise_sigma > 0.0) traj = add_noise(traj, NoiseSpec{opt.noise_sigma, opt.seed});

    auto kv = to_key_values(spec);
    kv["noise_sigma"] = format_double(opt.noise_sigma);
    kv["noise_seed"] = std::to_string(opt.seed);

    ordered_json manifest = manifest_skeleton("generate", opt.seed);
    manifest["scenario"] = kv_to_json(kv);
    manifest["inputs"] = ordered_json::array();
    manifest["outputs"] = ordered_json::array({opt.out});

    write_outputs({{opt.out, to_csv(traj)},
                   {opt.out + ".manifest.json", manifest.dump(2) + "\n"}});
    std::cout << "generate: wrote " << traj.sample_count() << " samples to " << opt.out << "\n";
    return 0;
}

// --- fit --------------------------------------------------------------------

struct FitOptions {
    std::string in;
    std::string out;
    std::optional<double> window;
    FitFlags fit;
    double mass = 0.0;  // 0 = no force report
};

int run_fit(const FitOptions& opt) {
    const Trajectory full = trajectory_from_csv(read_file(opt.in));
    Trajectory traj = full;
    if (opt.window) {
        if (!(*opt.window > 0.0)) throw ArgumentError("--window must be positive");
        const double cutoff = full.times.front() + *opt.window;
        std::size_t keep = 0;
        while (keep < full.times.size() && full.times[keep] < cutoff) ++keep;
        traj.times.assign(full.times.begin(), full.times.begin() + static_cast<long>(keep));
        for (std::size_t c = 0; c < traj.channels.size(); ++c)
            traj.channels[c].assign(full.channels[c].begin(),
                                    full.channels[c].begin() + static_cast<long>(keep));
    }
    if (traj.sample_count() < 4) throw ArgumentError("fit window contains too few samples");

    const Library library = library_from_flags(opt.fit);
    const FitConfig config = fit_config_from_flags(opt.fit);
    const FitResult result = fit_trajectory(traj, library, config);

    ModelDescriptor descriptor;
    descriptor.result = result;
    descriptor.t_start = traj.times.front();
    descriptor.t_end = opt.window ? traj.times.front() + *opt.window : traj.times.back();
    double dt = traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 1.0;
    descriptor.sample_rate = 1.0 / dt;
    descriptor.provenance = load_provenance(opt.in);

    ordered_json manifest = manifest_skeleton("fit", 0);
    ordered_json config_json;
    config_json["library"] = opt.fit.library;
    config_json["max_terms"] = opt.fit.max_terms;
    config_json["rmse_accept"] = opt.fit.rmse_accept;
    if (opt.window) config_json["window"] = *opt.window;
    manifest["config"] = std::move(config_json);
    manifest["inputs"] = ordered_json::array({opt.in});
    manifest["outputs"] = ordered_json::array({opt.out});

    write_outputs({{opt.out, to_json(descriptor)},
                   {opt.out + ".manifest.json", manifest.dump(2) + "\n"}});

    std::cout << "fit: " << opt.in << " [" << format_double(descriptor.t_start) << ", "
              << format_double(descriptor.t_end) << ") " << traj.sample_count()
              << " samples, library=" << opt.fit.library << "\n";
    for (std::size_t c = 0; c < result.channel_names.size(); ++c)
        std::cout << channel_report(result.channel_names[c], result.channels[c], opt.mass);
    return 0;
}

// --- predict ----------------------------------------------------------------

struct PredictOptions {
    std::string in;
    std::string out;
    double to = 0.0;
    std::optional<double> rate;
};

int run_predict(const PredictOptions& opt) {
    const ModelDescriptor descriptor = model_from_json(read_file(opt.in));
    const double t0 = descriptor.t_start;
    const double rate = opt.rate.value_or(descriptor.sample_rate);
    if (!(rate > 0.0)) throw ArgumentError("--rate must be positive");
    if (!(opt.to > t0)) throw ArgumentError("--to must lie beyond the fit window start");

    std::optional<ScenarioSpec> oracle;
    if (descriptor.provenance) oracle = scenario_from_key_values(*descriptor.provenance);
    if (oracle && scenario_channel_names(*oracle) != descriptor.result.channel_names)
        throw ArgumentError("provenance channels do not match the fitted model");

    const auto count = static_cast<std::size_t>(std::floor((opt.to - t0) * rate + 1e-9));
    std::string csv = "t";
    for (const auto& name : descriptor.result.channel_names) csv += ",pred_" + name;
    if (oracle)
        for (const auto& name : descriptor.result.channel_names)
            csv += ",oracle_" + name + ",abs_error_" + name;
    csv += '\n';

    for (std::size_t k = 0; k <= count; ++k) {
        const double t = t0 + static_cast<double>(k) / rate;
        csv += format_double(t);
        std::vector<double> predicted;
        for (const auto& channel : descriptor.result.channels) {
            predicted.push_back(channel.model.eval(t));
            csv += ',' + format_double(predicted.back());
        }
        if (oracle) {
            const auto truth = oracle_values(*oracle, t);
            for (std::size_t c = 0; c < truth.size(); ++c) {
                csv += ',' + format_double(truth[c]);
                csv += ',' + format_double(std::abs(predicted[c] - truth[c]));
            }
        }
        csv += '\n';
    }

    ordered_json manifest = manifest_skeleton("predict", 0);
    ordered_json config_json;
    config_json["to"] = opt.to;
    config_json["rate"] = rate;
    manifest["config"] = std::move(config_json);
    manifest["inputs"] = ordered_json::array({opt.in});
    manifest["outputs"] = ordered_json::array({opt.out});

    write_outputs({{opt.out, std::move(csv)},
                   {opt.out + ".manifest.json", manifest.dump(2) + "\n"}});
    std::cout << "predict: wrote " << (count + 1) << " rows to " << opt.out
              << (oracle ? " (with oracle columns)" : "") << "\n";
    return 0;
}

// --- track ------------------------------------------------------------------

struct TrackOptions {
    std::string in;
    std::string out;  // prefix
    int window = 100;
    double check_eps = 1e-4;
    int consecutive_k = 3;
    double mass = 1.0;
    FitFlags fit;
};

int run_track(const TrackOptions& opt) {
    const Trajectory traj = trajectory_from_csv(read_file(opt.in));

    TrackerConfig config;
    config.window = opt.window;
    config.check_eps = opt.check_eps;
    config.consecutive_k = opt.consecutive_k;
    config.mass = opt.mass;
    config.fit = fit_config_from_flags(opt.fit);
    config.library = library_from_flags(opt.fit);
    Tracker tracker(config, traj.channel_names);

    std::string pred_csv = "t";
    for (const auto& name : traj.channel_names) pred_csv += ",obs_" + name;
    for (const auto& name : traj.channel_names) pred_csv += ",pred_" + name;
    pred_csv += '\n';

    std::vector<double> row(traj.channel_count());
    for (std::size_t i = 0; i < traj.sample_count(); ++i) {
        for (std::size_t c = 0; c < traj.channel_count(); ++c) row[c] = traj.channels[c][i];
        const bool was_locked = tracker.state().phase == TrackPhase::Locked;
        std::vector<double> predicted;
        if (was_locked) predicted = tracker.predict_at(traj.times[i]);
        tracker.observe(traj.times[i], row);

        pred_csv += format_double(traj.times[i]);
        for (double v : row) pred_csv += ',' + format_double(v);
        for (std::size_t c = 0; c < traj.channel_count(); ++c)
            pred_csv += was_locked ? ',' + format_double(predicted[c]) : std::string(",");
        pred_csv += '\n';
    }

    const auto& log = tracker.state().event_log;
    long locks = 0, refits = 0, checks = 0;
    for (const auto& e : log) {
        locks += e.kind == TrackEventKind::LockAcquired;
        refits += e.kind == TrackEventKind::RefitTriggered;
        checks += e.kind == TrackEventKind::Checked;
    }

    ordered_json manifest = manifest_skeleton("track", 0);
    ordered_json config_json;
    config_json["window"] = opt.window;
    config_json["check_eps"] = opt.check_eps;
    config_json["consecutive_k"] = opt.consecutive_k;
    config_json["mass"] = opt.mass;
    config_json["library"] = opt.fit.library;
    config_json["max_terms"] = opt.fit.max_terms;
    config_json["rmse_accept"] = opt.fit.rmse_accept;
    manifest["config"] = std::move(config_json);
    manifest["inputs"] = ordered_json::array({opt.in});
    manifest["outputs"] =
        ordered_json::array({opt.out + ".events.jsonl", opt.out + ".predictions.csv"});

    write_outputs({{opt.out + ".events.jsonl", event_log_to_jsonl(log)},
                   {opt.out + ".predictions.csv", std::move(pred_csv)},
                   {opt.out + ".manifest.json", manifest.dump(2) + "\n"}});
    std::cout << "track: " << traj.sample_count() << " samples -> " << locks << " locks, "
              << refits << " refits, " << checks << " checks\n";
    return 0;
}

// --- bench ------------------------------------------------------------------

struct BenchOptions {
    ScenarioFlags scenario;
    std::string out;
    double horizon = 10.0;
    double window = 10.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    FitFlags fit;
};

struct MethodErrors {
    std::string method;
    double abs_error_at_horizon = 0.0;
    double rmse_prediction_span = 0.0;
};

int run_bench(const BenchOptions& opt) {
    if (opt.scenario.scenario == "piecewise")
        throw ArgumentError("bench supports single-regime scenarios only");
    if (!(opt.horizon > 0.0) || !(opt.window > 0.0))
        throw ArgumentError("bench requires positive --window and --horizon");

    ScenarioFlags flags = opt.scenario;
    flags.duration = opt.window + opt.horizon;
    const ScenarioSpec spec = build_scenario(flags);

    Trajectory traj = generate(spec);
    if (opt.noise_sigma > 0.0) traj = add_noise(traj, NoiseSpec{opt.noise_sigma, opt.seed});

    // Fit window [0, window), prediction span [window, window + horizon).
    Trajectory window_traj = traj;
    std::size_t keep = 0;
    while (keep < traj.times.size() && traj.times[keep] < opt.window) ++keep;
    window_traj.times.assign(traj.times.begin(), traj.times.begin() + static_cast<long>(keep));
    for (std::size_t c = 0; c < traj.channels.size(); ++c)
        window_traj.channels[c].assign(traj.channels[c].begin(),
                                       traj.channels[c].begin() + static_cast<long>(keep));

    const double t_star = opt.window + opt.horizon;
    std::vector<double> span_times(traj.times.begin() + static_cast<long>(keep),
                                   traj.times.end());

    const FitConfig config = fit_config_from_flags(opt.fit);
    const FitResult full_fit = fit_trajectory(window_traj, Library::full(), config);
    const FitResult poly_fit = fit_trajectory(window_traj, Library::polynomial_only(), config);

    // Naive linear extrapolation baseline: least-squares line on the window.
    const auto line_fit = [&](std::span<const double> values) {
        Matrix design(window_traj.times.size(), 2);
        for (std::size_t i = 0; i < window_traj.times.size(); ++i) {
            design(i, 0) = 1.0;
            design(i, 1) = window_traj.times[i];
        }
        const auto sol = solve_linear(design, values);
        return std::pair<double, double>(sol.coefficients[0], sol.coefficients[1]);
    };

    std::string csv = "channel,method,abs_error_at_horizon,rmse_prediction_span\n";
    for (std::size_t c = 0; c < traj.channel_count(); ++c) {
        const auto oracle_at = [&](double t) { return oracle_values(spec, t)[c]; };
        const auto errors_for = [&](auto&& predict, const std::string& method) {
            MethodErrors e;
            e.method = method;
            e.abs_error_at_horizon = std::abs(predict(t_star) - oracle_at(t_star));
            double ss = 0.0;
            for (std::size_t i = 0; i < span_times.size(); ++i) {
                const double diff = predict(span_times[i]) - traj.channels[c][keep + i];
                ss += diff * diff;
            }
            e.rmse_prediction_span =
                span_times.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(span_times.size()));
            return e;
        };

        const auto [intercept, slope] = line_fit(window_traj.channels[c]);
        const std::vector<MethodErrors> rows = {
            errors_for([&](double t) { return full_fit.channels[c].model.eval(t); }, "full"),
            errors_for([&](double t) { return poly_fit.channels[c].model.eval(t); }, "poly"),
            errors_for([&](double t) { return intercept + slope * t; }, "linear_baseline"),
        };
        for (const MethodErrors& row : rows)
            csv += traj.channel_names[c] + ',' + row.method + ',' +
                   format_double(row.abs_error_at_horizon) + ',' +
                   format_double(row.rmse_prediction_span) + '\n';
    }

    auto kv = to_key_values(spec);
    kv["noise_sigma"] = format_double(opt.noise_sigma);
    kv["noise_seed"] = std::to_string(opt.seed);
    ordered_json manifest = manifest_skeleton("bench", opt.seed);
    manifest["scenario"] = kv_to_json(kv);
    ordered_json config_json;
    config_json["horizon"] = opt.horizon;
    config_json["window"] = opt.window;
    config_json["max_terms"] = opt.fit.max_terms;
    config_json["rmse_accept"] = opt.fit.rmse_accept;
    manifest["config"] = std::move(config_json);
    manifest["inputs"] = ordered_json::array();
    manifest["outputs"] = ordered_json::array({opt.out});

    write_outputs({{opt.out, std::move(csv)},
                   {opt.out + ".manifest.json", manifest.dump(2) + "\n"}});
    std::cout << "bench: wrote method comparison to " << opt.out << "\n";
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Newton Scheme: force-pattern identification, closed-form trajectory "
                 "prediction, and mismatch-triggered tracking"};
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* gen_cmd = app.add_subcommand("generate", "generate a scenario trajectory CSV");
    register_scenario_flags(gen_cmd, gen.scenario, true);
    gen_cmd->add_option("--out", gen.out, "output CSV path")->required();
    gen_cmd->add_option("--noise-sigma", gen.noise_sigma, "additive Gaussian noise sigma");
    gen_cmd->add_option("--seed", gen.seed, "noise seed");

    FitOptions fit;
    auto* fit_cmd = app.add_subcommand("fit", "identify the force pattern of a trajectory");
    fit_cmd->add_option("--in", fit.in, "input trajectory CSV")->required();
    fit_cmd->add_option("--out", fit.out, "output model descriptor path")->required();
    fit_cmd->add_option("--window", fit.window, "fit window in seconds from the first sample");
    fit_cmd->add_option("--mass", fit.mass, "object mass in kg for the force report");
    register_fit_flags(fit_cmd, fit.fit);

    PredictOptions pred;
    auto* pred_cmd = app.add_subcommand("predict", "evaluate a fitted model over time");
    pred_cmd->add_option("--in", pred.in, "input model descriptor")->required();
    pred_cmd->add_option("--out", pred.out, "output prediction CSV")->required();
    pred_cmd->add_option("--to", pred.to, "prediction end time (inclusive)")->required();
    pred_cmd->add_option("--rate", pred.rate, "prediction sample rate (default: fit rate)");

    TrackOptions track;
    auto* track_cmd = app.add_subcommand("track", "stream a trajectory through the tracker");
    track_cmd->add_option("--in", track.in, "input trajectory CSV")->required();
    track_cmd->add_option("--out", track.out, "output path prefix")->required();
    track_cmd->add_option("--window", track.window, "collection window in samples");
    track_cmd->add_option("--check-eps", track.check_eps, "mismatch threshold relative to data scale");
    track_cmd->add_option("--consecutive-k", track.consecutive_k, "consecutive misses before refit");
    track_cmd->add_option("--mass", track.mass, "object mass in kg");
    register_fit_flags(track_cmd, track.fit);

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "compare full/poly libraries and a linear baseline");
    register_scenario_flags(bench_cmd, bench.scenario, true);
    bench_cmd->add_option("--out", bench.out, "output table CSV")->required();
    bench_cmd->add_option("--horizon", bench.horizon, "prediction horizon past the fit window");
    bench_cmd->add_option("--window", bench.window, "fit window in seconds");
    bench_cmd->add_option("--noise-sigma", bench.noise_sigma, "additive Gaussian noise sigma");
    bench_cmd->add_option("--seed", bench.seed, "noise seed");
    register_fit_flags(bench_cmd, bench.fit);

    std::vector<const char*> argv;
    argv.push_back("ns");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, returns 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen_cmd) return run_generate(gen);
        if (*fit_cmd) return run_fit(fit);
        if (*pred_cmd) return run_predict(pred);
        if (*track_cmd) return run_track(track);
        if (*bench_cmd) return run_bench(bench);
        std::cerr << "error: no command given\n";
        return 2;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ns::cli
