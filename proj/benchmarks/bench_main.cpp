#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ns/basis.hpp"
#include "ns/fit.hpp"
#include "ns/scenario.hpp"
#include "ns/track.hpp"

namespace {

const ns::Factor kCos{ns::PrimitiveKind::Harmonic, ns::HarmonicPart::Cos};
const ns::Factor kSin{ns::PrimitiveKind::Harmonic, ns::HarmonicPart::Sin};
const ns::Factor kDecay{ns::PrimitiveKind::ExpDecay};

ns::Trajectory pendulum_trajectory(double t_end, double rate) {
    ns::ScenarioSpec spec;
    spec.params = ns::DampedPendulumSpec{1.0, 0.1, 2.0 * M_PI, M_PI / 6.0};
    spec.t_end = t_end;
    spec.sample_rate = rate;
    return ns::gen_damped_pendulum(spec);
}

void BM_EvalCompositeTerm(benchmark::State& state) {
    const ns::BasisTerm term{kDecay, kCos};
    ns::ParamRecord params;
    params.gamma = 0.1;
    params.omega = 2.0 * M_PI;
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ns::eval_term(term, params, t));
        t += 1e-3;
    }
}
BENCHMARK(BM_EvalCompositeTerm);

void BM_DesignMatrix(benchmark::State& state) {
    const std::vector<ns::BasisTerm> subset = {ns::BasisTerm{kDecay, kCos},
                                               ns::BasisTerm{kDecay, kSin}};
    ns::ParamRecord params;
    params.gamma = 0.1;
    params.omega = 2.0 * M_PI;
    std::vector<double> times(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = 0.01 * double(i);
    for (auto _ : state)
        benchmark::DoNotOptimize(ns::build_design_matrix(subset, params, times));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DesignMatrix)->Range(128, 4096)->Complexity();

void BM_SolveLinear(benchmark::State& state) {
    const std::size_t m = static_cast<std::size_t>(state.range(0));
    ns::Matrix design(m, 3);
    std::vector<double> obs(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = 0.01 * double(i);
        design(i, 0) = 1.0;
        design(i, 1) = t;
        design(i, 2) = t * t;
        obs[i] = 10.0 - 4.9 * t * t;
    }
    for (auto _ : state) benchmark::DoNotOptimize(ns::solve_linear(design, obs));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveLinear)->Range(128, 4096)->Complexity();

void BM_RefineNonlinear(benchmark::State& state) {
    const ns::Trajectory traj = pendulum_trajectory(10.0, 100.0);
    const std::vector<ns::BasisTerm> subset = {ns::BasisTerm{kDecay, kCos},
                                               ns::BasisTerm{kDecay, kSin}};
    ns::ParamRecord start;
    start.gamma = 0.11;
    start.omega = 2.0 * M_PI * 1.05;
    const ns::FitConfig config;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            ns::refine_nonlinear(subset, start, traj.times, traj.channels[0], config));
}
BENCHMARK(BM_RefineNonlinear)->Unit(benchmark::kMillisecond);

void BM_SelectModel_FreeFall(benchmark::State& state) {
    ns::ScenarioSpec spec;
    spec.params = ns::FreeFallSpec{10.0, 0.0, -9.8};
    spec.t_end = 10.0;
    spec.sample_rate = 100.0;
    const ns::Trajectory traj = ns::gen_free_fall(spec);
    const ns::FitConfig config;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            ns::select_model(traj.times, traj.channels[0], ns::Library::full(), config));
}
BENCHMARK(BM_SelectModel_FreeFall)->Unit(benchmark::kMillisecond);

void BM_SelectModel_Pendulum(benchmark::State& state) {
    const ns::Trajectory traj = pendulum_trajectory(10.0, 100.0);
    const ns::FitConfig config;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            ns::select_model(traj.times, traj.channels[0], ns::Library::full(), config));
}
BENCHMARK(BM_SelectModel_Pendulum)->Unit(benchmark::kMillisecond)->MinTime(2.0);

void BM_TrackerCheckStep(benchmark::State& state) {
    // Per-sample cost of the checking loop once a model is locked.
    const ns::Trajectory traj = pendulum_trajectory(2.0, 100.0);
    ns::TrackerConfig config;
    ns::Tracker tracker(config, traj.channel_names);
    std::vector<double> row(1);
    for (std::size_t i = 0; i < traj.sample_count(); ++i) {
        row[0] = traj.channels[0][i];
        tracker.observe(traj.times[i], row);
    }
    double t = traj.times.back();
    for (auto _ : state) {
        t += 0.01;
        row[0] = tracker.predict_at(t)[0];
        benchmark::DoNotOptimize(tracker.observe(t, row));
    }
}
BENCHMARK(BM_TrackerCheckStep);

}  // namespace

BENCHMARK_MAIN();
