#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ns/basis.hpp"
#include "ns/linalg.hpp"
#include "ns/trajectory.hpp"

namespace ns {

/// Multistart grid sizes per nonlinear family; the cross product over the
/// families present in a subset is capped at max_starts.
struct MultistartGrid {
    int omega = 3;
    int gamma = 3;
    int tau = 4;
    int max_starts = 12;
};

struct FitConfig {
    double rmse_accept = 1e-8;    // relative to data_scale
    double nonlinear_tol = 1e-8;  // relative residual change convergence test
    int max_terms = 3;
    MultistartGrid multistart{};
    int max_outer_iters = 200;
    double condition_limit = 1e8;
    bool exhaustive = false;  // evaluate every candidate instead of stopping at
                              // the first acceptance (selection is unchanged)

    void validate() const;
};

/// One fitted candidate: a term subset, the shared nonlinear parameters, and
/// the linear coefficients (one per design column, i.e. per term).
struct CandidateModel {
    std::vector<BasisTerm> terms;
    ParamRecord params;
    std::vector<double> coefficients;
    double rmse = 0.0;
    double condition_estimate = 1.0;
    bool converged = true;
    int objective_evals = 0;  // projected least-squares solves performed

    double eval(double t) const;
    double eval_derivative(double t, int order) const;
};

/// Per-channel model selection outcome.
struct ChannelFit {
    CandidateModel model;
    double data_scale = 1.0;  // max(1, max|obs|) over the fit window
    long candidates_evaluated = 0;
    bool accepted = false;
};

struct FitResult {
    std::vector<std::string> channel_names;
    std::vector<ChannelFit> channels;

    bool accepted() const;
    const ChannelFit& channel(std::string_view name) const;
};

/// Multistart starting points for the nonlinear families used by the subset:
/// omega from the zero-crossing count of the mean-removed signal (pi *
/// crossings / duration) with a +/-20% bracket, gamma from the slope of the
/// log peak envelope with a x0.5/x2 bracket, tau from a log grid over
/// [0.1*duration, 10*duration]. Requires >= 4 samples. A subset without
/// nonlinear families yields a single default record.
std::vector<ParamRecord> init_params(std::span<const BasisTerm> subset,
                                     std::span<const double> times,
                                     std::span<const double> values,
                                     const MultistartGrid& grid = {});

/// Variable-projection refinement: minimizes the rmse of
/// solve_linear(build_design_matrix(subset, params, times), values) over the
/// nonlinear parameters, by damped least-squares descent with numeric
/// central-difference Jacobians (step 1e-6*max(1,|theta|)). Domain violations
/// during the search retreat instead of throwing. The returned model's rmse
/// never exceeds the start's; a start that cannot be evaluated yields a
/// non-converged model with infinite rmse.
CandidateModel refine_nonlinear(std::span<const BasisTerm> subset, const ParamRecord& start,
                                std::span<const double> times, std::span<const double> values,
                                const FitConfig& config);

/// Model selection over the ranked candidate enumeration: accepts the first
/// candidate whose best-of-multistarts rmse is <= rmse_accept * data_scale;
/// if none accepts, returns the global minimum-rmse candidate (ties broken by
/// fewer terms, fewer nonlinear parameters, enumeration order) with
/// accepted = false.
ChannelFit select_model(std::span<const double> times, std::span<const double> values,
                        const Library& library, const FitConfig& config);

/// select_model applied to every channel of a trajectory.
FitResult fit_trajectory(const Trajectory& trajectory, const Library& library,
                         const FitConfig& config);

struct ForceBreakdown {
    double total = 0.0;               // newtons
    std::vector<double> per_term;     // sums to total
};

/// Instantaneous force mass * x''(t) implied by a model, with the per-term
/// decomposition. Throws ArgumentError for non-positive mass.
ForceBreakdown force_of(const CandidateModel& model, double mass_kg, double t);

}  // namespace ns
