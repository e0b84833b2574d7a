#include "ns/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ns/errors.hpp"

namespace ns {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ParamBounds {
    double omega_lo = 1e-9, omega_hi = 1e9;
    double gamma_lo = 0.0, gamma_hi = 1e9;
    double tau_lo = 1e-12, tau_hi = 1e12;
};

ParamBounds bounds_for(std::span<const double> times) {
    ParamBounds b;
    const double duration = times.back() - times.front();
    double min_dt = kInf;
    for (std::size_t i = 1; i < times.size(); ++i) min_dt = std::min(min_dt, times[i] - times[i - 1]);
    // Nyquist-style cap on frequency; decay and log scales tied to the window.
    b.omega_hi = 3.141592653589793 / min_dt;
    b.gamma_hi = 200.0 / duration;
    b.tau_lo = 1e-3 * duration;
    b.tau_hi = 1e3 * duration;
    return b;
}

// Which nonlinear families a subset activates, in canonical (omega, gamma,
// tau) order, with flat-vector packing for the descent.
struct ActiveFamilies {
    bool omega = false, gamma = false, tau = false;

    explicit ActiveFamilies(std::span<const BasisTerm> subset) {
        for (const auto& term : subset) {
            omega = omega || term.uses(PrimitiveKind::Harmonic);
            gamma = gamma || term.uses(PrimitiveKind::ExpDecay);
            tau = tau || term.uses(PrimitiveKind::LogShift);
        }
    }

    int dimension() const { return int(omega) + int(gamma) + int(tau); }

    std::vector<double> pack(const ParamRecord& p) const {
        std::vector<double> theta;
        if (omega) theta.push_back(p.omega);
        if (gamma) theta.push_back(p.gamma);
        if (tau) theta.push_back(p.tau);
        return theta;
    }

    ParamRecord unpack(std::span<const double> theta, const ParamRecord& defaults) const {
        ParamRecord p = defaults;
        std::size_t i = 0;
        if (omega) p.omega = theta[i++];
        if (gamma) p.gamma = theta[i++];
        if (tau) p.tau = theta[i++];
        return p;
    }

    void lower_upper(const ParamBounds& b, std::vector<double>& lo, std::vector<double>& hi) const {
        lo.clear();
        hi.clear();
        if (omega) {
            lo.push_back(b.omega_lo);
            hi.push_back(b.omega_hi);
        }
        if (gamma) {
            lo.push_back(b.gamma_lo);
            hi.push_back(b.gamma_hi);
        }
        if (tau) {
            lo.push_back(b.tau_lo);
            hi.push_back(b.tau_hi);
        }
    }
};

struct Projection {
    bool ok = false;
    std::vector<double> coefficients;
    std::vector<double> residual;
    double rmse = kInf;
    double condition = kInf;
};

// The variable-projection objective: eliminate the linear coefficients
// exactly, report the residual of the projected fit. Domain violations and
// degenerate designs make the point infeasible instead of throwing.
Projection project(std::span<const BasisTerm> subset, const ParamRecord& params,
                   std::span<const double> times, std::span<const double> values,
                   double condition_limit) {
    Projection out;
    try {
        const Matrix design = build_design_matrix(subset, params, times);
        LinearSolution sol = solve_linear(design, values, condition_limit);
        out.coefficients = std::move(sol.coefficients);
        out.condition = sol.condition_estimate;
        out.residual.resize(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            double fit = 0.0;
            for (std::size_t j = 0; j < subset.size(); ++j)
                fit += out.coefficients[j] * design(i, j);
            out.residual[i] = values[i] - fit;
        }
        double ss = 0.0;
        for (double r : out.residual) ss += r * r;
        out.rmse = std::sqrt(ss / static_cast<double>(values.size()));
        out.ok = true;
    } catch (const DomainError&) {
    } catch (const DegenerateDesignError&) {
    } catch (const ArgumentError&) {
    }
    return out;
}

std::vector<double> clamp_to(std::span<const double> theta, std::span<const double> lo,
                             std::span<const double> hi) {
    std::vector<double> out(theta.begin(), theta.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo[i], hi[i]);
    return out;
}

CandidateModel model_from(std::span<const BasisTerm> subset, const ParamRecord& params,
                          const Projection& projection) {
    CandidateModel model;
    model.terms.assign(subset.begin(), subset.end());
    model.params = params;
    model.coefficients = projection.coefficients;
    model.rmse = projection.rmse;
    model.condition_estimate = projection.condition;
    return model;
}

// Frequency guess: pi * (sign changes of the mean-removed signal) / duration.
double omega_guess(std::span<const double> times, std::span<const double> values) {
    const double duration = times.back() - times.front();
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());

    int crossings = 0;
    int prev_sign = 0;
    for (double v : values) {
        const double centered = v - mean;
        const int sign = centered > 0.0 ? 1 : (centered < 0.0 ? -1 : 0);
        if (sign != 0) {
            if (prev_sign != 0 && sign != prev_sign) ++crossings;
            prev_sign = sign;
        }
    }
    if (crossings < 1) return 3.141592653589793 / duration;
    return 3.141592653589793 * static_cast<double>(crossings) / duration;
}

// Decay guess: least-squares slope of log|peak| over the peak times.
double gamma_guess(std::span<const double> times, std::span<const double> values) {
    std::vector<double> peak_t, peak_logv;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double v = std::abs(values[i]);
        if (v >= std::abs(values[i - 1]) && v >= std::abs(values[i + 1]) && v > 1e-300) {
            peak_t.push_back(times[i]);
            peak_logv.push_back(std::log(v));
        }
    }
    if (peak_t.size() < 2) return 0.0;
    double mt = 0.0, mv = 0.0;
    for (std::size_t i = 0; i < peak_t.size(); ++i) {
        mt += peak_t[i];
        mv += peak_logv[i];
    }
    mt /= static_cast<double>(peak_t.size());
    mv /= static_cast<double>(peak_t.size());
    double cov = 0.0, var = 0.0;
    for (std::size_t i = 0; i < peak_t.size(); ++i) {
        cov += (peak_t[i] - mt) * (peak_logv[i] - mv);
        var += (peak_t[i] - mt) * (peak_t[i] - mt);
    }
    if (var == 0.0) return 0.0;
    return std::max(0.0, -cov / var);
}

}  // namespace

void FitConfig::validate() const {
    if (!(rmse_accept > 0.0)) throw ArgumentError("FitConfig: rmse_accept must be > 0");
    if (!(nonlinear_tol > 0.0)) throw ArgumentError("FitConfig: nonlinear_tol must be > 0");
    if (max_terms < 1) throw ArgumentError("FitConfig: max_terms must be >= 1");
    if (max_outer_iters < 1) throw ArgumentError("FitConfig: max_outer_iters must be >= 1");
    if (!(condition_limit > 1.0)) throw ArgumentError("FitConfig: condition_limit must be > 1");
    if (multistart.omega < 1 || multistart.gamma < 1 || multistart.tau < 1 ||
        multistart.max_starts < 1)
        throw ArgumentError("FitConfig: multistart grid sizes must be >= 1");
}

double CandidateModel::eval(double t) const {
    double out = 0.0;
    for (std::size_t j = 0; j < terms.size(); ++j)
        out += coefficients[j] * eval_term(terms[j], params, t);
    return out;
}

double CandidateModel::eval_derivative(double t, int order) const {
    double out = 0.0;
    for (std::size_t j = 0; j < terms.size(); ++j)
        out += coefficients[j] * ns::eval_derivative(terms[j], params, t, order);
    return out;
}

bool FitResult::accepted() const {
    if (channels.empty()) return false;
    return std::all_of(channels.begin(), channels.end(),
                       [](const ChannelFit& c) { return c.accepted; });
}

const ChannelFit& FitResult::channel(std::string_view name) const {
    for (std::size_t c = 0; c < channel_names.size(); ++c)
        if (channel_names[c] == name) return channels[c];
    throw ArgumentError("fit result has no channel named '" + std::string(name) + "'");
}

std::vector<ParamRecord> init_params(std::span<const BasisTerm> subset,
                                     std::span<const double> times,
                                     std::span<const double> values,
                                     const MultistartGrid& grid) {
    if (times.size() < 4) throw ArgumentError("init_params: at least 4 samples required");
    if (times.size() != values.size())
        throw ArgumentError("init_params: times and values lengths differ");

    const ActiveFamilies active(subset);
    const ParamRecord defaults{};
    if (active.dimension() == 0) return {defaults};

    const ParamBounds bounds = bounds_for(times);
    const double duration = times.back() - times.front();

    std::vector<double> omegas = {defaults.omega};
    if (active.omega) {
        const double w = omega_guess(times, values);
        static constexpr double kBrackets[] = {1.0, 0.8, 1.2, 0.6, 1.4, 0.4, 1.6, 0.2, 1.8};
        omegas.clear();
        for (double m : kBrackets) {
            if (static_cast<int>(omegas.size()) >= grid.omega) break;
            omegas.push_back(std::clamp(w * m, bounds.omega_lo, bounds.omega_hi));
        }
    }
    std::vector<double> gammas = {defaults.gamma};
    if (active.gamma) {
        const double g = gamma_guess(times, values);
        gammas.clear();
        std::vector<double> raw;
        if (g > 0.0)
            raw = {g, 0.5 * g, 2.0 * g, 0.0, 4.0 * g};
        else
            raw = {0.0, 1.0 / duration, 4.0 / duration, 0.25 / duration};
        for (double v : raw) {
            if (static_cast<int>(gammas.size()) >= grid.gamma) break;
            gammas.push_back(std::clamp(v, bounds.gamma_lo, bounds.gamma_hi));
        }
    }
    std::vector<double> taus = {defaults.tau};
    if (active.tau) {
        taus.clear();
        const double lo = 0.1 * duration;
        const double hi = 10.0 * duration;
        if (grid.tau == 1) {
            taus.push_back(std::sqrt(lo * hi));
        } else {
            for (int i = 0; i < grid.tau; ++i)
                taus.push_back(lo * std::pow(hi / lo, static_cast<double>(i) /
                                                          static_cast<double>(grid.tau - 1)));
        }
    }

    std::vector<ParamRecord> starts;
    for (double w : omegas)
        for (double g : gammas)
            for (double tau : taus) {
                if (static_cast<int>(starts.size()) >= grid.max_starts) return starts;
                ParamRecord p = defaults;
                p.omega = w;
                p.gamma = g;
                p.tau = tau;
                starts.push_back(p);
            }
    return starts;
}

CandidateModel refine_nonlinear(std::span<const BasisTerm> subset, const ParamRecord& start,
                                std::span<const double> times, std::span<const double> values,
                                const FitConfig& config) {
    config.validate();
    if (subset.empty()) throw ArgumentError("refine_nonlinear: empty term subset");
    if (times.size() != values.size() || times.empty())
        throw ArgumentError("refine_nonlinear: bad sample arrays");

    const ActiveFamilies active(subset);
    int evals = 0;
    const auto evaluate = [&](const ParamRecord& p) {
        ++evals;
        return project(subset, p, times, values, config.condition_limit);
    };

    // Nothing to optimize: a single projected solve is the whole fit.
    if (active.dimension() == 0) {
        const Projection proj = evaluate(start);
        CandidateModel model = model_from(subset, start, proj);
        model.converged = proj.ok;
        model.objective_evals = evals;
        return model;
    }

    const ParamBounds param_bounds = bounds_for(times);
    std::vector<double> lo, hi;
    active.lower_upper(param_bounds, lo, hi);

    std::vector<double> theta = clamp_to(active.pack(start), lo, hi);
    Projection best_proj = evaluate(active.unpack(theta, start));
    if (!best_proj.ok) {
        CandidateModel model = model_from(subset, active.unpack(theta, start), best_proj);
        model.converged = false;
        model.objective_evals = evals;
        return model;
    }

    std::vector<double> best_theta = theta;
    const int d = active.dimension();
    const std::size_t m = values.size();
    double lambda = 1e-3;
    bool converged = false;
    bool any_step_accepted = false;

    for (int iter = 0; iter < config.max_outer_iters; ++iter) {
        // Numeric Jacobian of the projected residual, central where bounds
        // allow, one-sided at a bound.
        Matrix jac(m, static_cast<std::size_t>(d));
        const Projection center = best_proj;
        bool jacobian_ok = true;
        for (int j = 0; j < d; ++j) {
            const double h = 1e-6 * std::max(1.0, std::abs(best_theta[static_cast<std::size_t>(j)]));
            double up = std::min(best_theta[static_cast<std::size_t>(j)] + h, hi[static_cast<std::size_t>(j)]);
            double dn = std::max(best_theta[static_cast<std::size_t>(j)] - h, lo[static_cast<std::size_t>(j)]);
            if (!(up > dn)) {
                jacobian_ok = false;
                break;
            }
            std::vector<double> tu = best_theta, td = best_theta;
            tu[static_cast<std::size_t>(j)] = up;
            td[static_cast<std::size_t>(j)] = dn;
            const Projection pu = evaluate(active.unpack(tu, start));
            const Projection pd = evaluate(active.unpack(td, start));
            if (!pu.ok || !pd.ok) {
                jacobian_ok = false;
                break;
            }
            const double denom = up - dn;
            for (std::size_t i = 0; i < m; ++i)
                jac(i, static_cast<std::size_t>(j)) = (pu.residual[i] - pd.residual[i]) / denom;
        }
        if (!jacobian_ok) break;

        // Marquardt column scaling.
        std::vector<double> col_scale(static_cast<std::size_t>(d), 0.0);
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i)
                s += jac(i, static_cast<std::size_t>(j)) * jac(i, static_cast<std::size_t>(j));
            col_scale[static_cast<std::size_t>(j)] = std::max(std::sqrt(s), 1e-12);
        }

        bool improved = false;
        for (int attempt = 0; attempt < 10 && !improved; ++attempt) {
            // Damped least-squares step: [J; sqrt(lambda) D] delta = [-r; 0].
            Matrix aug(m + static_cast<std::size_t>(d), static_cast<std::size_t>(d));
            std::vector<double> rhs(m + static_cast<std::size_t>(d), 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                for (int j = 0; j < d; ++j) aug(i, static_cast<std::size_t>(j)) = jac(i, static_cast<std::size_t>(j));
                rhs[i] = -center.residual[i];
            }
            for (int j = 0; j < d; ++j)
                aug(m + static_cast<std::size_t>(j), static_cast<std::size_t>(j)) =
                    std::sqrt(lambda) * col_scale[static_cast<std::size_t>(j)];

            std::vector<double> delta;
            try {
                delta = solve_linear(aug, rhs, 1e15).coefficients;
            } catch (const DegenerateDesignError&) {
                lambda *= 10.0;
                continue;
            }

            std::vector<double> trial = best_theta;
            for (int j = 0; j < d; ++j) trial[static_cast<std::size_t>(j)] += delta[static_cast<std::size_t>(j)];
            trial = clamp_to(trial, lo, hi);

            const Projection proj = evaluate(active.unpack(trial, start));
            if (proj.ok && proj.rmse < best_proj.rmse) {
                const double drop = best_proj.rmse - proj.rmse;
                best_theta = trial;
                best_proj = proj;
                lambda = std::max(lambda / 3.0, 1e-12);
                improved = true;
                any_step_accepted = true;
                if (drop <= config.nonlinear_tol * std::max(best_proj.rmse, 1e-300))
                    converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) {
            // Stalled: no step improves from here. Counts as converged only
            // if some earlier step did improve; otherwise the start is
            // returned flagged not-converged.
            converged = any_step_accepted;
            break;
        }
        if (converged) break;
    }

    CandidateModel model = model_from(subset, active.unpack(best_theta, start), best_proj);
    model.converged = converged;
    model.objective_evals = evals;
    return model;
}

ChannelFit select_model(std::span<const double> times, std::span<const double> values,
                        const Library& library, const FitConfig& config) {
    config.validate();
    const int max_terms = std::min<int>(config.max_terms, static_cast<int>(library.size()));
    const std::size_t min_samples = std::max<std::size_t>(2 * static_cast<std::size_t>(max_terms), 4);
    if (times.size() != values.size())
        throw ArgumentError("select_model: times and values lengths differ");
    if (times.size() < min_samples)
        throw ArgumentError("select_model: insufficient samples for the requested model size");

    double data_scale = 1.0;
    for (double v : values) data_scale = std::max(data_scale, std::abs(v));
    const double threshold = config.rmse_accept * data_scale;

    const auto subsets = enumerate_candidates(library, max_terms);

    ChannelFit best;
    best.model.rmse = kInf;
    best.data_scale = data_scale;
    bool have_best = false;
    long evaluated = 0;

    ChannelFit first_accepted;
    bool have_accepted = false;

    std::vector<BasisTerm> terms;
    for (const TermSubset& subset : subsets) {
        terms.clear();
        for (std::size_t idx : subset) terms.push_back(library[idx]);

        CandidateModel subset_best;
        subset_best.rmse = kInf;
        for (const ParamRecord& start : init_params(terms, times, values, config.multistart)) {
            CandidateModel refined = refine_nonlinear(terms, start, times, values, config);
            if (refined.rmse < subset_best.rmse) subset_best = std::move(refined);
        }
        ++evaluated;
        if (!std::isfinite(subset_best.rmse)) continue;

        const auto better_than = [](const CandidateModel& a, const CandidateModel& b) {
            if (a.rmse != b.rmse) return a.rmse < b.rmse;
            if (a.terms.size() != b.terms.size()) return a.terms.size() < b.terms.size();
            int na = 0, nb = 0;
            for (const auto& t : a.terms) na += t.nonlinear_param_count();
            for (const auto& t : b.terms) nb += t.nonlinear_param_count();
            return na < nb;  // final tie-break: enumeration order (keep first)
        };
        if (!have_best || better_than(subset_best, best.model)) {
            best.model = subset_best;
            have_best = true;
        }

        if (!have_accepted && subset_best.rmse <= threshold) {
            first_accepted.model = subset_best;
            first_accepted.data_scale = data_scale;
            first_accepted.accepted = true;
            have_accepted = true;
            if (!config.exhaustive) {
                first_accepted.candidates_evaluated = evaluated;
                return first_accepted;
            }
        }
    }

    if (have_accepted) {
        first_accepted.candidates_evaluated = evaluated;
        return first_accepted;
    }
    best.accepted = false;
    best.candidates_evaluated = evaluated;
    return best;
}

FitResult fit_trajectory(const Trajectory& trajectory, const Library& library,
                         const FitConfig& config) {
    trajectory.validate();
    FitResult result;
    result.channel_names = trajectory.channel_names;
    result.channels.reserve(trajectory.channel_count());
    for (std::size_t c = 0; c < trajectory.channel_count(); ++c)
        result.channels.push_back(
            select_model(trajectory.times, trajectory.channels[c], library, config));
    return result;
}

ForceBreakdown force_of(const CandidateModel& model, double mass_kg, double t) {
    if (!(mass_kg > 0.0)) throw ArgumentError("force_of requires mass > 0");
    ForceBreakdown out;
    out.per_term.reserve(model.terms.size());
    for (std::size_t j = 0; j < model.terms.size(); ++j) {
        const double f =
            mass_kg * model.coefficients[j] * eval_derivative(model.terms[j], model.params, t, 2);
        out.per_term.push_back(f);
        out.total += f;
    }
    return out;
}

}  // namespace ns
