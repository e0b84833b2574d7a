#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ns/linalg.hpp"

namespace ns {

/// Primitive time bases. Constant/Linear/Quadratic carry no inner parameter;
/// Harmonic reads omega, ExpDecay reads gamma, LogShift reads tau from the
/// shared ParamRecord of the model being evaluated.
enum class PrimitiveKind { Constant, Linear, Quadratic, Harmonic, ExpDecay, LogShift };

/// Which component of the harmonic pair a factor evaluates. Phase is never a
/// nonlinear parameter: cos(w*t - phi) is fit as A*cos(w*t) + B*sin(w*t) with
/// linear (A, B), and (amplitude, phase) are derived afterwards.
enum class HarmonicPart { Cos, Sin };

struct Factor {
    PrimitiveKind kind = PrimitiveKind::Constant;
    HarmonicPart part = HarmonicPart::Cos;  // meaningful only for Harmonic
};

/// Nonlinear inner parameters, shared across all terms of a candidate model:
/// one omega for every harmonic factor, one gamma for every decay factor, one
/// tau for every log factor. Unused entries keep their defaults.
struct ParamRecord {
    double omega = 1.0;  // rad/s, > 0 where used
    double gamma = 0.0;  // 1/s, >= 0 where used
    double tau = 1.0;    // s, > 0 where used
};

/// A product of one or two primitive time bases; one column of the design
/// matrix. At most one factor per nonlinear family (no ExpDecay*ExpDecay).
class BasisTerm {
public:
    explicit BasisTerm(std::vector<Factor> factors);
    BasisTerm(std::initializer_list<Factor> factors)
        : BasisTerm(std::vector<Factor>(factors)) {}

    const std::vector<Factor>& factors() const { return factors_; }

    /// rank = 10*(factor count) + 5*(nonlinear parameter count) + polynomial
    /// degree. Lower ranks are tried first by the candidate enumeration.
    int complexity_rank() const { return rank_; }

    int nonlinear_param_count() const;
    bool uses(PrimitiveKind kind) const;

    /// Canonical name, e.g. "exp_decay*harmonic_cos". Stable; used by the
    /// model descriptor format.
    std::string name() const;

    bool operator==(const BasisTerm& other) const;

private:
    std::vector<Factor> factors_;
    int rank_ = 0;
};

enum class LibraryMode { Full, PolynomialOnly };

/// Ordered candidate term library. Terms are sorted ascending by
/// complexity_rank (ties keep canonical listing order); the ordering is the
/// priority ranking used to prune the subset search and is deterministic.
class Library {
public:
    /// The canonical 10-term library: constant, linear, quadratic,
    /// harmonic cos/sin, exponential decay, shifted log, decaying
    /// oscillation cos/sin, and the linear-envelope resonance product.
    static Library full();

    /// Polynomial-restricted library {1, t, t^2, t^3, t^4}: the degree-limited
    /// candidate set used as the comparison baseline.
    static Library polynomial_only();

    LibraryMode mode() const { return mode_; }
    const std::vector<BasisTerm>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    const BasisTerm& operator[](std::size_t i) const { return terms_[i]; }

private:
    Library(LibraryMode mode, std::vector<BasisTerm> terms);

    LibraryMode mode_;
    std::vector<BasisTerm> terms_;
};

/// Value of a term at time t: the product of its factor values.
/// Throws DomainError if t is outside a factor's domain (t/tau + 1 <= 0) and
/// ArgumentError if a used parameter violates its bounds.
double eval_term(const BasisTerm& term, const ParamRecord& params, double t);

/// Analytic first or second time derivative (order 1 or 2) via the product
/// rule over factors. No numerical differentiation.
double eval_derivative(const BasisTerm& term, const ParamRecord& params, double t, int order);

/// Design matrix: rows = times, one column per term, evaluated with the
/// shared parameter record. Column order follows the subset order.
/// Times must be strictly increasing and in-domain for every term.
Matrix build_design_matrix(std::span<const BasisTerm> subset, const ParamRecord& params,
                           std::span<const double> times);

/// Indices into a library's term list.
using TermSubset = std::vector<std::size_t>;

/// All non-empty subsets of at most max_terms terms, ordered by (subset size
/// ascending, sum of complexity_rank ascending, lexicographic library order).
/// Deterministic and exhaustive: size sums to C(n,1)+...+C(n,max_terms).
std::vector<TermSubset> enumerate_candidates(const Library& library, int max_terms);

struct AmplitudePhase {
    double amplitude = 0.0;
    double phase = 0.0;  // radians in (-pi, pi]
};

/// Recover (amplitude, phase) from the linear coefficients (A, B) of a
/// cos/sin pair: A = a*cos(phi), B = a*sin(phi).
AmplitudePhase amplitude_phase(double cos_coeff, double sin_coeff);

}  // namespace ns
