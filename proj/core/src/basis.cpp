#include "ns/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ns/errors.hpp"

namespace ns {

namespace {

bool is_nonlinear(PrimitiveKind kind) {
    return kind == PrimitiveKind::Harmonic || kind == PrimitiveKind::ExpDecay ||
           kind == PrimitiveKind::LogShift;
}

int polynomial_degree(PrimitiveKind kind) {
    switch (kind) {
        case PrimitiveKind::Linear: return 1;
        case PrimitiveKind::Quadratic: return 2;
        default: return 0;
    }
}

struct FactorDerivatives {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

void check_params(const Factor& factor, const ParamRecord& params) {
    switch (factor.kind) {
        case PrimitiveKind::Harmonic:
            if (!(params.omega > 0.0)) throw ArgumentError("harmonic factor requires omega > 0");
            break;
        case PrimitiveKind::ExpDecay:
            if (!(params.gamma >= 0.0)) throw ArgumentError("decay factor requires gamma >= 0");
            break;
        case PrimitiveKind::LogShift:
            if (!(params.tau > 0.0)) throw ArgumentError("log factor requires tau > 0");
            break;
        default: break;
    }
}

FactorDerivatives eval_factor(const Factor& factor, const ParamRecord& params, double t) {
    check_params(factor, params);
    FactorDerivatives f;
    switch (factor.kind) {
        case PrimitiveKind::Constant:
            f.value = 1.0;
            break;
        case PrimitiveKind::Linear:
            f.value = t;
            f.d1 = 1.0;
            break;
        case PrimitiveKind::Quadratic:
            f.value = t * t;
            f.d1 = 2.0 * t;
            f.d2 = 2.0;
            break;
        case PrimitiveKind::Harmonic: {
            const double w = params.omega;
            const double c = std::cos(w * t);
            const double s = std::sin(w * t);
            if (factor.part == HarmonicPart::Cos) {
                f.value = c;
                f.d1 = -w * s;
                f.d2 = -w * w * c;
            } else {
                f.value = s;
                f.d1 = w * c;
                f.d2 = -w * w * s;
            }
            break;
        }
        case PrimitiveKind::ExpDecay: {
            const double g = params.gamma;
            const double e = std::exp(-g * t);
            f.value = e;
            f.d1 = -g * e;
            f.d2 = g * g * e;
            break;
        }
        case PrimitiveKind::LogShift: {
            const double shifted = t / params.tau + 1.0;
            if (!(shifted > 0.0))
                throw DomainError("log factor evaluated outside its domain (t/tau + 1 <= 0)");
            const double denom = t + params.tau;
            f.value = std::log(shifted);
            f.d1 = 1.0 / denom;
            f.d2 = -1.0 / (denom * denom);
            break;
        }
    }
    return f;
}

}  // namespace

BasisTerm::BasisTerm(std::vector<Factor> factors) : factors_(std::move(factors)) {
    if (factors_.empty() || factors_.size() > 2)
        throw ArgumentError("a basis term has one or two factors");
    if (factors_.size() == 2) {
        const PrimitiveKind a = factors_[0].kind;
        const PrimitiveKind b = factors_[1].kind;
        if (is_nonlinear(a) && a == b)
            throw ArgumentError("at most one factor per nonlinear family in a term");
    }
    int nonlinear = nonlinear_param_count();
    int degree = 0;
    for (const Factor& f : factors_) degree += polynomial_degree(f.kind);
    rank_ = 10 * static_cast<int>(factors_.size()) + 5 * nonlinear + degree;
}

int BasisTerm::nonlinear_param_count() const {
    int count = 0;
    for (const Factor& f : factors_)
        if (is_nonlinear(f.kind)) ++count;
    return count;
}

bool BasisTerm::uses(PrimitiveKind kind) const {
    return std::any_of(factors_.begin(), factors_.end(),
                       [kind](const Factor& f) { return f.kind == kind; });
}

std::string BasisTerm::name() const {
    std::string out;
    for (const Factor& f : factors_) {
        if (!out.empty()) out += '*';
        switch (f.kind) {
            case PrimitiveKind::Constant: out += "constant"; break;
            case PrimitiveKind::Linear: out += "linear"; break;
            case PrimitiveKind::Quadratic: out += "quadratic"; break;
            case PrimitiveKind::Harmonic:
                out += f.part == HarmonicPart::Cos ? "harmonic_cos" : "harmonic_sin";
                break;
            case PrimitiveKind::ExpDecay: out += "exp_decay"; break;
            case PrimitiveKind::LogShift: out += "log_shift"; break;
        }
    }
    return out;
}

bool BasisTerm::operator==(const BasisTerm& other) const {
    if (factors_.size() != other.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (factors_[i].kind != other.factors_[i].kind) return false;
        if (factors_[i].kind == PrimitiveKind::Harmonic &&
            factors_[i].part != other.factors_[i].part)
            return false;
    }
    return true;
}

Library::Library(LibraryMode mode, std::vector<BasisTerm> terms)
    : mode_(mode), terms_(std::move(terms)) {
    std::stable_sort(terms_.begin(), terms_.end(), [](const BasisTerm& a, const BasisTerm& b) {
        return a.complexity_rank() < b.complexity_rank();
    });
}

Library Library::full() {
    const Factor constant{PrimitiveKind::Constant};
    const Factor linear{PrimitiveKind::Linear};
    const Factor quadratic{PrimitiveKind::Quadratic};
    const Factor cos{PrimitiveKind::Harmonic, HarmonicPart::Cos};
    const Factor sin{PrimitiveKind::Harmonic, HarmonicPart::Sin};
    const Factor decay{PrimitiveKind::ExpDecay};
    const Factor logshift{PrimitiveKind::LogShift};
    std::vector<BasisTerm> terms;
    terms.push_back(BasisTerm{constant});
    terms.push_back(BasisTerm{linear});
    terms.push_back(BasisTerm{quadratic});
    terms.push_back(BasisTerm{cos});
    terms.push_back(BasisTerm{sin});
    terms.push_back(BasisTerm{decay});
    terms.push_back(BasisTerm{logshift});
    terms.push_back(BasisTerm{decay, cos});
    terms.push_back(BasisTerm{decay, sin});
    terms.push_back(BasisTerm{linear, cos});
    return Library(LibraryMode::Full, std::move(terms));
}

Library Library::polynomial_only() {
    const Factor linear{PrimitiveKind::Linear};
    const Factor quadratic{PrimitiveKind::Quadratic};
    std::vector<BasisTerm> terms;
    terms.push_back(BasisTerm{Factor{PrimitiveKind::Constant}});
    terms.push_back(BasisTerm{linear});
    terms.push_back(BasisTerm{quadratic});
    terms.push_back(BasisTerm{linear, quadratic});      // t^3
    terms.push_back(BasisTerm{quadratic, quadratic});   // t^4
    return Library(LibraryMode::PolynomialOnly, std::move(terms));
}

double eval_term(const BasisTerm& term, const ParamRecord& params, double t) {
    double value = 1.0;
    for (const Factor& f : term.factors()) value *= eval_factor(f, params, t).value;
    return value;
}

double eval_derivative(const BasisTerm& term, const ParamRecord& params, double t, int order) {
    if (order != 1 && order != 2) throw ArgumentError("derivative order must be 1 or 2");
    const auto& factors = term.factors();
    if (factors.size() == 1) {
        const FactorDerivatives f = eval_factor(factors[0], params, t);
        return order == 1 ? f.d1 : f.d2;
    }
    const FactorDerivatives f = eval_factor(factors[0], params, t);
    const FactorDerivatives g = eval_factor(factors[1], params, t);
    if (order == 1) return f.d1 * g.value + f.value * g.d1;
    return f.d2 * g.value + 2.0 * f.d1 * g.d1 + f.value * g.d2;
}

Matrix build_design_matrix(std::span<const BasisTerm> subset, const ParamRecord& params,
                           std::span<const double> times) {
    if (subset.empty()) throw ArgumentError("build_design_matrix: empty term subset");
    if (times.empty()) throw ArgumentError("build_design_matrix: empty time grid");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw ArgumentError("build_design_matrix: times must be strictly increasing");

    Matrix design(times.size(), subset.size());
    for (std::size_t j = 0; j < subset.size(); ++j)
        for (std::size_t i = 0; i < times.size(); ++i)
            design(i, j) = eval_term(subset[j], params, times[i]);
    return design;
}

std::vector<TermSubset> enumerate_candidates(const Library& library, int max_terms) {
    const int n = static_cast<int>(library.size());
    if (max_terms < 1 || max_terms > n)
        throw ArgumentError("enumerate_candidates: max_terms must be in [1, library size]");

    std::vector<TermSubset> out;
    std::vector<std::size_t> combo;
    for (int k = 1; k <= max_terms; ++k) {
        std::vector<TermSubset> of_size;
        combo.assign(static_cast<std::size_t>(k), 0);
        // Lexicographic combinations of k indices out of n.
        std::iota(combo.begin(), combo.end(), std::size_t{0});
        while (true) {
            of_size.push_back(combo);
            int i = k - 1;
            while (i >= 0 && combo[static_cast<std::size_t>(i)] ==
                                 static_cast<std::size_t>(n - k + i))
                --i;
            if (i < 0) break;
            ++combo[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
        }
        std::stable_sort(of_size.begin(), of_size.end(),
                         [&library](const TermSubset& a, const TermSubset& b) {
                             int ra = 0, rb = 0;
                             for (std::size_t i : a) ra += library[i].complexity_rank();
                             for (std::size_t i : b) rb += library[i].complexity_rank();
                             if (ra != rb) return ra < rb;
                             return a < b;  // lexicographic library order
                         });
        out.insert(out.end(), of_size.begin(), of_size.end());
    }
    return out;
}

AmplitudePhase amplitude_phase(double cos_coeff, double sin_coeff) {
    AmplitudePhase ap;
    ap.amplitude = std::hypot(cos_coeff, sin_coeff);
    ap.phase = std::atan2(sin_coeff, cos_coeff);
    return ap;
}

}  // namespace ns
