#include "ns/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ns/errors.hpp"

namespace ns {

// Householder QR with column pivoting, factoring in place. Q^T is applied to
// the right-hand side as it is formed, so the residual norm falls out of the
// trailing entries of the transformed observation vector.
LinearSolution solve_linear(const Matrix& design, std::span<const double> observations,
                            double condition_limit) {
    const std::size_t m = design.rows();
    const std::size_t n = design.cols();
    if (m == 0 || n == 0) throw ArgumentError("solve_linear: empty design matrix");
    if (observations.size() != m)
        throw ArgumentError("solve_linear: observation length does not match design rows");
    if (m < n) throw ArgumentError("solve_linear: fewer rows than columns");

    Matrix a = design;
    std::vector<double> b(observations.begin(), observations.end());
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    for (std::size_t k = 0; k < n; ++k) {
        // Pivot: bring the remaining column of largest norm to position k.
        std::size_t best = k;
        double best_norm = -1.0;
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += a(i, j) * a(i, j);
            if (s > best_norm) {
                best_norm = s;
                best = j;
            }
        }
        if (best != k) {
            for (std::size_t i = 0; i < m; ++i) std::swap(a(i, k), a(i, best));
            std::swap(perm[k], perm[best]);
        }

        double alpha = 0.0;
        for (std::size_t i = k; i < m; ++i) alpha += a(i, k) * a(i, k);
        alpha = std::sqrt(alpha);
        if (alpha == 0.0) continue;  // column already zero; R(k,k) stays 0
        if (a(k, k) > 0.0) alpha = -alpha;

        // Householder vector v, stored in place below the diagonal.
        std::vector<double> v(m - k);
        v[0] = a(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i - k] = a(i, k);
        double vtv = 0.0;
        for (double x : v) vtv += x * x;
        a(k, k) = alpha;
        for (std::size_t i = k + 1; i < m; ++i) a(i, k) = 0.0;
        if (vtv == 0.0) continue;

        for (std::size_t j = k + 1; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * a(i, j);
            const double beta = 2.0 * dot / vtv;
            for (std::size_t i = k; i < m; ++i) a(i, j) -= beta * v[i - k];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) dot += v[i - k] * b[i];
        const double beta = 2.0 * dot / vtv;
        for (std::size_t i = k; i < m; ++i) b[i] -= beta * v[i - k];
    }

    double max_diag = 0.0;
    double min_diag = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const double d = std::abs(a(k, k));
        max_diag = std::max(max_diag, d);
        min_diag = std::min(min_diag, d);
    }
    const double condition =
        min_diag > 0.0 ? max_diag / min_diag : std::numeric_limits<double>::infinity();
    if (!(condition <= condition_limit))
        throw DegenerateDesignError("solve_linear: design is numerically rank deficient", condition);

    std::vector<double> y(n, 0.0);
    for (std::size_t kk = n; kk-- > 0;) {
        double s = b[kk];
        for (std::size_t j = kk + 1; j < n; ++j) s -= a(kk, j) * y[j];
        y[kk] = s / a(kk, kk);
    }

    LinearSolution out;
    out.coefficients.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) out.coefficients[perm[k]] = y[k];

    double resid = 0.0;
    for (std::size_t i = n; i < m; ++i) resid += b[i] * b[i];
    out.rmse = std::sqrt(resid / static_cast<double>(m));
    out.condition_estimate = condition;
    return out;
}

}  // namespace ns
