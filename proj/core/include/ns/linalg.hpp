#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ns {

/// Dense row-major matrix of doubles. Sized once, then filled.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct LinearSolution {
    std::vector<double> coefficients;
    double rmse = 0.0;                // ||design*c - obs||_2 / sqrt(rows)
    double condition_estimate = 1.0;  // |r_11| / min |r_kk| from the pivoted QR
};

/// Least-squares minimizer of ||design*c - obs||_2 via Householder QR with
/// column pivoting. Normal equations are not formed.
///
/// Throws ArgumentError if rows < cols, the system is empty, or sizes
/// disagree; throws DegenerateDesignError (carrying the condition estimate)
/// if the design is numerically rank deficient beyond condition_limit.
LinearSolution solve_linear(const Matrix& design, std::span<const double> observations,
                            double condition_limit = 1e8);

}  // namespace ns
