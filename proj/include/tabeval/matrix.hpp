#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tabeval {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }
    std::span<const double> row_span(std::size_t i) const { return {row(i), cols_}; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    void fill(double v) { data_.assign(data_.size(), v); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// C = A * B^T, A: m x k, B: n x k. Both operands iterate contiguous rows.
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// C = A * B, A: m x k, B: k x n.
Matrix matmul_nn(const Matrix& a, const Matrix& b);

/// C = A^T * B, A: k x m, B: k x n.
Matrix matmul_tn(const Matrix& a, const Matrix& b);

/// Column means of a, length cols.
std::vector<double> column_means(const Matrix& a);

/// Sample covariance (n-1 denominator), cols x cols. Requires rows >= 2.
Matrix sample_covariance(const Matrix& a);

/// In-place lower-triangular Cholesky factor of a symmetric positive definite
/// matrix. Returns false if a non-positive pivot is hit.
bool cholesky(Matrix& a);

/// Solves L L^T x = b given the lower factor L.
std::vector<double> cholesky_solve(const Matrix& chol_lower, std::span<const double> b);

/// Sum of log of diagonal entries (half log-determinant of the factored matrix).
double log_diag_sum(const Matrix& chol_lower);

}  // namespace tabeval
