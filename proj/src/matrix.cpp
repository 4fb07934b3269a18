#include "tabeval/matrix.hpp"

#include <cassert>
#include <cmath>

#include "tabeval/kernels.hpp"

namespace tabeval {

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.cols());
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            ci[j] = kernels::dot(ai, b.row(j), a.cols());
        }
    }
    return c;
}

Matrix matmul_nn(const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.rows());
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            kernels::axpy(ai[k], b.row(k), ci, b.cols());
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    assert(a.rows() == b.rows());
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* ak = a.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            kernels::axpy(ak[i], b.row(k), c.row(i), b.cols());
        }
    }
    return c;
}

std::vector<double> column_means(const Matrix& a) {
    std::vector<double> m(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        kernels::axpy(1.0, a.row(i), m.data(), a.cols());
    }
    const double inv = a.rows() > 0 ? 1.0 / static_cast<double>(a.rows()) : 0.0;
    for (double& v : m) v *= inv;
    return m;
}

Matrix sample_covariance(const Matrix& a) {
    assert(a.rows() >= 2);
    const std::size_t n = a.rows();
    const std::size_t p = a.cols();
    const std::vector<double> mean = column_means(a);
    Matrix centered(n, p);
    for (std::size_t i = 0; i < n; ++i) {
        const double* src = a.row(i);
        double* dst = centered.row(i);
        for (std::size_t j = 0; j < p; ++j) dst[j] = src[j] - mean[j];
    }
    Matrix cov = matmul_tn(centered, centered);
    const double inv = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) cov(i, j) *= inv;
    }
    return cov;
}

bool cholesky(Matrix& a) {
    assert(a.rows() == a.cols());
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j) - kernels::dot(a.row(j), a.row(j), j);
        if (!(d > 0.0)) return false;
        d = std::sqrt(d);
        a(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            a(i, j) = (a(i, j) - kernels::dot(a.row(i), a.row(j), j)) / d;
        }
    }
    // zero the strict upper triangle so the factor is usable as-is
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) a(i, j) = 0.0;
    }
    return true;
}

std::vector<double> cholesky_solve(const Matrix& l, std::span<const double> b) {
    const std::size_t n = l.rows();
    assert(b.size() == n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = (b[i] - kernels::dot(l.row(i), y.data(), i)) / l(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = y[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l(k, i) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

double log_diag_sum(const Matrix& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return s;
}

}  // namespace tabeval
