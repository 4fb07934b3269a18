#include "tabeval/stattests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tabeval/errors.hpp"
#include "tabeval/kernels.hpp"
#include "tabeval/rng.hpp"

namespace tabeval {
namespace {

void check_two_sample(const Matrix& x, const Matrix& y) {
    if (x.cols() != y.cols())
        throw DimensionMismatch("samples have " + std::to_string(x.cols()) + " and " +
                                std::to_string(y.cols()) + " features");
    if (x.cols() == 0) throw DimensionMismatch("samples have zero features");
    if (x.rows() < 2 || y.rows() < 2)
        throw DegenerateInput("each sample needs at least two rows");
}

Matrix pool_rows(const Matrix& x, const Matrix& y) {
    Matrix z(x.rows() + y.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        std::copy(x.row(i), x.row(i) + x.cols(), z.row(i));
    for (std::size_t i = 0; i < y.rows(); ++i)
        std::copy(y.row(i), y.row(i) + y.cols(), z.row(x.rows() + i));
    return z;
}

// Covariance of the rows of z selected by idx[lo..hi), n-1 denominator.
Matrix covariance_of(const Matrix& z, const std::vector<std::size_t>& idx,
                     std::size_t lo, std::size_t hi, std::vector<double>& mean_out) {
    const std::size_t p = z.cols();
    const std::size_t n = hi - lo;
    mean_out.assign(p, 0.0);
    for (std::size_t i = lo; i < hi; ++i) {
        const double* r = z.row(idx[i]);
        for (std::size_t j = 0; j < p; ++j) mean_out[j] += r[j];
    }
    for (double& m : mean_out) m /= static_cast<double>(n);
    Matrix s(p, p);
    std::vector<double> d(p);
    for (std::size_t i = lo; i < hi; ++i) {
        const double* r = z.row(idx[i]);
        for (std::size_t j = 0; j < p; ++j) d[j] = r[j] - mean_out[j];
        for (std::size_t a = 0; a < p; ++a) {
            double* row = s.row(a);
            double da = d[a];
            for (std::size_t b = a; b < p; ++b) row[b] += da * d[b];
        }
    }
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
            double v = s(a, b) / static_cast<double>(n - 1);
            s(a, b) = v;
            s(b, a) = v;
        }
    return s;
}

double hotelling_statistic(const Matrix& z, const std::vector<std::size_t>& idx,
                           std::size_t n1, double ridge_scale) {
    const std::size_t p = z.cols();
    const std::size_t n2 = idx.size() - n1;
    std::vector<double> m1, m2;
    Matrix s1 = covariance_of(z, idx, 0, n1, m1);
    Matrix s2 = covariance_of(z, idx, n1, idx.size(), m2);

    Matrix pooled(p, p);
    const double w1 = static_cast<double>(n1 - 1);
    const double w2 = static_cast<double>(n2 - 1);
    const double denom = w1 + w2;
    double trace = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = 0; b < p; ++b)
            pooled(a, b) = (w1 * s1(a, b) + w2 * s2(a, b)) / denom;
        trace += pooled(a, a);
    }
    double lambda = ridge_scale * trace / static_cast<double>(p);
    if (lambda <= 0.0) lambda = 1e-12;
    for (std::size_t a = 0; a < p; ++a) pooled(a, a) += lambda;

    std::vector<double> diff(p);
    for (std::size_t j = 0; j < p; ++j) diff[j] = m1[j] - m2[j];

    if (!cholesky(pooled)) {
        // The ridge keeps this from happening for any non-degenerate input;
        // fall back to a diagonal-only solve rather than fail a permutation.
        double q = 0.0;
        for (std::size_t j = 0; j < p; ++j) q += diff[j] * diff[j] / lambda;
        return q * static_cast<double>(n1) * static_cast<double>(n2) /
               static_cast<double>(idx.size());
    }
    std::vector<double> v = cholesky_solve(pooled, diff);
    double q = kernels::dot(diff.data(), v.data(), p);
    return q * static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(idx.size());
}

double frobenius_statistic(const Matrix& z, const std::vector<std::size_t>& idx, std::size_t n1) {
    std::vector<double> m1, m2;
    Matrix s1 = covariance_of(z, idx, 0, n1, m1);
    Matrix s2 = covariance_of(z, idx, n1, idx.size(), m2);
    double acc = 0.0;
    const std::size_t p = z.cols();
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b) {
            double d = s1(a, b) - s2(a, b);
            acc += d * d;
        }
    return std::sqrt(acc);
}

PermutationResult run_permutation(const Matrix& x, const Matrix& y, const TestConfig& cfg,
                                  const std::string& name,
                                  double (*statistic)(const Matrix&, const std::vector<std::size_t>&,
                                                      std::size_t, double),
                                  double extra) {
    check_two_sample(x, y);
    Matrix z = pool_rows(x, y);
    const std::size_t n = z.rows();
    const std::size_t n1 = x.rows();

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});

    PermutationResult res;
    res.statistic_name = name;
    res.seed = cfg.seed;
    res.permutations = cfg.permutations;
    res.observed = statistic(z, idx, n1, extra);

    std::uint64_t base = derive_seed(cfg.seed, name);
    std::size_t count_ge = 0;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t b = 0; b < cfg.permutations; ++b) {
        Rng rng(derive_seed(base, static_cast<std::uint64_t>(b)));
        rng.shuffle(idx);
        double t = statistic(z, idx, n1, extra);
        if (t >= res.observed) ++count_ge;
        sum += t;
        sum2 += t * t;
    }
    const double bd = static_cast<double>(cfg.permutations);
    res.p_value = (1.0 + static_cast<double>(count_ge)) / (bd + 1.0);
    res.reject = res.p_value < cfg.alpha;
    res.null_mean = cfg.permutations ? sum / bd : 0.0;
    double var = cfg.permutations > 1 ? (sum2 - sum * sum / bd) / (bd - 1.0) : 0.0;
    res.null_sd = var > 0.0 ? std::sqrt(var) : 0.0;
    return res;
}

double frobenius_adapter(const Matrix& z, const std::vector<std::size_t>& idx,
                         std::size_t n1, double) {
    return frobenius_statistic(z, idx, n1);
}

}  // namespace

PermutationResult hotelling_t2_regularized(const Matrix& x, const Matrix& y, const TestConfig& cfg) {
    return run_permutation(x, y, cfg, "hotelling_t2", hotelling_statistic, cfg.ridge_scale);
}

PermutationResult frobenius_covariance_test(const Matrix& x, const Matrix& y, const TestConfig& cfg) {
    return run_permutation(x, y, cfg, "frobenius_covariance", frobenius_adapter, 0.0);
}

namespace {

Matrix seeded_subsample(const Matrix& m, std::size_t cap, std::uint64_t seed) {
    if (m.rows() <= cap) return m;
    std::vector<std::size_t> idx(m.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(idx);
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
    Matrix out(cap, m.cols());
    for (std::size_t i = 0; i < cap; ++i)
        std::copy(m.row(idx[i]), m.row(idx[i]) + m.cols(), out.row(i));
    return out;
}

// Unbiased MMD^2 from a precomputed kernel matrix. S_A and S_cross are
// derived from per-row kernel sums so each permutation costs one pass over
// the first group's submatrix instead of the full matrix.
double mmd_from_kernel(const Matrix& k, const std::vector<double>& row_sums, double total_offdiag,
                       const std::vector<std::size_t>& idx, std::size_t n1) {
    const std::size_t n = idx.size();
    const std::size_t n2 = n - n1;
    double s_a = 0.0;
    double rows_a = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        const double* row = k.row(idx[i]);
        rows_a += row_sums[idx[i]];
        double acc = 0.0;
        for (std::size_t j = 0; j < n1; ++j) acc += row[idx[j]];
        s_a += acc;
    }
    s_a -= static_cast<double>(n1);  // remove the unit diagonal
    double s_cross = rows_a - s_a;
    double s_b = total_offdiag - s_a - 2.0 * s_cross;
    const double f1 = static_cast<double>(n1);
    const double f2 = static_cast<double>(n2);
    return s_a / (f1 * (f1 - 1.0)) + s_b / (f2 * (f2 - 1.0)) - 2.0 * s_cross / (f1 * f2);
}

}  // namespace

PermutationResult mmd_test(const Matrix& x, const Matrix& y, const TestConfig& cfg) {
    check_two_sample(x, y);
    const std::size_t cap = cfg.subsample.value_or(2000);
    if (cap < 2) throw DegenerateInput("subsample cap below two rows");
    Matrix xs = seeded_subsample(x, cap, derive_seed(cfg.seed, "mmd_subsample_x"));
    Matrix ys = seeded_subsample(y, cap, derive_seed(cfg.seed, "mmd_subsample_y"));
    Matrix z = pool_rows(xs, ys);
    const std::size_t n = z.rows();
    const std::size_t n1 = xs.rows();

    PermutationResult res;
    res.statistic_name = "mmd";
    res.seed = cfg.seed;
    res.permutations = cfg.permutations;

    // Squared pairwise distances; the median of the off-diagonal entries sets
    // the kernel bandwidth for the whole test.
    Matrix k(n, n);
    std::vector<double> upper;
    upper.reserve(n * (n - 1) / 2);
    const std::size_t p = z.cols();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d2 = kernels::l2sq(z.row(i), z.row(j), p);
            k(i, j) = d2;
            k(j, i) = d2;
            upper.push_back(d2);
        }
    }
    std::size_t mid = upper.size() / 2;
    std::nth_element(upper.begin(), upper.begin() + mid, upper.end());
    double median = upper[mid];
    if (upper.size() % 2 == 0) {
        double lo = *std::max_element(upper.begin(), upper.begin() + mid);
        median = 0.5 * (lo + median);
    }

    if (median <= 0.0) {
        res.observed = 0.0;
        res.p_value = 1.0;
        res.reject = false;
        res.null_mean = 0.0;
        res.null_sd = 0.0;
        res.zero_bandwidth = true;
        return res;
    }

    const double sigma2 = median / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        double* row = k.row(i);
        for (std::size_t j = 0; j < n; ++j)
            row[j] = (i == j) ? 1.0 : std::exp(-row[j] / (2.0 * sigma2));
    }
    std::vector<double> row_sums(n);
    double total_offdiag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = kernels::sum(k.row(i), n) - 1.0;
        row_sums[i] = s;
        total_offdiag += s;
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    res.observed = mmd_from_kernel(k, row_sums, total_offdiag, idx, n1);

    std::uint64_t base = derive_seed(cfg.seed, "mmd");
    std::size_t count_ge = 0;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t b = 0; b < cfg.permutations; ++b) {
        Rng rng(derive_seed(base, static_cast<std::uint64_t>(b)));
        rng.shuffle(idx);
        double t = mmd_from_kernel(k, row_sums, total_offdiag, idx, n1);
        if (t >= res.observed) ++count_ge;
        sum += t;
        sum2 += t * t;
    }
    const double bd = static_cast<double>(cfg.permutations);
    res.p_value = (1.0 + static_cast<double>(count_ge)) / (bd + 1.0);
    res.reject = res.p_value < cfg.alpha;
    res.null_mean = cfg.permutations ? sum / bd : 0.0;
    double var = cfg.permutations > 1 ? (sum2 - sum * sum / bd) / (bd - 1.0) : 0.0;
    res.null_sd = var > 0.0 ? std::sqrt(var) : 0.0;
    return res;
}

}  // namespace tabeval
