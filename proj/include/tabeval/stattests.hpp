#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tabeval/matrix.hpp"

namespace tabeval {

struct TestConfig {
    std::size_t permutations = 500;
    double alpha = 0.05;
    double ridge_scale = 1e-3;               // Hotelling covariance ridge, relative to trace/p
    std::optional<std::size_t> subsample;    // per-group row cap; MMD defaults to 2000
    std::uint64_t seed = 0;
};

struct PermutationResult {
    std::string statistic_name;
    double observed;
    std::size_t permutations;
    double p_value;        // (1 + #{T_perm >= T_obs}) / (B + 1)
    bool reject;           // p_value < alpha
    double null_mean;
    double null_sd;
    std::uint64_t seed;
    bool zero_bandwidth = false;  // MMD only: all pooled points identical
};

/// Two-sample mean test with ridge-regularized pooled covariance.
PermutationResult hotelling_t2_regularized(const Matrix& x, const Matrix& y, const TestConfig& cfg);

/// Frobenius norm of the difference between the two sample covariances.
PermutationResult frobenius_covariance_test(const Matrix& x, const Matrix& y, const TestConfig& cfg);

/// Unbiased squared maximum mean discrepancy with an RBF kernel; bandwidth is
/// the median heuristic on the pooled sample, frozen across permutations.
PermutationResult mmd_test(const Matrix& x, const Matrix& y, const TestConfig& cfg);

}  // namespace tabeval
