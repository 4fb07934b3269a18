#pragma once

#include <string>

#include "tabeval/table.hpp"

namespace tabeval {

/// Base-2 Jensen-Shannon divergence; ranges over [0, 1].
double jensen_shannon(const LabelDistribution& p, const LabelDistribution& q);

/// Hellinger distance, sqrt(sum (sqrt(p)-sqrt(q))^2) / sqrt(2); in [0, 1].
double hellinger(const LabelDistribution& p, const LabelDistribution& q);

/// 1-Wasserstein distance between distributions over ordered categories with
/// unit spacing: sum_i |CDF_p(i) - CDF_q(i)|.
double wasserstein1_categorical(const LabelDistribution& p, const LabelDistribution& q);

enum class FDivergence {
    KullbackLeibler,
    SquaredHellinger,
};

/// Convex generator f, its Fenchel conjugate, and the output activation that
/// maps an unconstrained real into the conjugate's domain. Derivatives are
/// provided for gradient-based training.
struct FDivergencePair {
    std::string name;
    double (*f)(double u);
    double (*conjugate)(double t);       // throws DomainError outside domain
    double (*conjugate_grad)(double t);
    double (*activation)(double v);
    double (*activation_grad)(double v);
    double conjugate_sup;                // domain upper bound, +inf if none
};

const FDivergencePair& f_pair(FDivergence which);

}  // namespace tabeval
