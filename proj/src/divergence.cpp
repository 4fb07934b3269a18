#include "tabeval/divergence.hpp"

#include <cmath>
#include <limits>

#include "tabeval/errors.hpp"

namespace tabeval {
namespace {

void check_aligned(const LabelDistribution& p, const LabelDistribution& q) {
    if (p.categories != q.categories)
        throw CategoryMismatch("distributions are over different category sets");
    if (p.categories.empty()) throw CategoryMismatch("empty category set");
}

double kl_f(double u) {
    if (u < 0.0) throw DomainError("f argument must be non-negative");
    if (u == 0.0) return 0.0;
    return u * std::log(u);
}

double kl_conjugate(double t) { return std::exp(t - 1.0); }
double kl_conjugate_grad(double t) { return std::exp(t - 1.0); }
double kl_activation(double v) { return v; }
double kl_activation_grad(double) { return 1.0; }

double h2_f(double u) {
    if (u < 0.0) throw DomainError("f argument must be non-negative");
    double s = std::sqrt(u) - 1.0;
    return s * s;
}

double h2_conjugate(double t) {
    if (t >= 1.0) throw DomainError("conjugate domain is t < 1");
    return t / (1.0 - t);
}

double h2_conjugate_grad(double t) {
    if (t >= 1.0) throw DomainError("conjugate domain is t < 1");
    double d = 1.0 - t;
    return 1.0 / (d * d);
}

double h2_activation(double v) { return 1.0 - std::exp(-v); }
double h2_activation_grad(double v) { return std::exp(-v); }

const FDivergencePair kl_pair{
    "kullback_leibler", kl_f, kl_conjugate, kl_conjugate_grad,
    kl_activation, kl_activation_grad, std::numeric_limits<double>::infinity()};

const FDivergencePair h2_pair{
    "squared_hellinger", h2_f, h2_conjugate, h2_conjugate_grad,
    h2_activation, h2_activation_grad, 1.0};

}  // namespace

double jensen_shannon(const LabelDistribution& p, const LabelDistribution& q) {
    check_aligned(p, q);
    double jsd = 0.0;
    for (std::size_t i = 0; i < p.proportions.size(); ++i) {
        double a = p.proportions[i];
        double b = q.proportions[i];
        double m = 0.5 * (a + b);
        if (a > 0.0) jsd += 0.5 * a * std::log2(a / m);
        if (b > 0.0) jsd += 0.5 * b * std::log2(b / m);
    }
    return jsd;
}

double hellinger(const LabelDistribution& p, const LabelDistribution& q) {
    check_aligned(p, q);
    double s = 0.0;
    for (std::size_t i = 0; i < p.proportions.size(); ++i) {
        double d = std::sqrt(p.proportions[i]) - std::sqrt(q.proportions[i]);
        s += d * d;
    }
    return std::sqrt(s) / std::sqrt(2.0);
}

double wasserstein1_categorical(const LabelDistribution& p, const LabelDistribution& q) {
    check_aligned(p, q);
    double acc = 0.0;
    double w = 0.0;
    for (std::size_t i = 0; i < p.proportions.size(); ++i) {
        acc += p.proportions[i] - q.proportions[i];
        w += std::fabs(acc);
    }
    return w;
}

const FDivergencePair& f_pair(FDivergence which) {
    switch (which) {
        case FDivergence::KullbackLeibler: return kl_pair;
        case FDivergence::SquaredHellinger: return h2_pair;
    }
    throw Unsupported("unknown f-divergence");
}

}  // namespace tabeval
