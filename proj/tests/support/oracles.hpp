#pragma once

// Independent reference implementations used to check the library's fast
// paths. Everything here favors clarity over speed: double loops, full
// sorts, direct formula transcriptions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "tabeval/table.hpp"

namespace oracle {

inline double rel_err(double a, double b) {
    double scale = std::max({1e-8, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) / scale;
}

/// Central finite difference of f at the given slot.
template <class F>
double central_diff(F&& f, double& slot, double h = 1e-5) {
    const double orig = slot;
    slot = orig + h;
    const double up = f();
    slot = orig - h;
    const double down = f();
    slot = orig;
    return (up - down) / (2.0 * h);
}

/// ROC-AUC by counting concordant pairs, ties worth one half.
inline double auc_pair_count(std::span<const double> scores,
                             std::span<const std::uint8_t> positives) {
    double concordant = 0.0;
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!positives[i]) continue;
        ++n_pos;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (positives[j]) continue;
            if (scores[i] > scores[j]) concordant += 1.0;
            else if (scores[i] == scores[j]) concordant += 0.5;
        }
    }
    n_neg = scores.size() - n_pos;
    return concordant / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

/// Interpolated quantile of sorted data, matching R's default (type 7).
inline double quantile7(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const double h = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// Nearest-neighbor distance ratio by exhaustive search. Numerics are scaled
/// by median/IQR computed on the reference; a categorical mismatch adds one
/// to the squared distance.
inline double nndr_bruteforce(const tabeval::Table& synth, const tabeval::Table& reference,
                              bool exclude_self = false) {
    struct Col {
        std::size_t s, r;
        bool numeric;
        double med = 0.0, iqr = 0.0;
    };
    std::vector<Col> cols;
    for (const auto& sc : synth.schema()) {
        auto ri = reference.find_column(sc.name);
        if (!ri || reference.kind(*ri) != sc.kind) continue;
        Col c{synth.column_index(sc.name), *ri, sc.kind == tabeval::ColumnKind::Numeric};
        if (c.numeric) {
            c.med = quantile7(reference.numeric_column(*ri).to_vector(), 0.5);
            c.iqr = quantile7(reference.numeric_column(*ri).to_vector(), 0.75) -
                    quantile7(reference.numeric_column(*ri).to_vector(), 0.25);
        }
        cols.push_back(c);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < synth.n_rows(); ++i) {
        std::vector<double> dists;
        for (std::size_t j = 0; j < reference.n_rows(); ++j) {
            if (exclude_self && i == j) continue;
            double d2 = 0.0;
            for (const auto& c : cols) {
                if (c.numeric) {
                    double a = synth.numeric_column(c.s)[i] - c.med;
                    double b = reference.numeric_column(c.r)[j] - c.med;
                    if (c.iqr != 0.0) {
                        a /= c.iqr;
                        b /= c.iqr;
                    }
                    d2 += (a - b) * (a - b);
                } else {
                    const auto& sd = synth.dictionary(c.s);
                    const auto& rd = reference.dictionary(c.r);
                    if (sd[static_cast<std::size_t>(synth.codes(c.s)[i])] !=
                        rd[static_cast<std::size_t>(reference.codes(c.r)[j])])
                        d2 += 1.0;
                }
            }
            dists.push_back(std::sqrt(d2));
        }
        std::sort(dists.begin(), dists.end());
        total += dists[1] == 0.0 ? 0.0 : dists[0] / dists[1];
    }
    return total / static_cast<double>(synth.n_rows());
}

/// Unbiased squared MMD with an RBF kernel, direct double-sum transcription.
inline double mmd_unbiased(const std::vector<std::vector<double>>& x,
                           const std::vector<std::vector<double>>& y, double sigma2) {
    auto k = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
        return std::exp(-d2 / (2.0 * sigma2));
    };
    const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
    double xx = 0.0, yy = 0.0, xy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
            if (i != j) xx += k(x[i], x[j]);
    for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j)
            if (i != j) yy += k(y[i], y[j]);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < y.size(); ++j) xy += k(x[i], y[j]);
    return xx / (n * (n - 1.0)) + yy / (m * (m - 1.0)) - 2.0 * xy / (n * m);
}

}  // namespace oracle
