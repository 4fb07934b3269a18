#pragma once

// Small deterministic datasets shared across the test files.

#include <cstdint>
#include <string>
#include <vector>

#include "tabeval/rng.hpp"
#include "tabeval/table.hpp"

namespace testdata {

/// Two well-separated Gaussian classes in two dimensions plus a categorical
/// column correlated with the class.
inline tabeval::Table two_class_gaussian(std::size_t n, std::uint64_t seed,
                                         double gap = 6.0) {
    tabeval::Rng rng(seed);
    std::vector<double> x(n), y(n);
    std::vector<std::string> seg(n), cls(n);
    for (std::size_t i = 0; i < n; ++i) {
        bool pos = i % 2 == 1;  // deterministic half/half split
        x[i] = (pos ? gap : 0.0) + rng.normal();
        y[i] = (pos ? -gap : 0.0) + rng.normal();
        seg[i] = rng.uniform() < (pos ? 0.8 : 0.2) ? "a" : "b";
        cls[i] = pos ? "pos" : "neg";
    }
    tabeval::TableBuilder b;
    b.add_numeric("x", std::move(x));
    b.add_numeric("y", std::move(y));
    b.add_categorical("seg", seg);
    b.add_categorical("cls", cls, tabeval::ColumnRole::Label);
    return b.build();
}

/// Numeric-only table of i.i.d. standard normals, n x p.
inline tabeval::Table gaussian_cloud(std::size_t n, std::size_t p, std::uint64_t seed,
                                     double mean = 0.0, double sd = 1.0) {
    tabeval::Rng rng(seed);
    tabeval::TableBuilder b;
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> col(n);
        for (auto& v : col) v = mean + sd * rng.normal();
        b.add_numeric("f" + std::to_string(j), std::move(col));
    }
    return b.build();
}

inline tabeval::Table small_mixed() {
    tabeval::TableBuilder b;
    b.add_numeric("age", {30.0, 40.0, 50.0, 60.0});
    b.add_numeric("income", {10.0, 20.0, 30.0, 40.0});
    b.add_categorical("color", {"red", "blue", "red", "green"});
    b.add_categorical("cls", {"yes", "no", "yes", "no"}, tabeval::ColumnRole::Label);
    return b.build();
}

}  // namespace testdata
