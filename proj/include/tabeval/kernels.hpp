#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the distance, kernel-matrix and network
// training paths. Each primitive has a scalar reference implementation and,
// where the build target supports it, an AVX2 or NEON variant selected once at
// startup. The vector variants reassociate sums, so results may differ from
// the scalar path at rounding level; the equivalence tests bound that drift.

namespace tabeval::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double l2sq(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

#ifdef TABEVAL_BUILD_AVX2
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double l2sq(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

#ifdef TABEVAL_BUILD_NEON
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double l2sq(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace neon
#endif

struct Dispatch {
    double (*dot)(const double*, const double*, std::size_t);
    double (*l2sq)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    const char* isa;
};

/// The active kernel set. Resolved on first use; honors TABEVAL_FORCE_SCALAR=1.
const Dispatch& active();

inline double dot(const double* a, const double* b, std::size_t n) {
    return active().dot(a, b, n);
}
inline double l2sq(const double* a, const double* b, std::size_t n) {
    return active().l2sq(a, b, n);
}
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}

inline std::string_view active_isa() { return active().isa; }

}  // namespace tabeval::kernels
