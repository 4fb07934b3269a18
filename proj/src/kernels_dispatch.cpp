#include "tabeval/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace tabeval::kernels {

namespace {

Dispatch resolve() {
    const char* force = std::getenv("TABEVAL_FORCE_SCALAR");
    const bool forced_scalar = force != nullptr && std::strcmp(force, "1") == 0;
#ifdef TABEVAL_BUILD_AVX2
    if (!forced_scalar && __builtin_cpu_supports("avx2")) {
        return {avx2::dot, avx2::l2sq, avx2::sum, avx2::axpy, "avx2"};
    }
#endif
#ifdef TABEVAL_BUILD_NEON
    // NEON is baseline on aarch64.
    if (!forced_scalar) {
        return {neon::dot, neon::l2sq, neon::sum, neon::axpy, "neon"};
    }
#endif
    (void)forced_scalar;
    return {scalar::dot, scalar::l2sq, scalar::sum, scalar::axpy, "scalar"};
}

}  // namespace

const Dispatch& active() {
    static const Dispatch d = resolve();
    return d;
}

}  // namespace tabeval::kernels
