#include "manproj/kernels.hpp"

#include <atomic>

namespace manproj::kernels {

namespace {

Isa detect() {
#if defined(__x86_64__) || defined(__i386__)
    if (__builtin_cpu_supports("avx2")) return Isa::Avx2;
#endif
    return Isa::Scalar;
}

std::atomic<Isa> g_isa{detect()};

} // namespace

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa active_isa() { return g_isa.load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
    if (isa == Isa::Avx2 && !avx2_supported()) isa = Isa::Scalar;
    g_isa.store(isa, std::memory_order_relaxed);
}

void reset_isa() { g_isa.store(detect(), std::memory_order_relaxed); }

void squared_distances(const double* points, std::size_t n, std::size_t dim,
                       const double* query, double* out) {
#if defined(__x86_64__) || defined(__i386__)
    if (active_isa() == Isa::Avx2) {
        detail::squared_distances_avx2(points, n, dim, query, out);
        return;
    }
#endif
    detail::squared_distances_scalar(points, n, dim, query, out);
}

void axpy(double a, const double* x, std::size_t n, double* y) {
#if defined(__x86_64__) || defined(__i386__)
    if (active_isa() == Isa::Avx2) {
        detail::axpy_avx2(a, x, n, y);
        return;
    }
#endif
    detail::axpy_scalar(a, x, n, y);
}

} // namespace manproj::kernels
