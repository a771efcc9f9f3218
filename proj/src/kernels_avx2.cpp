// AVX2 variants of the data-parallel kernels.  Compiled with -mavx2
// -ffp-contract=off; each lane carries one point and dimensions are
// accumulated in ascending order with separate multiply and add, so results
// are bit-identical to the scalar reference.
#if defined(__AVX2__)

#include "manproj/kernels.hpp"

#include <immintrin.h>

namespace manproj::kernels::detail {

void squared_distances_avx2(const double* points, std::size_t n, std::size_t dim,
                            const double* query, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const double* p0 = points + (i + 0) * dim;
        const double* p1 = points + (i + 1) * dim;
        const double* p2 = points + (i + 2) * dim;
        const double* p3 = points + (i + 3) * dim;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < dim; ++j) {
            __m256d p = _mm256_set_pd(p3[j], p2[j], p1[j], p0[j]);
            __m256d q = _mm256_set1_pd(query[j]);
            __m256d diff = _mm256_sub_pd(p, q);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(diff, diff));
        }
        _mm256_storeu_pd(out + i, acc);
    }
    if (i < n) squared_distances_scalar(points + i * dim, n - i, dim, query, out + i);
}

void axpy_avx2(double a, const double* x, std::size_t n, double* y) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xv = _mm256_loadu_pd(x + i);
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_add_pd(yv, _mm256_mul_pd(av, xv));
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

} // namespace manproj::kernels::detail

#else // !__AVX2__: keep the symbols defined so dispatch code links everywhere.

#include "manproj/kernels.hpp"

namespace manproj::kernels::detail {

void squared_distances_avx2(const double* points, std::size_t n, std::size_t dim,
                            const double* query, double* out) {
    squared_distances_scalar(points, n, dim, query, out);
}

void axpy_avx2(double a, const double* x, std::size_t n, double* y) {
    axpy_scalar(a, x, n, y);
}

} // namespace manproj::kernels::detail

#endif
