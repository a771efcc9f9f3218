#include "manproj/kernels.hpp"

namespace manproj::kernels::detail {

void squared_distances_scalar(const double* points, std::size_t n,
                              std::size_t dim, const double* query,
                              double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double* p = points + i * dim;
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            const double diff = p[j] - query[j];
            acc += diff * diff;
        }
        out[i] = acc;
    }
}

void axpy_scalar(double a, const double* x, std::size_t n, double* y) {
    for (std::size_t j = 0; j < n; ++j) y[j] += a * x[j];
}

} // namespace manproj::kernels::detail
