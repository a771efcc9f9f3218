#pragma once

#include <cstddef>

namespace manproj::kernels {

// Instruction set selected for the data-parallel inner loops. The AVX2
// variants are written so that each output element sees the same sequence of
// roundings as the scalar reference (one point per lane, dimensions
// accumulated in ascending order, no FMA contraction), so both paths produce
// bit-identical results and the dispatch never changes numbers.
enum class Isa { Scalar, Avx2 };

bool avx2_supported();
Isa active_isa();
// Overrides the dispatch; Isa::Avx2 on unsupported hardware falls back to
// scalar. Intended for equivalence tests and benchmarks.
void force_isa(Isa isa);
void reset_isa();

// out[i] = sum_j (points[i*dim + j] - query[j])^2, j ascending.
void squared_distances(const double* points, std::size_t n, std::size_t dim,
                       const double* query, double* out);

// y[j] += a * x[j]
void axpy(double a, const double* x, std::size_t n, double* y);

namespace detail {
void squared_distances_scalar(const double* points, std::size_t n,
                              std::size_t dim, const double* query,
                              double* out);
void squared_distances_avx2(const double* points, std::size_t n,
                            std::size_t dim, const double* query, double* out);
void axpy_scalar(double a, const double* x, std::size_t n, double* y);
void axpy_avx2(double a, const double* x, std::size_t n, double* y);
} // namespace detail

} // namespace manproj::kernels
