#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manproj/geom.hpp"
#include "manproj/types.hpp"

namespace manproj {

// Multivariate polynomial R^d -> R^codim of total degree <= degree.
// coeffs has one row per monomial in graded-lexicographic order (constant
// first, then x_1..x_d, then degree 2, ...) and one column per output
// coordinate.
struct PolyModel {
    int d = 0;
    int codim = 0;
    int degree = 0;
    Mat coeffs;
};

struct FitDiagnostics {
    bool ill_conditioned = false; // condition estimate above 1e12
    double condition = 0.0;       // from the pivoted-QR diagonal
    int rank = 0;
};

// Number of monomials of total degree <= degree in d variables,
// C(d + degree, d).
int monomial_count(int d, int degree);

// Exponent vectors in graded-lexicographic order: total degree ascending;
// within a degree, the first variable's exponent descending, recursing on the
// rest. Entry 0 is the constant; entries 1..d are x_1..x_d.
std::vector<std::vector<int>> monomial_exponents(int d, int degree);

// Values of all monomials at x, in the same order.
Vec monomials(int d, int degree, const Vec& x);

// Least-squares fit of Y (N x codim) against the monomial design of X
// (N x d): minimizes sum_i ||y_i - pi(x_i)||^2. Solved by column-pivoted QR
// with rank threshold 1e-10 relative, returning the minimum-norm solution on
// rank deficiency. Throws InsufficientSamples when N < monomial_count.
PolyModel fit_ls(const Mat& X, const Mat& Y, int degree, FitDiagnostics* diag = nullptr);

// Median-of-means variant: the rows are shuffled by `seed`, split into B
// near-equal blocks, fit independently, and the coefficient rows are combined
// by a coordinate-wise median (even counts average the two middle values).
// B = 1 skips the shuffle and is exactly fit_ls. Throws InsufficientSamples
// when N < B * monomial_count.
PolyModel fit_mom(const Mat& X, const Mat& Y, int degree, int blocks, std::uint64_t seed,
                  FitDiagnostics* diag = nullptr);

// Constant term pi(0).
Vec value_at_zero(const PolyModel& model);

// Differential at 0: codim x d matrix whose column j is the coefficient row
// of the monomial x_j.
Mat differential_at_zero(const PolyModel& model);

// coeffs^T * monomials(x).
Vec eval(const PolyModel& model, const Vec& x);

// Orthonormal basis of the tangent to the graph x -> (x, pi(x)) at 0, lifted
// to ambient coordinates: span of U[:,j] + V * Dpi[:,j].
Mat graph_tangent(const Frame& frame, const Mat& Dpi);

// CSV form: a "d,codim,degree" header pair, then one row per monomial.
void save_poly_csv(const std::string& path, const PolyModel& model);
PolyModel load_poly_csv(const std::string& path);

} // namespace manproj
