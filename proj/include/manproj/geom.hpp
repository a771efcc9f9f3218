#pragma once

#include <utility>
#include <vector>

#include "manproj/types.hpp"

namespace manproj {

// Local coordinate system: an origin q in R^D together with an orthonormal
// tangent basis U (D x d) and an orthonormal normal basis V (D x (D-d)).
// Immutable after construction; the constructor validates orthonormality
// (max deviation 1e-10) and 1 <= d < D.
struct Frame {
    Vec origin;
    Mat tangent;
    Mat normal;

    Frame(Vec origin_, Mat tangent_, Mat normal_);

    int ambient_dim() const { return static_cast<int>(origin.size()); }
    int dim() const { return static_cast<int>(tangent.cols()); }
    int codim() const { return static_cast<int>(normal.cols()); }
};

// Flips each column so that its first entry of non-negligible magnitude
// (|entry| > 1e-12 * max|column|) is positive. Makes every basis returned by
// this module reproducible down to the sign.
void fix_column_signs(Mat& columns);

// Orthonormal basis of the column span of a full-column-rank D x d input.
// Throws RankDeficient when the smallest singular value is below
// 1e-10 times the largest.
Mat orthonormalize(const Mat& columns);

// Orthonormal basis of the orthogonal complement of a column-orthonormal U;
// returns a D x (D-d) matrix with U^T V = 0, V^T V = I.
Mat complement(const Mat& U);

// Principal angles between the column spans of two column-orthonormal bases:
// arccos of the singular values of U^T W (clipped to [-1, 1]), ascending.
std::vector<double> principal_angles(const Mat& U, const Mat& W);

// Largest principal angle between two subspaces of equal dimension.
// Throws DimensionMismatch when the column counts differ.
double angle_max(const Mat& U, const Mat& W);

// Coordinates of an ambient point in the frame: x = U^T (p - q),
// y = V^T (p - q).
std::pair<Vec, Vec> to_local(const Frame& frame, const Vec& point);

// Inverse of to_local: q + U x + V y.
Vec from_local(const Frame& frame, const Vec& x, const Vec& y);

} // namespace manproj
