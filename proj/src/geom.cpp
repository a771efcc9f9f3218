#include "manproj/geom.hpp"

#include <algorithm>
#include <cmath>

#include "manproj/errors.hpp"

namespace manproj {

namespace {

void check_orthonormal(const Mat& B, const char* what) {
    const Mat G = B.transpose() * B - Mat::Identity(B.cols(), B.cols());
    if (G.cwiseAbs().maxCoeff() > 1e-10)
        throw Error(std::string(what) + " basis is not orthonormal");
}

} // namespace

Frame::Frame(Vec origin_, Mat tangent_, Mat normal_)
    : origin(std::move(origin_)), tangent(std::move(tangent_)), normal(std::move(normal_)) {
    const auto D = origin.size();
    const auto d = tangent.cols();
    if (d < 1 || d >= D)
        throw DimensionMismatch("frame requires 1 <= d < D");
    if (tangent.rows() != D || normal.rows() != D || normal.cols() != D - d)
        throw DimensionMismatch("frame basis shapes do not match the ambient dimension");
    check_orthonormal(tangent, "tangent");
    check_orthonormal(normal, "normal");
    if ((tangent.transpose() * normal).cwiseAbs().maxCoeff() > 1e-10)
        throw Error("tangent and normal bases are not mutually orthogonal");
}

void fix_column_signs(Mat& columns) {
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
        auto col = columns.col(j);
        const double thresh = 1e-12 * col.cwiseAbs().maxCoeff();
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            if (std::abs(col[i]) > thresh) {
                if (col[i] < 0.0) col = -col;
                break;
            }
        }
    }
}

Mat orthonormalize(const Mat& columns) {
    const auto d = columns.cols();
    if (d < 1 || columns.rows() < d)
        throw DimensionMismatch("orthonormalize needs a tall D x d input");
    Eigen::JacobiSVD<Mat> svd(columns);
    const auto& s = svd.singularValues();
    if (s[0] == 0.0 || s[d - 1] < 1e-10 * s[0])
        throw RankDeficient("columns are numerically rank deficient");
    // The basis itself comes from Householder QR: it reproduces already
    // orthonormal inputs exactly and leads with the first column's direction.
    Eigen::HouseholderQR<Mat> qr(columns);
    Mat Q = qr.householderQ() * Mat::Identity(columns.rows(), d);
    fix_column_signs(Q);
    return Q;
}

Mat complement(const Mat& U) {
    const auto D = U.rows();
    const auto d = U.cols();
    if (d < 1 || d > D)
        throw DimensionMismatch("complement needs a tall D x d input");
    Eigen::HouseholderQR<Mat> qr(U);
    Mat full = qr.householderQ();
    Mat V = full.rightCols(D - d);
    fix_column_signs(V);
    return V;
}

std::vector<double> principal_angles(const Mat& U, const Mat& W) {
    if (U.rows() != W.rows())
        throw DimensionMismatch("bases live in different ambient dimensions");
    Eigen::JacobiSVD<Mat> cos_svd(U.transpose() * W);
    const auto& c = cos_svd.singularValues();
    // arccos of a cosine near 1 loses half the significand, so angles below
    // about 1e-8 would be unresolvable; recompute those through their sines,
    // which are the singular values of the residual (I - U U^T) W.
    Eigen::JacobiSVD<Mat> sin_svd(W - U * (U.transpose() * W));
    const auto& s = sin_svd.singularValues();
    const Eigen::Index n = c.size();
    std::vector<double> angles(static_cast<std::size_t>(n));
    // Cosines come out descending, so their arccosines are ascending; the
    // matching sines are the residual's singular values in reverse order.
    for (Eigen::Index i = 0; i < n; ++i) {
        const double cosine = std::clamp(c[i], -1.0, 1.0);
        const double sine = std::clamp(s[n - 1 - i], 0.0, 1.0);
        angles[static_cast<std::size_t>(i)] =
            cosine * cosine > 0.5 ? std::asin(sine) : std::acos(cosine);
    }
    return angles;
}

double angle_max(const Mat& U, const Mat& W) {
    if (U.cols() != W.cols())
        throw DimensionMismatch("angle_max requires subspaces of equal dimension");
    return principal_angles(U, W).back();
}

std::pair<Vec, Vec> to_local(const Frame& frame, const Vec& point) {
    const Vec delta = point - frame.origin;
    return {frame.tangent.transpose() * delta, frame.normal.transpose() * delta};
}

Vec from_local(const Frame& frame, const Vec& x, const Vec& y) {
    return frame.origin + frame.tangent * x + frame.normal * y;
}

} // namespace manproj
