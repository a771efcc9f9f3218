#include "manproj/initcs.hpp"

#include <cmath>

#include "manproj/errors.hpp"

namespace manproj {

PcaResult weighted_pca(const Mat& points, const Vec& center, const Vec& weights, int d) {
    const auto N = points.rows();
    const auto D = points.cols();
    if (center.size() != D || weights.size() != N)
        throw DimensionMismatch("weighted_pca: shapes do not agree");
    if (d < 1 || d > D)
        throw DimensionMismatch("weighted_pca: d out of range");
    double wsum = 0.0;
    Mat cov = Mat::Zero(D, D);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double w = weights[i];
        if (!(w >= 0.0) || !std::isfinite(w))
            throw Error("weighted_pca: weights must be finite and nonnegative");
        if (w == 0.0) continue;
        const Vec delta = points.row(i).transpose() - center;
        cov.noalias() += w * (delta * delta.transpose());
        wsum += w;
    }
    if (wsum <= 0.0) throw RankDeficient("weighted_pca: no positive weights");
    cov /= wsum;

    Eigen::SelfAdjointEigenSolver<Mat> eig(cov);
    // Eigen orders eigenvalues ascending; flip to descending.
    Vec evals(D);
    Mat evecs(D, D);
    for (Eigen::Index i = 0; i < D; ++i) {
        evals[i] = eig.eigenvalues()[D - 1 - i];
        evecs.col(i) = eig.eigenvectors().col(D - 1 - i);
    }
    if (evals[0] <= 0.0 || evals[d - 1] < 1e-10 * evals[0])
        throw RankDeficient("weighted covariance has numerical rank below d");

    PcaResult out;
    out.basis = evecs.leftCols(d);
    fix_column_signs(out.basis);
    out.eigenvalues = evals;
    out.degenerate_spectrum = d < D && (evals[d - 1] - evals[d]) <= 1e-10 * evals[0];
    return out;
}

double j1_score(const PointCloud& cloud, const std::vector<int>& roi_indices,
                const Vec& q, const Mat& U) {
    if (roi_indices.empty()) throw EmptyRoi("j1_score: empty region of interest");
    double acc = 0.0;
    for (int i : roi_indices) {
        const Vec delta = cloud.point(i) - q;
        acc += delta.squaredNorm() - (U.transpose() * delta).squaredNorm();
    }
    return acc / static_cast<double>(roi_indices.size());
}

std::pair<Frame, InitDiagnostics> fit_initial_frame(const PointCloud& cloud, const Vec& r,
                                                    int d, const InitConfig& cfg) {
    const int D = cloud.dim();
    if (r.size() != D) throw DimensionMismatch("query dimension does not match the cloud");
    if (d < 1 || d >= D) throw DimensionMismatch("fit_initial_frame requires 1 <= d < D");
    if (!(cfg.sigma > 0.0) || !(cfg.tau > cfg.sigma))
        throw Error("fit_initial_frame requires 0 < sigma < tau");

    const double roi_radius = std::sqrt(cfg.sigma * cfg.tau);
    std::vector<int> roi = cloud.roi(r, roi_radius);
    if (roi.empty()) throw EmptyRoi("no samples within the region of interest");
    const auto N = static_cast<Eigen::Index>(roi.size());
    if (N < d + 1)
        throw RankDeficient("region of interest holds fewer than d + 1 samples");

    Mat R(N, D);
    for (Eigen::Index t = 0; t < N; ++t)
        R.row(t) = cloud.points().row(roi[static_cast<std::size_t>(t)]);

    Vec w(N);
    if (cfg.weight_scheme == WeightScheme::Gaussian) {
        const double inv = 1.0 / (cfg.sigma * cfg.tau);
        for (Eigen::Index t = 0; t < N; ++t)
            w[t] = std::exp(-(R.row(t).transpose() - r).squaredNorm() * inv);
    } else {
        w.setOnes();
    }
    const Vec centroid = (R.transpose() * w) / w.sum();
    const PcaResult pca = weighted_pca(R, centroid, w, d);

    Mat U = pca.basis;
    Vec q = r;
    InitDiagnostics diag;
    diag.degenerate_spectrum = pca.degenerate_spectrum;
    diag.j1_init = j1_score(cloud, roi, q, U);
    diag.roi = roi;

    const double tol = cfg.resolved_tol();
    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        const Vec q_prev = q;
        Mat Rt = R.rowwise() - q.transpose(); // N x D displacements
        Mat Xt(N, d + 1);
        Xt.col(0).setOnes();
        Xt.rightCols(d) = Rt * U;
        Eigen::ColPivHouseholderQR<Mat> qr;
        qr.setThreshold(1e-10);
        qr.compute(Xt);
        if (qr.rank() < d + 1)
            throw RankDeficient("affine regression over the region of interest is degenerate");
        const Mat alpha = qr.solve(Rt); // (d+1) x D
        const Vec q_tilde = q + alpha.row(0).transpose();
        U = orthonormalize(alpha.bottomRows(d).transpose());
        q = q_tilde + U * (U.transpose() * (r - q_tilde));
        diag.iterations = iter;
        if ((q - q_prev).norm() < tol) {
            diag.converged = true;
            break;
        }
    }

    diag.j1 = j1_score(cloud, roi, q, U);
    diag.constraint_ok = (r - q).norm() < 2.0 * cfg.sigma;
    Frame frame(q, U, complement(U));
    return {std::move(frame), std::move(diag)};
}

} // namespace manproj
