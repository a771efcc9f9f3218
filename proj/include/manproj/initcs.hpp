#pragma once

#include <utility>
#include <vector>

#include "manproj/geom.hpp"
#include "manproj/pointset.hpp"
#include "manproj/types.hpp"

namespace manproj {

enum class WeightScheme {
    Gaussian,     // w_i = exp(-||r_i - r||^2 / (sigma * tau)), inside the ROI
    UniformInRoi, // w_i = 1 inside the ROI
};

struct InitConfig {
    double sigma = 0.0;
    double tau = 0.0;
    int max_iter = 100;
    double tol = -1.0; // < 0 selects the default 1e-6 * sigma
    WeightScheme weight_scheme = WeightScheme::Gaussian;

    double resolved_tol() const { return tol >= 0.0 ? tol : 1e-6 * sigma; }
};

struct PcaResult {
    Mat basis;              // D x d, leading directions
    Vec eigenvalues;        // all D eigenvalues, descending
    bool degenerate_spectrum = false; // no eigengap between directions d and d+1
};

// Top-d eigenvectors of sum_i w_i (r_i - center)(r_i - center)^T / sum_i w_i.
// Rows of `points` are the samples. Throws RankDeficient when the covariance
// has numerical rank < d (eigenvalue below 1e-10 of the largest).
PcaResult weighted_pca(const Mat& points, const Vec& center, const Vec& weights, int d);

// (1/N) sum_{i in roi} ||(I - U U^T)(r_i - q)||^2. Throws EmptyRoi.
double j1_score(const PointCloud& cloud, const std::vector<int>& roi_indices,
                const Vec& q, const Mat& U);

struct InitDiagnostics {
    int iterations = 0;
    double j1 = 0.0;        // at the returned frame
    double j1_init = 0.0;   // at the PCA initialization (q = r)
    bool constraint_ok = false; // ||r - q*|| < 2 sigma
    bool converged = false;
    bool degenerate_spectrum = false;
    std::vector<int> roi; // indices used, radius sqrt(sigma * tau)
};

// Fixed-point iteration for the initial frame: weighted-PCA start, then
// alternating affine least-squares over the current tangent coordinates and
// re-centering q = q~ + U U^T (r - q~), which keeps r - q orthogonal to the
// tangent. Stops when ||q - q_prev|| < tol or after max_iter sweeps (the
// frame is still returned, flagged via diagnostics.converged = false).
std::pair<Frame, InitDiagnostics> fit_initial_frame(const PointCloud& cloud, const Vec& r,
                                                    int d, const InitConfig& cfg);

} // namespace manproj
