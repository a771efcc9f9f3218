#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "manproj/geom.hpp"
#include "manproj/initcs.hpp"
#include "manproj/pointset.hpp"
#include "manproj/polyfit.hpp"
#include "manproj/types.hpp"

namespace manproj {

enum class Mode {
    Recenter,    // move the origin by the fitted value each sweep, stop on step norm
    FixedOrigin, // keep the origin at the query; run the iteration-budget count of sweeps
};

// Bitmask reported in ProjectionResult::warnings.
enum Warning : unsigned {
    WarnNoConvergence = 1u,       // an iteration cap was hit before the stop rule
    WarnSearchRegion = 2u,        // initial origin landed outside ||r - q|| < 2 sigma
    WarnIllConditioned = 4u,      // a regression hit condition number > 1e12
    WarnBandwidthExpanded = 8u,   // the bandwidth had to be widened to gather samples
    WarnDegenerateSpectrum = 16u, // no eigengap at the PCA initialization
};

struct EstimatorConfig {
    int d = 1;
    int k = 2;
    double sigma = 0.0;
    double tau = 0.0;
    double bandwidth_const = 1.0; // data units: the bandwidth at n = 1
    int blocks = 1;               // median-of-means block count
    Mode mode = Mode::Recenter;
    double stop_tol = -1.0;  // < 0 selects 1e-3 * sigma
    int max_iter_cap = 64;
    double C0 = 1.0;         // iteration-budget constant
    double alpha1 = -1.0;    // < 0 selects 1/sqrt(D)
    double delta = 1e-2;     // iteration-budget failure probability
    WeightScheme weight_scheme = WeightScheme::Gaussian;
    int init_max_iter = 100;
    double init_tol = -1.0;  // < 0 selects 1e-6 * sigma
    std::uint64_t seed = 0;  // drives median-of-means block shuffling only

    double resolved_stop_tol() const { return stop_tol >= 0.0 ? stop_tol : 1e-3 * sigma; }
    double resolved_alpha1(int D) const {
        return alpha1 > 0.0 ? alpha1 : 1.0 / std::sqrt(static_cast<double>(D));
    }
};

struct ProjectionResult {
    Vec p_hat;
    Mat tangent;             // D x d orthonormal
    int iterations = 0;      // number of local regressions performed
    std::vector<double> step_norms; // ||q_{l+1} - q_l|| per regression
    unsigned warnings = 0;
};

// Bandwidth schedule epsilon_n = c * n^(-1/(2k+d)).
double bandwidth(std::size_t n, int k, int d, double c);

// Pre-rounding value of the iteration-budget formula:
// r1*log2(n) + Cbar - log2(ln((2*r1*log2(n) + 2*Cbar)/delta)) with
// r1 = (k-1)/(2k+d) and Cbar = 1 + log2(alpha1/(12*sqrt(d))) - log2(C0).
// NaN when the inner logarithm has no valid argument.
double kappa_formula_value(std::size_t n, int d, int k, double delta, double alpha1, double C0);

// Iteration budget: ceil(max(1, formula)), clamped to 1 when the formula is
// undefined for small n.
int kappa(std::size_t n, int d, int k, double delta, double alpha1, double C0);

struct StepOutcome {
    Frame frame;
    Vec value0;        // fitted value at 0, normal coordinates of the old frame
    Mat dpi0;          // fitted differential at 0
    double step_norm = 0.0;
    int samples_used = 0;
    unsigned warnings = 0;
};

// One refinement sweep over the current frame: local coordinates of the
// candidate points, bandwidth filter (widened by 1.5x up to 8 times while
// fewer than 3m samples survive), median-of-means polynomial fit, then the
// requested combination of tangent rotation and origin recentering.
StepOutcome refine_step(const PointCloud& cloud, const std::vector<int>& candidates,
                        const Frame& frame, const EstimatorConfig& cfg,
                        bool update_tangent, bool recenter, std::uint64_t fit_seed);

// Convenience overload considering every point a candidate.
StepOutcome refine_step(const PointCloud& cloud, const Frame& frame,
                        const EstimatorConfig& cfg);

// Full two-step estimate of the projection of r onto the sampled manifold and
// of the tangent space there.
ProjectionResult project(const PointCloud& cloud, const Vec& r, const EstimatorConfig& cfg);

// One result per row of `queries`; rows are processed independently (possibly
// on several threads) and collected by index, so the output is deterministic.
std::vector<ProjectionResult> project_batch(const PointCloud& cloud, const RowMat& queries,
                                            const EstimatorConfig& cfg);

// One CSV row per result: p_hat coordinates, the tangent basis flattened
// row-major, the iteration count, and the warnings bitmask.
void save_results_csv(const std::string& path, const std::vector<ProjectionResult>& results,
                      const std::vector<std::string>& comments = {});

} // namespace manproj
