#include "manproj/refine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "manproj/errors.hpp"
#include "manproj/parallel.hpp"
#include "manproj/rng.hpp"

namespace manproj {

double bandwidth(std::size_t n, int k, int d, double c) {
    if (n < 1 || !(c > 0.0)) throw Error("bandwidth requires n >= 1 and c > 0");
    return c * std::pow(static_cast<double>(n), -1.0 / (2.0 * k + d));
}

double kappa_formula_value(std::size_t n, int d, int k, double delta, double alpha1, double C0) {
    const double r1 = (k - 1.0) / (2.0 * k + d);
    const double cbar = 1.0 + std::log2(alpha1 / (12.0 * std::sqrt(static_cast<double>(d)))) -
                        std::log2(C0);
    const double lead = r1 * std::log2(static_cast<double>(n)) + cbar;
    const double inner = std::log(2.0 * lead / delta);
    if (!(inner > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return lead - std::log2(inner);
}

int kappa(std::size_t n, int d, int k, double delta, double alpha1, double C0) {
    if (n < 2 || !(delta > 0.0 && delta < 1.0) || !(alpha1 > 0.0) || !(C0 > 0.0))
        throw Error("kappa requires n >= 2, 0 < delta < 1, alpha1 > 0, C0 > 0");
    const double v = kappa_formula_value(n, d, k, delta, alpha1, C0);
    if (std::isnan(v)) return 1;
    return static_cast<int>(std::ceil(std::max(1.0, v)));
}

StepOutcome refine_step(const PointCloud& cloud, const std::vector<int>& candidates,
                        const Frame& frame, const EstimatorConfig& cfg,
                        bool update_tangent, bool recenter, std::uint64_t fit_seed) {
    const int m = monomial_count(cfg.d, cfg.k - 1);
    const LocalCoords local = local_coords(cloud, candidates, frame);
    double eps = bandwidth(static_cast<std::size_t>(cloud.n()), cfg.k, cfg.d,
                           cfg.bandwidth_const);
    LocalCoords window = bandwidth_filter(local, eps);
    unsigned warnings = 0;
    for (int grow = 0; window.X.rows() < 3 * m && grow < 8; ++grow) {
        eps *= 1.5;
        window = bandwidth_filter(local, eps);
        warnings |= WarnBandwidthExpanded;
    }
    if (window.X.rows() < m)
        throw InsufficientSamples("bandwidth window holds " + std::to_string(window.X.rows()) +
                                  " samples, need " + std::to_string(m));

    FitDiagnostics diag;
    const PolyModel model =
        fit_mom(window.X, window.Y, cfg.k - 1, cfg.blocks, fit_seed, &diag);
    if (diag.ill_conditioned) warnings |= WarnIllConditioned;

    StepOutcome out{frame, value_at_zero(model), differential_at_zero(model), 0.0,
                    static_cast<int>(window.X.rows()), warnings};
    const Mat new_tangent = update_tangent ? graph_tangent(frame, out.dpi0) : frame.tangent;
    const Vec new_origin = recenter ? Vec(frame.origin + frame.normal * out.value0)
                                    : frame.origin;
    out.step_norm = (new_origin - frame.origin).norm();
    out.frame = Frame(new_origin, new_tangent,
                      update_tangent ? complement(new_tangent) : frame.normal);
    return out;
}

StepOutcome refine_step(const PointCloud& cloud, const Frame& frame,
                        const EstimatorConfig& cfg) {
    std::vector<int> all(static_cast<std::size_t>(cloud.n()));
    std::iota(all.begin(), all.end(), 0);
    return refine_step(cloud, all, frame, cfg, true, cfg.mode == Mode::Recenter, cfg.seed);
}

ProjectionResult project(const PointCloud& cloud, const Vec& r, const EstimatorConfig& cfg) {
    const int D = cloud.dim();
    if (cfg.k < 2) throw Error("project requires k >= 2");
    if (cfg.d < 1 || cfg.d >= D) throw DimensionMismatch("project requires 1 <= d < D");

    InitConfig init_cfg;
    init_cfg.sigma = cfg.sigma;
    init_cfg.tau = cfg.tau;
    init_cfg.max_iter = cfg.init_max_iter;
    init_cfg.tol = cfg.init_tol;
    init_cfg.weight_scheme = cfg.weight_scheme;
    auto [init_frame, init_diag] = fit_initial_frame(cloud, r, cfg.d, init_cfg);

    ProjectionResult result;
    if (!init_diag.converged) result.warnings |= WarnNoConvergence;
    if (!init_diag.constraint_ok) result.warnings |= WarnSearchRegion;
    if (init_diag.degenerate_spectrum) result.warnings |= WarnDegenerateSpectrum;
    const std::vector<int>& roi = init_diag.roi;

    auto step_seed = [&](int ell) {
        return Rng(cfg.seed, static_cast<std::uint64_t>(ell)).next_u64();
    };

    if (cfg.mode == Mode::FixedOrigin) {
        // The origin stays pinned at the query; only the tangent rotates.
        Frame frame(r, init_frame.tangent, init_frame.normal);
        const int wanted = kappa(static_cast<std::size_t>(cloud.n()), cfg.d, cfg.k, cfg.delta,
                                 cfg.resolved_alpha1(D), cfg.C0);
        const int budget = std::min(wanted, cfg.max_iter_cap);
        if (budget < wanted) result.warnings |= WarnNoConvergence;
        for (int ell = 0; ell < budget; ++ell) {
            StepOutcome out = refine_step(cloud, roi, frame, cfg, true, false, step_seed(ell));
            result.warnings |= out.warnings;
            result.step_norms.push_back(out.step_norm);
            frame = std::move(out.frame);
        }
        // One further regression over the settled tangent lifts the origin.
        StepOutcome lift = refine_step(cloud, roi, frame, cfg, false, true, step_seed(budget));
        result.warnings |= lift.warnings;
        result.step_norms.push_back(lift.step_norm);
        if (lift.warnings & WarnIllConditioned) {
            result.p_hat = frame.origin;
        } else {
            result.p_hat = lift.frame.origin;
        }
        result.tangent = frame.tangent;
        result.iterations = budget + 1;
        return result;
    }

    // Recentering: an initial origin move at the held tangent, then joint
    // tangent-and-origin sweeps until the origin settles.
    Frame frame = init_frame;
    const double stop = cfg.resolved_stop_tol();
    Vec last_good = frame.origin;
    int regressions = 0;
    bool converged = false;
    bool last_ill = false;

    StepOutcome pre = refine_step(cloud, roi, frame, cfg, false, true, step_seed(0));
    ++regressions;
    result.warnings |= pre.warnings;
    result.step_norms.push_back(pre.step_norm);
    last_ill = (pre.warnings & WarnIllConditioned) != 0;
    if (!last_ill) last_good = pre.frame.origin;
    frame = std::move(pre.frame);

    while (regressions < cfg.max_iter_cap) {
        StepOutcome out =
            refine_step(cloud, roi, frame, cfg, true, true, step_seed(regressions));
        ++regressions;
        result.warnings |= out.warnings;
        result.step_norms.push_back(out.step_norm);
        last_ill = (out.warnings & WarnIllConditioned) != 0;
        if (!last_ill) last_good = out.frame.origin;
        frame = std::move(out.frame);
        if (result.step_norms.back() <= stop) {
            converged = true;
            break;
        }
    }
    if (!converged) result.warnings |= WarnNoConvergence;
    result.p_hat = last_ill ? last_good : frame.origin;
    result.tangent = frame.tangent;
    result.iterations = regressions;
    return result;
}

std::vector<ProjectionResult> project_batch(const PointCloud& cloud, const RowMat& queries,
                                            const EstimatorConfig& cfg) {
    std::vector<ProjectionResult> results(static_cast<std::size_t>(queries.rows()));
    parallel_for(static_cast<std::size_t>(queries.rows()), [&](std::size_t i) {
        results[i] = project(cloud, queries.row(static_cast<Eigen::Index>(i)).transpose(), cfg);
    });
    return results;
}

void save_results_csv(const std::string& path, const std::vector<ProjectionResult>& results,
                      const std::vector<std::string>& comments) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    for (const auto& c : comments) out << '#' << c << '\n';
    if (results.empty()) throw Error("no results to write");
    const auto D = results.front().p_hat.size();
    const auto d = results.front().tangent.cols();
    for (Eigen::Index j = 0; j < D; ++j) out << (j ? ",p" : "p") << j;
    for (Eigen::Index i = 0; i < D; ++i)
        for (Eigen::Index j = 0; j < d; ++j) out << ",t" << i << '_' << j;
    out << ",iterations,warnings\n";
    char buf[32];
    for (const auto& res : results) {
        for (Eigen::Index j = 0; j < D; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", res.p_hat[j]);
            if (j) out << ',';
            out << buf;
        }
        for (Eigen::Index i = 0; i < D; ++i)
            for (Eigen::Index j = 0; j < d; ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", res.tangent(i, j));
                out << ',' << buf;
            }
        out << ',' << res.iterations << ',' << res.warnings << '\n';
    }
    if (!out) throw Error("failed writing '" + path + "'");
}

} // namespace manproj
