// Acceptance gate: eight end-to-end criteria, one printed PASS/FAIL line
// each. The process exits nonzero when any criterion fails. All thresholds
// are pinned here as named constants.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "manproj/geom.hpp"
#include "manproj/polyfit.hpp"
#include "manproj/rates.hpp"
#include "manproj/refine.hpp"
#include "manproj/rng.hpp"
#include "manproj/synth.hpp"

using namespace manproj;
using Clock = std::chrono::steady_clock;

namespace {

struct Check {
    bool pass = true;
    std::ostringstream detail;

    template <typename T>
    void require(bool ok, const char* what, const T& got) {
        if (!ok) {
            pass = false;
            if (detail.tellp() > 0) detail << "; ";
            detail << what << " (got " << got << ")";
        }
    }
    void note(const std::string& s) {
        if (detail.tellp() > 0) detail << "; ";
        detail << s;
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile95(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t idx =
        static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size()))) - 1;
    return v[std::min(idx, v.size() - 1)];
}

// ---------------------------------------------------------------------------
// 1. Flat-manifold exactness: d=2, D=5, n=2000, sigma=1e-6; 20 queries offset
//    normally by up to 0.5 must project back within 1e-4 in position and
//    angle. Runtime under 5 s.
Check criterion1() {
    Check c;
    const auto t0 = Clock::now();

    const ManifoldSpec spec = ManifoldSpec::random_affine(2, 5, 42, 1.0);
    const double sigma = 1e-6;
    const PointCloud cloud = sample_tubular(spec, 2000, sigma, 43);
    const Mat V = complement(spec.basis);

    EstimatorConfig cfg;
    cfg.d = 2;
    cfg.k = 2;
    cfg.sigma = sigma;
    cfg.tau = 1e6; // flat manifold: any large finite reach bound works
    Rng rng(44);
    double worst_dist = 0.0, worst_angle = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Vec on = spec.offset + rng.uniform(-0.5, 0.5) * spec.basis.col(0) +
                       rng.uniform(-0.5, 0.5) * spec.basis.col(1);
        const Vec normal_dir = V * rng.unit_vector(3);
        const Vec r = on + rng.uniform(0.0, 0.5) * normal_dir;

        const ProjectionResult res = project(cloud, r, cfg);
        const Vec exact = oracle_project(spec, r);
        worst_dist = std::max(worst_dist, (res.p_hat - exact).norm());
        worst_angle = std::max(worst_angle, angle_max(res.tangent, spec.basis));
    }
    const double elapsed = seconds_since(t0);
    c.require(worst_dist <= 1e-4, "worst position error <= 1e-4", worst_dist);
    c.require(worst_angle <= 1e-4, "worst angle error <= 1e-4", worst_angle);
    c.require(elapsed < 5.0, "runtime < 5 s", elapsed);
    c.note("max dist " + std::to_string(worst_dist) + ", max angle " +
           std::to_string(worst_angle) + ", " + std::to_string(elapsed) + " s");
    return c;
}

// ---------------------------------------------------------------------------
// 2. Circle demo (R=10, n=5000, sigma=0.1): over 50
//    tube queries, median distance to the circle <= sigma/3, 95th percentile
//    <= sigma, median tangent angle error <= 0.05 rad. Runtime under 30 s.
Check criterion2() {
    Check c;
    const auto t0 = Clock::now();

    const double R = 10.0, sigma = 0.1;
    const ManifoldSpec spec = ManifoldSpec::make_circle(R, 2);
    const PointCloud cloud = sample_tubular(spec, 5000, sigma, 52);
    const PointCloud queries = sample_tubular(spec, 50, sigma, 53);

    EstimatorConfig cfg;
    cfg.d = 1;
    cfg.k = 2;
    cfg.sigma = sigma;
    cfg.tau = R;
    cfg.bandwidth_const = 2.0;

    std::vector<double> dists, angles;
    for (int i = 0; i < queries.n(); ++i) {
        const Vec r = queries.point(i);
        const ProjectionResult res = project(cloud, r, cfg);
        dists.push_back(oracle_distance(spec, res.p_hat));
        const Mat truth = oracle_tangent(spec, oracle_project(spec, r));
        angles.push_back(angle_max(res.tangent, truth));
    }
    const double med_d = median(dists), p95_d = percentile95(dists), med_a = median(angles);
    const double elapsed = seconds_since(t0);
    c.require(med_d <= sigma / 3.0, "median dist <= sigma/3", med_d);
    c.require(p95_d <= sigma, "p95 dist <= sigma", p95_d);
    c.require(med_a <= 0.05, "median angle <= 0.05 rad", med_a);
    c.require(elapsed < 30.0, "runtime < 30 s", elapsed);
    c.note("median dist " + std::to_string(med_d) + ", p95 " + std::to_string(p95_d) +
           ", median angle " + std::to_string(med_a) + ", " + std::to_string(elapsed) + " s");
    return c;
}

// ---------------------------------------------------------------------------
// 3. Convergence rates on the circle at k=2, d=1 (theory: distance slope
//    -0.4, angle slope -0.2): fixed-origin mode with the budget formula,
//    n from 1000 to 64000, 20 seeds, 25 queries per cell. The fitted log-log
//    slopes must land in [-0.55, -0.25] and [-0.35, -0.05]. Runtime < 10 min.
Check criterion3() {
    Check c;
    const auto t0 = Clock::now();

    RatesConfig cfg;
    cfg.spec = ManifoldSpec::make_circle(10.0, 2);
    cfg.n_grid = {1000, 2000, 4000, 8000, 16000, 32000, 64000};
    cfg.seeds = 20;
    cfg.queries = 25;
    cfg.est.d = 1;
    cfg.est.k = 2;
    cfg.est.sigma = 0.1;
    cfg.est.tau = 10.0;
    cfg.est.bandwidth_const = 2.0;
    cfg.est.mode = Mode::FixedOrigin;
    cfg.base_seed = 7;

    const RatesReport report = run_rates(cfg);
    const double elapsed = seconds_since(t0);
    c.require(report.slope_dist >= -0.55 && report.slope_dist <= -0.25,
              "distance slope in [-0.55, -0.25]", report.slope_dist);
    c.require(report.slope_angle >= -0.35 && report.slope_angle <= -0.05,
              "angle slope in [-0.35, -0.05]", report.slope_angle);
    c.require(elapsed < 600.0, "runtime < 10 min", elapsed);
    c.note("slope_dist " + std::to_string(report.slope_dist) + ", slope_angle " +
           std::to_string(report.slope_angle) + ", " + std::to_string(elapsed) + " s");
    return c;
}

// ---------------------------------------------------------------------------
// 4. Denoising on the sphere S^2 (R=5, sigma=0.2, n=20000): among 100 tube
//    queries that start at least sigma/2 from the sphere, at least 90% must
//    end up closer than they started.
Check criterion4() {
    Check c;
    const double R = 5.0, sigma = 0.2;
    const ManifoldSpec spec = ManifoldSpec::make_sphere(2, R, 3);
    const PointCloud cloud = sample_tubular(spec, 20000, sigma, 62);
    const PointCloud queries = sample_tubular(spec, 100, sigma, 63);

    EstimatorConfig cfg;
    cfg.d = 2;
    cfg.k = 2;
    cfg.sigma = sigma;
    cfg.tau = R;
    cfg.bandwidth_const = 2.0;

    int eligible = 0, improved = 0;
    for (int i = 0; i < queries.n(); ++i) {
        const Vec r = queries.point(i);
        const double before = oracle_distance(spec, r);
        if (before < sigma / 2.0) continue;
        ++eligible;
        const ProjectionResult res = project(cloud, r, cfg);
        if (oracle_distance(spec, res.p_hat) < before) ++improved;
    }
    c.require(eligible >= 30, "enough off-manifold queries", eligible);
    c.require(improved * 10 >= eligible * 9, ">= 90% improved", improved);
    c.note(std::to_string(improved) + "/" + std::to_string(eligible) + " improved");
    return c;
}

// ---------------------------------------------------------------------------
// 5. Oracle equivalence: the regression value/differential at zero matches an
//    independent normal-equations solve on 50 random instances within 1e-9;
//    single-block median-of-means matches plain least squares within 1e-12;
//    largest principal angles match a grid-search oracle within 2e-3 rad.
Check criterion5() {
    Check c;
    double worst_fit = 0.0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        Rng rng(7000 + t);
        const int d = 1 + static_cast<int>(rng.bounded(3));
        const int degree = 1 + static_cast<int>(rng.bounded(3));
        const int codim = 1 + static_cast<int>(rng.bounded(2));
        const int n = 200;
        Mat X(n, d), Y(n, codim);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < d; ++j) X(i, j) = rng.uniform(-1.0, 1.0);
            for (int j = 0; j < codim; ++j) Y(i, j) = rng.uniform(-1.0, 1.0);
        }
        const PolyModel fit = fit_ls(X, Y, degree);
        const int m = monomial_count(d, degree);
        Mat A(n, m);
        for (int i = 0; i < n; ++i)
            A.row(i) = monomials(d, degree, X.row(i).transpose()).transpose();
        const Mat ref = (A.transpose() * A).ldlt().solve(A.transpose() * Y);
        worst_fit = std::max(worst_fit,
                             (value_at_zero(fit) - ref.row(0).transpose()).cwiseAbs().maxCoeff());
        worst_fit = std::max(worst_fit, (differential_at_zero(fit) -
                                         Mat(ref.middleRows(1, d).transpose()))
                                            .cwiseAbs()
                                            .maxCoeff());

        const PolyModel one_block = fit_mom(X, Y, degree, 1, t);
        const double mom_gap = (one_block.coeffs - fit.coeffs).cwiseAbs().maxCoeff();
        c.require(mom_gap <= 1e-12, "single-block median == least squares", mom_gap);
    }
    c.require(worst_fit <= 1e-9, "fit vs normal equations <= 1e-9", worst_fit);

    double worst_angle = 0.0;
    for (std::uint64_t t = 0; t < 5; ++t) {
        Rng rng(8000 + t);
        Mat A(4, 2), B(4, 2);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 2; ++j) {
                A(i, j) = rng.normal();
                B(i, j) = rng.normal();
            }
        const Mat U = orthonormalize(A), W = orthonormalize(B);
        const double got = angle_max(U, W);
        double grid = 0.0;
        for (double s = 0.0; s < M_PI; s += 5e-4) {
            const Vec u = std::cos(s) * U.col(0) + std::sin(s) * U.col(1);
            grid = std::max(grid, std::acos(std::min(1.0, (W.transpose() * u).norm())));
        }
        worst_angle = std::max(worst_angle, std::abs(got - grid));
    }
    c.require(worst_angle <= 2e-3, "principal angle vs grid search <= 2e-3", worst_angle);
    c.note("fit gap " + std::to_string(worst_fit) + ", angle gap " +
           std::to_string(worst_angle));
    return c;
}

// ---------------------------------------------------------------------------
// 6. Equivariance: over 10 random transforms, rigid motions move the estimate
//    exactly (1e-7 tolerances) and power-of-two scalings scale it (1e-8).
Check criterion6() {
    Check c;
    const double R = 6.0, sigma = 0.06;
    const ManifoldSpec spec = ManifoldSpec::make_circle(R, 2);
    const PointCloud cloud = sample_tubular(spec, 3000, sigma, 72);

    EstimatorConfig cfg;
    cfg.d = 1;
    cfg.k = 2;
    cfg.sigma = sigma;
    cfg.tau = R;

    Rng rng(73);
    double worst_rigid_p = 0.0, worst_rigid_a = 0.0;
    double worst_scale_p = 0.0, worst_scale_a = 0.0;
    for (int t = 0; t < 10; ++t) {
        Vec r(2);
        const double th = rng.uniform(0.0, 2.0 * M_PI);
        r << (R + rng.uniform(-sigma, sigma)) * std::cos(th),
            (R + rng.uniform(-sigma, sigma)) * std::sin(th);
        const ProjectionResult base = project(cloud, r, cfg);

        // Rigid motion.
        const double ang = rng.uniform(0.0, 2.0 * M_PI);
        Mat Q(2, 2);
        Q << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);
        Vec shift(2);
        shift << rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0);
        RowMat moved(cloud.n(), 2);
        for (int i = 0; i < cloud.n(); ++i)
            moved.row(i) = (Q * cloud.point(i) + shift).transpose();
        const ProjectionResult rigid = project(PointCloud(moved), Q * r + shift, cfg);
        worst_rigid_p =
            std::max(worst_rigid_p, (rigid.p_hat - (Q * base.p_hat + shift)).norm() / cfg.tau);
        worst_rigid_a = std::max(worst_rigid_a, angle_max(rigid.tangent, Q * base.tangent));

        // Scaling by a power of two (exact in binary floating point).
        const double s = std::ldexp(1.0, static_cast<int>(rng.bounded(7)) - 3); // 1/8 .. 8
        EstimatorConfig scfg = cfg;
        scfg.sigma = s * cfg.sigma;
        scfg.tau = s * cfg.tau;
        scfg.bandwidth_const = s * cfg.bandwidth_const; // the constant is a length
        const ProjectionResult scaled = project(PointCloud(RowMat(cloud.points() * s)),
                                                s * r, scfg);
        worst_scale_p =
            std::max(worst_scale_p, (scaled.p_hat - s * base.p_hat).norm() / (s * cfg.tau));
        worst_scale_a = std::max(worst_scale_a, angle_max(scaled.tangent, base.tangent));
    }
    c.require(worst_rigid_p <= 1e-7, "rigid position gap <= 1e-7 tau", worst_rigid_p);
    c.require(worst_rigid_a <= 1e-7, "rigid angle gap <= 1e-7", worst_rigid_a);
    c.require(worst_scale_p <= 1e-8, "scale position gap <= 1e-8 s*tau", worst_scale_p);
    c.require(worst_scale_a <= 1e-8, "scale angle gap <= 1e-8", worst_scale_a);
    c.note("rigid " + std::to_string(worst_rigid_p) + "/" + std::to_string(worst_rigid_a) +
           ", scale " + std::to_string(worst_scale_p) + "/" + std::to_string(worst_scale_a));
    return c;
}

// ---------------------------------------------------------------------------
// 7. Geodesic walk on the estimated circle (R=10, eps=0.5, 30 steps): the
//    cumulative central angle must be within 5% of 1.5 rad and every
//    trajectory point within sigma of the circle.
Check criterion7() {
    Check c;
    const double R = 10.0, sigma = 0.1;
    const ManifoldSpec spec = ManifoldSpec::make_circle(R, 2);
    const PointCloud cloud = sample_tubular(spec, 5000, sigma, 82);

    EstimatorConfig cfg;
    cfg.d = 1;
    cfg.k = 2;
    cfg.sigma = sigma;
    cfg.tau = R;
    cfg.bandwidth_const = 2.0;
    ProjectFn fn = [&](const Vec& p) {
        const ProjectionResult res = project(cloud, p, cfg);
        return std::make_pair(res.p_hat, res.tangent);
    };

    Vec x0(2);
    x0 << R, 0.0;
    Vec v0(1);
    v0 << 1.0;
    const GeodesicResult walk = geodesic_walk(fn, x0, v0, 0.5, 30);

    double cum = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < walk.points.size(); ++i) {
        worst = std::max(worst, oracle_distance(spec, walk.points[i]));
        if (i > 0) {
            const Vec& a = walk.points[i - 1];
            const Vec& b = walk.points[i];
            cum += std::acos(
                std::min(1.0, std::max(-1.0, a.dot(b) / (a.norm() * b.norm()))));
        }
    }
    c.require(std::abs(cum - 1.5) <= 0.075, "cumulative angle within 5% of 1.5 rad", cum);
    c.require(worst <= sigma, "every point within sigma of the circle", worst);
    c.note("cumulative angle " + std::to_string(cum) + ", worst dist " +
           std::to_string(worst));
    return c;
}

// ---------------------------------------------------------------------------
// 8. CLI determinism: every subcommand produces byte-identical output across
//    two runs with the same seed.
std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Check criterion8() {
    Check c;
    const std::string bin = MANPROJ_CLI_PATH;
    const std::string dir = "/tmp/manproj_acceptance";
    std::filesystem::create_directories(dir);
    auto sh = [&](const std::string& args) {
        const std::string cmd = bin + " " + args + " >/dev/null 2>&1";
        return std::system(cmd.c_str()) == 0;
    };

    bool ok = true;
    ok = ok && sh("gen --kind circle --n 1500 --sigma 0.1 --seed 4 --out " + dir + "/a1.csv");
    ok = ok && sh("gen --kind circle --n 1500 --sigma 0.1 --seed 4 --out " + dir + "/a2.csv");
    ok = ok && sh("gen --kind circle --n 30 --sigma 0.1 --seed 5 --out " + dir + "/q.csv");
    ok = ok && sh("project --data " + dir + "/a1.csv --queries " + dir + "/q.csv --d 1 --k 2 "
                  "--sigma 0.1 --tau 10 --bandwidth-const 2 --seed 6 --out " + dir + "/p1.csv");
    ok = ok && sh("project --data " + dir + "/a1.csv --queries " + dir + "/q.csv --d 1 --k 2 "
                  "--sigma 0.1 --tau 10 --bandwidth-const 2 --seed 6 --out " + dir + "/p2.csv");
    ok = ok && sh("rates --kind circle --n-grid 300,450,600,900 --seeds 1 --queries 2 --d 1 "
                  "--k 2 --sigma 0.1 --tau 10 --bandwidth-const 2 --out " + dir + "/r1.csv");
    ok = ok && sh("rates --kind circle --n-grid 300,450,600,900 --seeds 1 --queries 2 --d 1 "
                  "--k 2 --sigma 0.1 --tau 10 --bandwidth-const 2 --out " + dir + "/r2.csv");
    ok = ok && sh("geodesic --data " + dir + "/a1.csv --x0 10,0 --v0 1 --eps 0.5 --steps 6 "
                  "--d 1 --k 2 --sigma 0.1 --tau 10 --bandwidth-const 2 --out " + dir +
                  "/w1.csv");
    ok = ok && sh("geodesic --data " + dir + "/a1.csv --x0 10,0 --v0 1 --eps 0.5 --steps 6 "
                  "--d 1 --k 2 --sigma 0.1 --tau 10 --bandwidth-const 2 --out " + dir +
                  "/w2.csv");
    c.require(ok, "all CLI invocations succeed", ok);
    if (ok) {
        c.require(slurp(dir + "/a1.csv") == slurp(dir + "/a2.csv"), "gen deterministic", "diff");
        c.require(slurp(dir + "/p1.csv") == slurp(dir + "/p2.csv"), "project deterministic",
                  "diff");
        c.require(slurp(dir + "/r1.csv") == slurp(dir + "/r2.csv"), "rates deterministic",
                  "diff");
        c.require(slurp(dir + "/w1.csv") == slurp(dir + "/w2.csv"), "geodesic deterministic",
                  "diff");
    }
    return c;
}

} // namespace

int main() {
    struct Row {
        int id;
        const char* name;
        Check (*fn)();
    };
    const Row rows[] = {
        {1, "flat-manifold exactness", criterion1},
        {2, "circle demo accuracy", criterion2},
        {3, "convergence-rate slopes", criterion3},
        {4, "sphere denoising", criterion4},
        {5, "oracle equivalence", criterion5},
        {6, "equivariance", criterion6},
        {7, "geodesic walk", criterion7},
        {8, "CLI determinism", criterion8},
    };
    int failures = 0;
    for (const Row& row : rows) {
        Check c;
        try {
            c = row.fn();
        } catch (const std::exception& e) {
            c.pass = false;
            c.note(std::string("exception: ") + e.what());
        }
        if (!c.pass) ++failures;
        std::cout << "ACCEPTANCE " << row.id << " [" << row.name << "]: "
                  << (c.pass ? "PASS" : "FAIL");
        const std::string detail = c.detail.str();
        if (!detail.empty()) std::cout << "  -- " << detail;
        std::cout << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
