// Command-line front end: synthetic data generation, projection of query
// points onto a sampled manifold, convergence-rate experiments, and geodesic
// walks. Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manproj/errors.hpp"
#include "manproj/rates.hpp"
#include "manproj/refine.hpp"
#include "manproj/rng.hpp"
#include "manproj/synth.hpp"

namespace {

using namespace manproj;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

struct EstimatorFlags {
    int d = 1;
    int k = 2;
    double sigma = 0.0;
    double tau = 0.0;
    double bandwidth_const = 1.0;
    int blocks = 1;
    std::string mode = "recenter";
    double stop_tol = -1.0;
    int max_iter = 64;
    std::uint64_t seed = 0;

    void add_to(CLI::App* cmd, bool default_fixed_origin = false) {
        if (default_fixed_origin) mode = "fixed-origin";
        cmd->add_option("--d", d, "Manifold dimension")->required()->check(CLI::PositiveNumber);
        cmd->add_option("--k", k, "Smoothness order (fits degree k-1)")
            ->check(CLI::Range(2, 16))
            ->capture_default_str();
        cmd->add_option("--sigma", sigma, "Noise half-width of the sample tube")->required();
        cmd->add_option("--tau", tau, "Lower bound on the manifold reach")->required();
        cmd->add_option("--bandwidth-const", bandwidth_const,
                        "Bandwidth constant c in c * n^(-1/(2k+d))")
            ->capture_default_str();
        cmd->add_option("--blocks", blocks, "Median-of-means block count")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--mode", mode, "Refinement mode")
            ->check(CLI::IsMember({"recenter", "fixed-origin"}))
            ->capture_default_str();
        cmd->add_option("--stop-tol", stop_tol,
                        "Origin-step stopping tolerance (negative selects 1e-3 * sigma)");
        cmd->add_option("--max-iter", max_iter, "Cap on refinement sweeps")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    }

    EstimatorConfig to_config() const {
        EstimatorConfig cfg;
        cfg.d = d;
        cfg.k = k;
        cfg.sigma = sigma;
        cfg.tau = tau;
        cfg.bandwidth_const = bandwidth_const;
        cfg.blocks = blocks;
        cfg.mode = mode == "fixed-origin" ? Mode::FixedOrigin : Mode::Recenter;
        cfg.stop_tol = stop_tol;
        cfg.max_iter_cap = max_iter;
        cfg.seed = seed;
        return cfg;
    }

    std::vector<std::string> comments() const {
        return {"d=" + std::to_string(d),
                "k=" + std::to_string(k),
                "sigma=" + fmt(sigma),
                "tau=" + fmt(tau),
                "bandwidth_const=" + fmt(bandwidth_const),
                "blocks=" + std::to_string(blocks),
                "mode=" + mode,
                "seed=" + std::to_string(seed)};
    }
};

struct GenFlags {
    std::string kind = "circle";
    std::size_t n = 0;
    double sigma = 0.0;
    double R = 10.0;
    int d = 0; // 0 = kind default
    int D = 0; // 0 = kind default
    double extent = 1.0;
    std::string graph_coeffs;
    double box_lo = -1.0, box_hi = 1.0;
    double reach = 0.0;
    std::uint64_t seed = 0;
    std::string out;
};

ManifoldSpec spec_from_flags(const GenFlags& g) {
    if (g.kind == "circle") {
        return ManifoldSpec::make_circle(g.R, g.D > 0 ? g.D : 2);
    }
    if (g.kind == "sphere") {
        const int d = g.d > 0 ? g.d : 2;
        return ManifoldSpec::make_sphere(d, g.R, g.D > 0 ? g.D : d + 1);
    }
    if (g.kind == "affine") {
        const int d = g.d > 0 ? g.d : 2;
        const int D = g.D > 0 ? g.D : d + 1;
        return ManifoldSpec::random_affine(d, D, g.seed, g.extent);
    }
    // poly-graph, one parameter, one graph coordinate per remaining dimension
    const auto coeffs = parse_doubles(g.graph_coeffs);
    if (coeffs.empty())
        throw CLI::ValidationError("--graph-coeffs", "poly-graph needs coefficients");
    if (!(g.reach > 0.0))
        throw CLI::ValidationError("--reach", "poly-graph needs a positive reach bound");
    PolyModel graph;
    graph.d = 1;
    graph.codim = 1;
    graph.degree = static_cast<int>(coeffs.size()) - 1;
    graph.coeffs.resize(static_cast<Eigen::Index>(coeffs.size()), 1);
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        graph.coeffs(static_cast<Eigen::Index>(i), 0) = coeffs[i];
    Vec lo(1), hi(1);
    lo[0] = g.box_lo;
    hi[0] = g.box_hi;
    return ManifoldSpec::make_poly_graph(std::move(graph), std::move(lo), std::move(hi), g.reach);
}

int cmd_gen(const GenFlags& g) {
    const ManifoldSpec spec = spec_from_flags(g);
    const PointCloud cloud = sample_tubular(spec, g.n, g.sigma, g.seed);
    std::vector<std::string> comments = spec.serialize();
    comments.push_back("n=" + std::to_string(g.n));
    comments.push_back("sigma=" + fmt(g.sigma));
    comments.push_back("seed=" + std::to_string(g.seed));
    save_cloud_csv(g.out, cloud, comments);
    std::cout << "wrote " << cloud.n() << " points in R^" << cloud.dim() << " to " << g.out
              << "\n";
    return 0;
}

int cmd_project(const std::string& data, const std::string& queries_path,
                const std::string& out, const EstimatorFlags& flags) {
    const PointCloud cloud = load_cloud_csv(data);
    const PointCloud queries = load_cloud_csv(queries_path);
    if (queries.dim() != cloud.dim())
        throw DimensionMismatch("query dimension " + std::to_string(queries.dim()) +
                                " does not match data dimension " + std::to_string(cloud.dim()));
    const EstimatorConfig cfg = flags.to_config();
    const auto results = project_batch(cloud, queries.points(), cfg);
    auto comments = flags.comments();
    comments.insert(comments.begin(), "data=" + data);
    save_results_csv(out, results, comments);
    std::cout << "projected " << results.size() << " queries to " << out << "\n";
    return 0;
}

int cmd_rates(const GenFlags& g, const EstimatorFlags& flags, const std::string& n_grid_csv,
              int seeds, int queries, const std::string& out) {
    RatesConfig cfg;
    cfg.spec = spec_from_flags(g);
    for (double v : parse_doubles(n_grid_csv)) cfg.n_grid.push_back(static_cast<std::size_t>(v));
    cfg.seeds = seeds;
    cfg.queries = queries;
    cfg.est = flags.to_config();
    cfg.base_seed = flags.seed;
    const RatesReport report = run_rates(cfg);
    auto comments = cfg.spec.serialize();
    for (const auto& c : flags.comments()) comments.push_back(c);
    comments.push_back("seeds=" + std::to_string(seeds));
    comments.push_back("queries=" + std::to_string(queries));
    save_rates_csv(out, report, comments);
    std::cout << "slope_dist=" << fmt(report.slope_dist) << " stderr=" << fmt(report.stderr_dist)
              << "\n"
              << "slope_angle=" << fmt(report.slope_angle)
              << " stderr=" << fmt(report.stderr_angle) << "\n"
              << "wrote " << report.rows.size() << " rows to " << out << "\n";
    return 0;
}

int cmd_geodesic(const std::string& data, const std::string& x0_csv, const std::string& v0_csv,
                 double eps, int steps, const std::string& out, const EstimatorFlags& flags) {
    const PointCloud cloud = load_cloud_csv(data);
    const auto x0v = parse_doubles(x0_csv);
    const auto v0v = parse_doubles(v0_csv);
    if (static_cast<int>(x0v.size()) != cloud.dim())
        throw CLI::ValidationError("--x0", "needs one coordinate per ambient dimension");
    const EstimatorConfig cfg = flags.to_config();
    if (static_cast<int>(v0v.size()) != flags.d && static_cast<int>(v0v.size()) != cloud.dim())
        throw CLI::ValidationError("--v0", "length must be d (tangent) or D (ambient)");
    bool all_zero = true;
    for (double v : v0v) all_zero = all_zero && v == 0.0;
    if (all_zero) throw CLI::ValidationError("--v0", "velocity must be nonzero");

    Vec x0(cloud.dim());
    for (int i = 0; i < cloud.dim(); ++i) x0[i] = x0v[static_cast<std::size_t>(i)];

    ProjectFn fn = [&](const Vec& p) {
        const ProjectionResult res = project(cloud, p, cfg);
        return std::make_pair(res.p_hat, res.tangent);
    };

    Vec v0(flags.d);
    if (static_cast<int>(v0v.size()) == flags.d) {
        for (int i = 0; i < flags.d; ++i) v0[i] = v0v[static_cast<std::size_t>(i)];
    } else {
        // Ambient velocity: take coefficients against the starting tangent.
        const auto [p0, T0] = fn(x0);
        Vec amb(cloud.dim());
        for (int i = 0; i < cloud.dim(); ++i) amb[i] = v0v[static_cast<std::size_t>(i)];
        v0 = T0.transpose() * amb;
    }

    const GeodesicResult walk = geodesic_walk(fn, x0, v0, eps, steps);

    std::ofstream file(out);
    if (!file) throw Error("cannot open '" + out + "' for writing");
    file << "#data=" << data << "\n#eps=" << fmt(eps) << "\n#steps=" << steps << '\n';
    for (const auto& c : flags.comments()) file << '#' << c << '\n';
    file << "step";
    for (int j = 0; j < cloud.dim(); ++j) file << ",x" << j;
    for (int j = 0; j < cloud.dim(); ++j) file << ",v" << j;
    file << '\n';
    for (std::size_t i = 0; i < walk.points.size(); ++i) {
        file << i;
        for (int j = 0; j < cloud.dim(); ++j) file << ',' << fmt(walk.points[i][j]);
        for (int j = 0; j < cloud.dim(); ++j) file << ',' << fmt(walk.velocities[i][j]);
        file << '\n';
    }
    if (!file) throw Error("failed writing '" + out + "'");
    std::cout << "wrote " << walk.points.size() << " trajectory points to " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Estimates projections onto an unknown manifold sampled with tubular noise"};
    app.require_subcommand(1);

    GenFlags gen;
    auto* cgen = app.add_subcommand("gen", "Generate a synthetic tubular sample");
    cgen->add_option("--kind", gen.kind, "Manifold family")
        ->check(CLI::IsMember({"circle", "sphere", "affine", "poly-graph"}))
        ->capture_default_str();
    cgen->add_option("--n", gen.n, "Number of samples")->required()->check(CLI::PositiveNumber);
    cgen->add_option("--sigma", gen.sigma, "Tube half-width")->required();
    cgen->add_option("--R", gen.R, "Circle/sphere radius")->capture_default_str();
    cgen->add_option("--d", gen.d, "Manifold dimension (kind default when omitted)");
    cgen->add_option("--D", gen.D, "Ambient dimension (kind default when omitted)");
    cgen->add_option("--extent", gen.extent, "Affine parameter half-width")
        ->capture_default_str();
    cgen->add_option("--graph-coeffs", gen.graph_coeffs,
                     "Poly-graph coefficients, constant first (d = 1)");
    cgen->add_option("--box-lo", gen.box_lo, "Poly-graph domain lower bound")
        ->capture_default_str();
    cgen->add_option("--box-hi", gen.box_hi, "Poly-graph domain upper bound")
        ->capture_default_str();
    cgen->add_option("--reach", gen.reach, "Poly-graph reach lower bound");
    cgen->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    cgen->add_option("--out", gen.out, "Output CSV path")->required();

    std::string project_data, project_queries, project_out;
    EstimatorFlags project_flags;
    auto* cproj = app.add_subcommand("project", "Project query points onto the sampled manifold");
    cproj->add_option("--data", project_data, "Sample cloud CSV")->required();
    cproj->add_option("--queries", project_queries, "Query points CSV")->required();
    cproj->add_option("--out", project_out, "Output results CSV")->required();
    project_flags.add_to(cproj);

    GenFlags rates_gen;
    EstimatorFlags rates_flags;
    std::string rates_grid = "1000,2000,4000,8000,16000,32000,64000";
    int rates_seeds = 20, rates_queries = 25;
    std::string rates_out;
    auto* crates = app.add_subcommand("rates", "Empirical convergence-rate experiment");
    crates->add_option("--kind", rates_gen.kind, "Manifold family")
        ->check(CLI::IsMember({"circle", "sphere", "affine", "poly-graph"}))
        ->capture_default_str();
    crates->add_option("--R", rates_gen.R, "Circle/sphere radius")->capture_default_str();
    crates->add_option("--D", rates_gen.D, "Ambient dimension (kind default when omitted)");
    crates->add_option("--extent", rates_gen.extent, "Affine parameter half-width")
        ->capture_default_str();
    crates->add_option("--n-grid", rates_grid, "Comma-separated sample counts")
        ->capture_default_str();
    crates->add_option("--seeds", rates_seeds, "Clouds per sample count")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    crates->add_option("--queries", rates_queries, "Queries per cloud")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    crates->add_option("--out", rates_out, "Output CSV path")->required();
    rates_flags.add_to(crates, /*default_fixed_origin=*/true);

    std::string geo_data, geo_x0, geo_v0, geo_out;
    double geo_eps = 0.5;
    int geo_steps = 30;
    EstimatorFlags geo_flags;
    auto* cgeo = app.add_subcommand("geodesic", "Walk a discrete geodesic on the estimate");
    cgeo->add_option("--data", geo_data, "Sample cloud CSV")->required();
    cgeo->add_option("--x0", geo_x0, "Start point, comma-separated")->required();
    cgeo->add_option("--v0", geo_v0,
                     "Initial velocity: d tangent coefficients or D ambient components")
        ->required();
    cgeo->add_option("--eps", geo_eps, "Step length")->capture_default_str();
    cgeo->add_option("--steps", geo_steps, "Number of steps")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cgeo->add_option("--out", geo_out, "Output trajectory CSV")->required();
    geo_flags.add_to(cgeo);

    try {
        app.parse(argc, argv);
        if (cgen->parsed()) return cmd_gen(gen);
        if (cproj->parsed())
            return cmd_project(project_data, project_queries, project_out, project_flags);
        if (crates->parsed())
            return cmd_rates(rates_gen, rates_flags, rates_grid, rates_seeds, rates_queries,
                             rates_out);
        if (cgeo->parsed())
            return cmd_geodesic(geo_data, geo_x0, geo_v0, geo_eps, geo_steps, geo_out, geo_flags);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const manproj::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
