#include "manproj/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "manproj/errors.hpp"
#include "manproj/parallel.hpp"
#include "manproj/rng.hpp"

namespace manproj {

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

// Ordinary least squares of y against x; returns (slope, standard error).
std::pair<double, double> ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto N = static_cast<double>(x.size());
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= N;
    ym /= N;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    const double slope = sxy / sxx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - ym - slope * (x[i] - xm);
        sse += e * e;
    }
    const double se = std::sqrt(sse / (N - 2.0) / sxx);
    return {slope, se};
}

} // namespace

RatesReport run_rates(const RatesConfig& cfg) {
    if (cfg.n_grid.size() < 4)
        throw Error("rate experiments need at least 4 sample counts");
    for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
        if (cfg.n_grid[i] <= cfg.n_grid[i - 1])
            throw Error("sample counts must be strictly increasing");
    if (cfg.seeds < 1 || cfg.queries < 1)
        throw Error("rate experiments need seeds >= 1 and queries >= 1");

    const std::size_t cells = cfg.n_grid.size() * static_cast<std::size_t>(cfg.seeds);
    RatesReport report;
    report.rows.resize(cells);

    parallel_for(cells, [&](std::size_t cell) {
        const std::size_t n = cfg.n_grid[cell / static_cast<std::size_t>(cfg.seeds)];
        const std::uint64_t seed = cell % static_cast<std::size_t>(cfg.seeds);
        const std::uint64_t cloud_seed = Rng(cfg.base_seed, 2 * cell).next_u64();
        const std::uint64_t query_seed = Rng(cfg.base_seed, 2 * cell + 1).next_u64();
        const PointCloud cloud = sample_tubular(cfg.spec, n, cfg.est.sigma, cloud_seed);
        const PointCloud queries = sample_tubular(cfg.spec, static_cast<std::size_t>(cfg.queries),
                                                  cfg.est.sigma, query_seed);
        std::vector<double> dists, angles;
        dists.reserve(static_cast<std::size_t>(cfg.queries));
        angles.reserve(static_cast<std::size_t>(cfg.queries));
        for (int qidx = 0; qidx < cfg.queries; ++qidx) {
            const Vec r = queries.point(qidx);
            const ProjectionResult res = project(cloud, r, cfg.est);
            dists.push_back(oracle_distance(cfg.spec, res.p_hat));
            const Mat truth = oracle_tangent(cfg.spec, oracle_project(cfg.spec, r));
            angles.push_back(angle_max(res.tangent, truth));
        }
        report.rows[cell] = {n, seed, median(std::move(dists)), median(std::move(angles))};
    });

    std::vector<double> lx, ld, la;
    for (const auto& row : report.rows) {
        lx.push_back(std::log(static_cast<double>(row.n)));
        ld.push_back(std::log(row.median_dist));
        la.push_back(std::log(row.median_angle));
    }
    std::tie(report.slope_dist, report.stderr_dist) = ols_slope(lx, ld);
    std::tie(report.slope_angle, report.stderr_angle) = ols_slope(lx, la);
    return report;
}

void save_rates_csv(const std::string& path, const RatesReport& report,
                    const std::vector<std::string>& extra_comments) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    char buf[32];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& c : extra_comments) out << '#' << c << '\n';
    out << "#slope_dist=" << num(report.slope_dist) << '\n'
        << "#stderr_dist=" << num(report.stderr_dist) << '\n'
        << "#slope_angle=" << num(report.slope_angle) << '\n'
        << "#stderr_angle=" << num(report.stderr_angle) << '\n'
        << "n,seed,median_dist_to_M,median_angle_err\n";
    for (const auto& row : report.rows)
        out << row.n << ',' << row.seed << ',' << num(row.median_dist) << ','
            << num(row.median_angle) << '\n';
    if (!out) throw Error("failed writing '" + path + "'");
}

} // namespace manproj
