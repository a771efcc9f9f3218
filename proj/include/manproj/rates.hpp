#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manproj/refine.hpp"
#include "manproj/synth.hpp"

namespace manproj {

struct RatesRow {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double median_dist = 0.0;  // median over queries of dist(p_hat, M)
    double median_angle = 0.0; // median tangent error against the oracle
};

struct RatesReport {
    std::vector<RatesRow> rows; // ordered by (n, seed)
    double slope_dist = 0.0;    // log-log OLS slope of median_dist vs n
    double stderr_dist = 0.0;
    double slope_angle = 0.0;
    double stderr_angle = 0.0;
};

struct RatesConfig {
    ManifoldSpec spec;
    std::vector<std::size_t> n_grid; // strictly increasing, >= 4 values
    int seeds = 20;
    int queries = 25;
    EstimatorConfig est;
    std::uint64_t base_seed = 0;
};

// For every (n, seed) cell: sample a fresh cloud and fresh queries from the
// tube, project each query, and record the medians of the distance to the
// manifold and of the tangent angle error. Cells may run on several threads;
// rows are collected by index so the report is deterministic.
RatesReport run_rates(const RatesConfig& cfg);

// '#' comments with the slope summary, a header row, then one row per cell.
void save_rates_csv(const std::string& path, const RatesReport& report,
                    const std::vector<std::string>& extra_comments = {});

} // namespace manproj
