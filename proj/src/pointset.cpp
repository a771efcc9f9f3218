#include "manproj/pointset.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "manproj/errors.hpp"
#include "manproj/kernels.hpp"

namespace manproj {

PointCloud::PointCloud(RowMat points) : points_(std::move(points)) {
    if (points_.rows() < 1 || points_.cols() < 2)
        throw DimensionMismatch("point cloud needs n >= 1 points in dimension D >= 2");
    if (!points_.allFinite())
        throw Error("point cloud contains non-finite coordinates");
}

std::vector<int> PointCloud::roi(const Vec& r, double radius) const {
    if (r.size() != points_.cols())
        throw DimensionMismatch("query dimension does not match the cloud");
    const auto n = static_cast<std::size_t>(points_.rows());
    std::vector<double> sq(n);
    kernels::squared_distances(points_.data(), n, static_cast<std::size_t>(points_.cols()),
                               r.data(), sq.data());
    const double r2 = radius * radius;
    std::vector<int> out;
    for (std::size_t i = 0; i < n; ++i)
        if (sq[i] < r2) out.push_back(static_cast<int>(i));
    return out;
}

LocalCoords local_coords(const PointCloud& cloud, const std::vector<int>& indices,
                         const Frame& frame) {
    const auto N = static_cast<Eigen::Index>(indices.size());
    Mat delta(N, cloud.dim());
    for (Eigen::Index t = 0; t < N; ++t)
        delta.row(t) = cloud.points().row(indices[static_cast<std::size_t>(t)]) -
                       frame.origin.transpose();
    return {delta * frame.tangent, delta * frame.normal};
}

LocalCoords bandwidth_filter(const LocalCoords& coords, double eps) {
    const double e2 = eps * eps;
    std::vector<Eigen::Index> keep;
    for (Eigen::Index t = 0; t < coords.X.rows(); ++t)
        if (coords.X.row(t).squaredNorm() < e2) keep.push_back(t);
    LocalCoords out;
    out.X.resize(static_cast<Eigen::Index>(keep.size()), coords.X.cols());
    out.Y.resize(static_cast<Eigen::Index>(keep.size()), coords.Y.cols());
    for (std::size_t t = 0; t < keep.size(); ++t) {
        out.X.row(static_cast<Eigen::Index>(t)) = coords.X.row(keep[t]);
        out.Y.row(static_cast<Eigen::Index>(t)) = coords.Y.row(keep[t]);
    }
    return out;
}

namespace {

// Returns -1 on success, otherwise the 0-based index of the offending token.
int parse_row(const std::string& line, std::vector<double>& out) {
    out.clear();
    std::size_t pos = 0;
    int tok_index = 0;
    while (pos <= line.size()) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) comma = line.size();
        const std::string tok = line.substr(pos, comma - pos);
        std::size_t consumed = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &consumed);
        } catch (const std::exception&) {
            return tok_index;
        }
        // Allow trailing whitespace only.
        for (std::size_t i = consumed; i < tok.size(); ++i)
            if (!std::isspace(static_cast<unsigned char>(tok[i]))) return tok_index;
        if (!std::isfinite(v)) return tok_index;
        out.push_back(v);
        pos = comma + 1;
        ++tok_index;
        if (comma == line.size()) break;
    }
    return out.empty() ? 0 : -1;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

} // namespace

PointCloud load_cloud_csv(const std::string& path, std::vector<std::string>* comments) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    bool header_allowed = true;
    Eigen::Index cols = -1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            if (comments) comments->push_back(trim(t.substr(1)));
            continue;
        }
        std::vector<double> vals;
        const int bad = parse_row(t, vals);
        if (bad >= 0) {
            // A leading row whose first token is non-numeric is the header;
            // anything else is a malformed data row.
            if (header_allowed && bad == 0) {
                header_allowed = false;
                continue;
            }
            throw ParseError("row " + std::to_string(lineno) + ": malformed value in '" + t + "'",
                             lineno);
        }
        header_allowed = false;
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(vals.size());
        } else if (static_cast<Eigen::Index>(vals.size()) != cols) {
            throw ParseError("row " + std::to_string(lineno) + ": expected " +
                                 std::to_string(cols) + " columns, got " +
                                 std::to_string(vals.size()),
                             lineno);
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw ParseError("no data rows in '" + path + "'", lineno);
    RowMat pts(static_cast<Eigen::Index>(rows.size()), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            pts(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    return PointCloud(std::move(pts));
}

void save_cloud_csv(const std::string& path, const PointCloud& cloud,
                    const std::vector<std::string>& comments) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    for (const auto& c : comments) out << '#' << c << '\n';
    for (int j = 0; j < cloud.dim(); ++j) out << (j ? ",x" : "x") << j;
    out << '\n';
    char buf[32];
    for (int i = 0; i < cloud.n(); ++i) {
        for (int j = 0; j < cloud.dim(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", cloud.points()(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw Error("failed writing '" + path + "'");
}

} // namespace manproj
