#pragma once

#include <string>
#include <vector>

#include "manproj/geom.hpp"
#include "manproj/types.hpp"

namespace manproj {

// Immutable container of n ambient points in R^D, one point per row.
// Coordinates must be finite; n >= 1 and D >= 2.
class PointCloud {
public:
    explicit PointCloud(RowMat points);

    int n() const { return static_cast<int>(points_.rows()); }
    int dim() const { return static_cast<int>(points_.cols()); }
    const RowMat& points() const { return points_; }
    Vec point(int i) const { return points_.row(i).transpose(); }
    const double* data() const { return points_.data(); }

    // Indices i with ||r_i - r|| < radius (strict), ascending. Comparison is
    // done on squared distances computed by the dispatched kernel.
    std::vector<int> roi(const Vec& r, double radius) const;

private:
    RowMat points_;
};

// Frame coordinates of a subset of the cloud: row t of X / Y holds
// U^T (r_{idx[t]} - q) and V^T (r_{idx[t]} - q).
struct LocalCoords {
    Mat X;
    Mat Y;
};

LocalCoords local_coords(const PointCloud& cloud, const std::vector<int>& indices,
                         const Frame& frame);

// Keeps the rows with ||x|| < eps (strict).
LocalCoords bandwidth_filter(const LocalCoords& coords, double eps);

// CSV ingestion: '#'-prefixed comment lines, an optional header row
// "x0,...,x{D-1}", then one point per row. Malformed input raises ParseError
// carrying the 1-based line number. Comment lines are returned through
// `comments` (without the '#') when requested.
PointCloud load_cloud_csv(const std::string& path,
                          std::vector<std::string>* comments = nullptr);

// Writes comments ('#'-prefixed), a header row, then the points with %.17g
// precision so that a load round-trips bit-identically.
void save_cloud_csv(const std::string& path, const PointCloud& cloud,
                    const std::vector<std::string>& comments = {});

} // namespace manproj
