#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "manproj/pointset.hpp"
#include "manproj/polyfit.hpp"
#include "manproj/types.hpp"

namespace manproj {

enum class ManifoldKind { Affine, Circle, Sphere, PolyGraph };

// Synthetic manifold with analytic projection and tangent oracles.
//  - Affine: offset + basis * u for u in [-extent, extent]^d.
//  - Circle: radius R in the first two coordinates of R^D.
//  - Sphere: S^d of radius R in the first d+1 coordinates of R^D.
//  - PolyGraph: { (x, g(x)) : x in [box_lo, box_hi] } for a polynomial g.
struct ManifoldSpec {
    ManifoldKind kind = ManifoldKind::Circle;
    int d = 1;
    int D = 2;
    double R = 1.0;        // circle / sphere radius
    Mat basis;             // affine: D x d, column-orthonormal
    Vec offset;            // affine: D
    double extent = 1.0;   // affine: parameter box half-width
    PolyModel graph;       // poly-graph: R^d -> R^{D-d}
    Vec box_lo, box_hi;    // poly-graph: parameter box
    double reach_hint = 0; // poly-graph: caller-supplied lower bound on the reach

    double reach() const;

    // key=value lines suitable for '#' comment headers; deserialize inverts.
    std::vector<std::string> serialize() const;
    static ManifoldSpec deserialize(const std::vector<std::string>& lines);

    static ManifoldSpec make_circle(double R, int D);
    static ManifoldSpec make_sphere(int d, double R, int D);
    static ManifoldSpec make_affine(int d, int D, Mat basis, Vec offset, double extent);
    // Haar-random basis and a bounded random offset, reproducible from seed.
    static ManifoldSpec random_affine(int d, int D, std::uint64_t seed, double extent);
    static ManifoldSpec make_poly_graph(PolyModel graph, Vec box_lo, Vec box_hi,
                                        double reach_hint);
};

// n i.i.d. draws from the uniform distribution on the tubular neighborhood of
// width sigma. Exact samplers: the affine tube is a box-times-ball product;
// circle and sphere tubes weight the radial offset by the curvature Jacobian
// via rejection; the poly-graph tube rejects box samples against the
// projection oracle. Throws SigmaExceedsReach when sigma >= reach.
PointCloud sample_tubular(const ManifoldSpec& spec, std::size_t n, double sigma,
                          std::uint64_t seed);

// Nearest point on the manifold. Throws AmbiguousProjection near the medial
// axis (e.g. the circle's center).
Vec oracle_project(const ManifoldSpec& spec, const Vec& point);

// Orthonormal tangent basis at a point on (or near) the manifold; the point
// is projected first.
Mat oracle_tangent(const ManifoldSpec& spec, const Vec& point);

// Distance to the manifold through the projection oracle.
double oracle_distance(const ManifoldSpec& spec, const Vec& point);

// Estimated projection map: position and tangent basis at the projection.
using ProjectFn = std::function<std::pair<Vec, Mat>(const Vec&)>;

struct GeodesicResult {
    std::vector<Vec> points;     // steps + 1 positions
    std::vector<Mat> tangents;   // tangent basis at each position
    std::vector<Vec> velocities; // unit ambient velocity at each position
};

// Discrete geodesic: from the projection of x0, repeatedly step eps along the
// current unit velocity, re-project, and parallel-transport the velocity by
// projecting it onto the new tangent and renormalizing. v0 holds coefficients
// in the tangent basis at the starting projection. Throws DegenerateTransport
// when the transported velocity nearly vanishes.
GeodesicResult geodesic_walk(const ProjectFn& project_fn, const Vec& x0, const Vec& v0,
                             double eps, int steps);

} // namespace manproj
