#include "manproj/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "manproj/errors.hpp"
#include "manproj/rng.hpp"

namespace manproj {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const double* v, Eigen::Index n) {
    std::string out;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i) out += ' ';
        out += fmt(v[i]);
    }
    return out;
}

std::vector<double> parse_list(const std::string& s) {
    std::istringstream in(s);
    std::vector<double> out;
    double v;
    while (in >> v) out.push_back(v);
    return out;
}

// Gauss-Newton descent of ||(x, g(x)) - c||^2 over the parameter box.
Vec graph_refine(const PolyModel& graph, const Vec& lo, const Vec& hi, const Vec& cx,
                 const Vec& cy, Vec x) {
    const int d = graph.d;
    for (int it = 0; it < 30; ++it) {
        const Vec y = eval(graph, x);
        Mat J(graph.codim, d);
        {
            // Differential of g at x by differentiating each monomial.
            const auto exps = monomial_exponents(d, graph.degree);
            J.setZero();
            for (std::size_t t = 0; t < exps.size(); ++t) {
                for (int j = 0; j < d; ++j) {
                    const int e = exps[t][static_cast<std::size_t>(j)];
                    if (e == 0) continue;
                    double v = static_cast<double>(e);
                    for (int jj = 0; jj < d; ++jj) {
                        const int p = exps[t][static_cast<std::size_t>(jj)] - (jj == j ? 1 : 0);
                        for (int u = 0; u < p; ++u) v *= x[jj];
                    }
                    J.col(j) += v * graph.coeffs.row(static_cast<Eigen::Index>(t)).transpose();
                }
            }
        }
        // Residual F = (x - cx, y - cy); minimize 0.5 ||F||^2 with the lifted
        // Jacobian [I; J].
        const Vec grad = (x - cx) + J.transpose() * (y - cy);
        Mat H = Mat::Identity(d, d) + J.transpose() * J;
        const Vec step = H.ldlt().solve(grad);
        Vec xn = x - step;
        for (int j = 0; j < d; ++j) xn[j] = std::clamp(xn[j], lo[j], hi[j]);
        if ((xn - x).norm() <= 1e-14 * (1.0 + x.norm())) {
            x = xn;
            break;
        }
        x = xn;
    }
    return x;
}

double graph_objective(const PolyModel& graph, const Vec& cx, const Vec& cy, const Vec& x) {
    return (x - cx).squaredNorm() + (eval(graph, x) - cy).squaredNorm();
}

// Coarse grid minimizer of the squared distance to the graph, d in {1, 2}.
Vec graph_project_param(const ManifoldSpec& spec, const Vec& point, bool check_ambiguity) {
    const int d = spec.d;
    const Vec cx = point.head(d);
    const Vec cy = point.tail(spec.D - d);
    const double tau = spec.reach_hint;
    Vec best(d);
    double best_val = kInf, second_val = kInf;
    Vec second(d);
    if (d == 1) {
        const double span = spec.box_hi[0] - spec.box_lo[0];
        const double step = std::min(1e-4 * tau, span / 64.0);
        const auto nodes = static_cast<long>(std::floor(span / step)) + 1;
        for (long i = 0; i <= nodes; ++i) {
            Vec x(1);
            x[0] = std::min(spec.box_lo[0] + step * static_cast<double>(i), spec.box_hi[0]);
            const double v = graph_objective(spec.graph, cx, cy, x);
            if (v < best_val) {
                if (std::abs(x[0] - best[0]) > 4.0 * step) {
                    second_val = best_val;
                    second = best;
                }
                best_val = v;
                best = x;
            } else if (v < second_val && std::abs(x[0] - best[0]) > 4.0 * step) {
                second_val = v;
                second = x;
            }
        }
    } else if (d == 2) {
        const int nx = 301, ny = 301;
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < ny; ++j) {
                Vec x(2);
                x[0] = spec.box_lo[0] + (spec.box_hi[0] - spec.box_lo[0]) * i / (nx - 1.0);
                x[1] = spec.box_lo[1] + (spec.box_hi[1] - spec.box_lo[1]) * j / (ny - 1.0);
                const double v = graph_objective(spec.graph, cx, cy, x);
                if (v < best_val) {
                    if ((x - best).norm() > 8.0 * (spec.box_hi - spec.box_lo).norm() / nx) {
                        second_val = best_val;
                        second = best;
                    }
                    best_val = v;
                    best = x;
                } else if (v < second_val &&
                           (x - best).norm() > 8.0 * (spec.box_hi - spec.box_lo).norm() / nx) {
                    second_val = v;
                    second = x;
                }
            }
        }
    } else {
        throw DimensionMismatch("graph projection supports d in {1, 2}");
    }
    best = graph_refine(spec.graph, spec.box_lo, spec.box_hi, cx, cy, best);
    best_val = graph_objective(spec.graph, cx, cy, best);
    if (check_ambiguity && std::isfinite(second_val)) {
        second = graph_refine(spec.graph, spec.box_lo, spec.box_hi, cx, cy, second);
        const double sv = graph_objective(spec.graph, cx, cy, second);
        if ((second - best).norm() > 1e-6 * (1.0 + best.norm()) &&
            sv - best_val <= 1e-9 * (1.0 + best_val))
            throw AmbiguousProjection("point is equidistant from distinct graph regions");
    }
    return best;
}

Vec graph_lift(const ManifoldSpec& spec, const Vec& x) {
    Vec p(spec.D);
    p.head(spec.d) = x;
    p.tail(spec.D - spec.d) = eval(spec.graph, x);
    return p;
}

} // namespace

double ManifoldSpec::reach() const {
    switch (kind) {
        case ManifoldKind::Affine: return kInf;
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere: return R;
        case ManifoldKind::PolyGraph: return reach_hint;
    }
    return 0.0;
}

std::vector<std::string> ManifoldSpec::serialize() const {
    std::vector<std::string> out;
    switch (kind) {
        case ManifoldKind::Affine: {
            out.push_back("kind=affine");
            out.push_back("d=" + std::to_string(d));
            out.push_back("D=" + std::to_string(D));
            out.push_back("extent=" + fmt(extent));
            out.push_back("offset=" + fmt_list(offset.data(), offset.size()));
            for (int j = 0; j < d; ++j) {
                const Vec direction = basis.col(j);
                out.push_back("basis" + std::to_string(j) + "=" +
                              fmt_list(direction.data(), D));
            }
            break;
        }
        case ManifoldKind::Circle:
            out.push_back("kind=circle");
            out.push_back("d=1");
            out.push_back("D=" + std::to_string(D));
            out.push_back("R=" + fmt(R));
            break;
        case ManifoldKind::Sphere:
            out.push_back("kind=sphere");
            out.push_back("d=" + std::to_string(d));
            out.push_back("D=" + std::to_string(D));
            out.push_back("R=" + fmt(R));
            break;
        case ManifoldKind::PolyGraph: {
            out.push_back("kind=poly-graph");
            out.push_back("d=" + std::to_string(d));
            out.push_back("D=" + std::to_string(D));
            out.push_back("degree=" + std::to_string(graph.degree));
            out.push_back("reach=" + fmt(reach_hint));
            out.push_back("box_lo=" + fmt_list(box_lo.data(), box_lo.size()));
            out.push_back("box_hi=" + fmt_list(box_hi.data(), box_hi.size()));
            for (int c = 0; c < graph.codim; ++c) {
                const Vec column = graph.coeffs.col(c);
                out.push_back("coeffs" + std::to_string(c) + "=" +
                              fmt_list(column.data(), graph.coeffs.rows()));
            }
            break;
        }
    }
    return out;
}

ManifoldSpec ManifoldSpec::deserialize(const std::vector<std::string>& lines) {
    std::map<std::string, std::string> kv;
    for (const auto& line : lines) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto need = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParseError("manifold spec is missing '" + key + "'");
        return it->second;
    };
    const std::string kind = need("kind");
    if (kind == "circle") return make_circle(std::stod(need("R")), std::stoi(need("D")));
    if (kind == "sphere")
        return make_sphere(std::stoi(need("d")), std::stod(need("R")), std::stoi(need("D")));
    if (kind == "affine") {
        const int d = std::stoi(need("d"));
        const int D = std::stoi(need("D"));
        const auto off = parse_list(need("offset"));
        Mat basis(D, d);
        for (int j = 0; j < d; ++j) {
            const auto col = parse_list(need("basis" + std::to_string(j)));
            if (static_cast<int>(col.size()) != D)
                throw ParseError("affine basis row has wrong length");
            for (int i = 0; i < D; ++i) basis(i, j) = col[static_cast<std::size_t>(i)];
        }
        Vec offset(D);
        if (static_cast<int>(off.size()) != D) throw ParseError("affine offset has wrong length");
        for (int i = 0; i < D; ++i) offset[i] = off[static_cast<std::size_t>(i)];
        return make_affine(d, D, std::move(basis), std::move(offset),
                           std::stod(need("extent")));
    }
    if (kind == "poly-graph") {
        const int d = std::stoi(need("d"));
        const int D = std::stoi(need("D"));
        PolyModel graph;
        graph.d = d;
        graph.codim = D - d;
        graph.degree = std::stoi(need("degree"));
        const int m = monomial_count(d, graph.degree);
        graph.coeffs.resize(m, graph.codim);
        for (int c = 0; c < graph.codim; ++c) {
            const auto col = parse_list(need("coeffs" + std::to_string(c)));
            if (static_cast<int>(col.size()) != m)
                throw ParseError("poly-graph coefficient row has wrong length");
            for (int r = 0; r < m; ++r) graph.coeffs(r, c) = col[static_cast<std::size_t>(r)];
        }
        const auto lo = parse_list(need("box_lo"));
        const auto hi = parse_list(need("box_hi"));
        if (static_cast<int>(lo.size()) != d || static_cast<int>(hi.size()) != d)
            throw ParseError("poly-graph box has wrong length");
        Vec blo(d), bhi(d);
        for (int j = 0; j < d; ++j) {
            blo[j] = lo[static_cast<std::size_t>(j)];
            bhi[j] = hi[static_cast<std::size_t>(j)];
        }
        return make_poly_graph(std::move(graph), std::move(blo), std::move(bhi),
                               std::stod(need("reach")));
    }
    throw ParseError("unknown manifold kind '" + kind + "'");
}

ManifoldSpec ManifoldSpec::make_circle(double R, int D) {
    if (!(R > 0.0) || D < 2) throw DimensionMismatch("circle needs R > 0, D >= 2");
    ManifoldSpec s;
    s.kind = ManifoldKind::Circle;
    s.d = 1;
    s.D = D;
    s.R = R;
    return s;
}

ManifoldSpec ManifoldSpec::make_sphere(int d, double R, int D) {
    if (!(R > 0.0) || d < 1 || D < d + 1)
        throw DimensionMismatch("sphere needs R > 0, 1 <= d, D >= d + 1");
    ManifoldSpec s;
    s.kind = ManifoldKind::Sphere;
    s.d = d;
    s.D = D;
    s.R = R;
    return s;
}

ManifoldSpec ManifoldSpec::make_affine(int d, int D, Mat basis, Vec offset, double extent) {
    if (d < 1 || d >= D) throw DimensionMismatch("affine needs 1 <= d < D");
    if (basis.rows() != D || basis.cols() != d || offset.size() != D)
        throw DimensionMismatch("affine basis/offset shapes do not match");
    if (!(extent > 0.0)) throw DimensionMismatch("affine extent must be positive");
    ManifoldSpec s;
    s.kind = ManifoldKind::Affine;
    s.d = d;
    s.D = D;
    // Keep a basis that is already orthonormal untouched so that serialized
    // specs rebuild bit-identically; orthonormalize anything else.
    const double defect =
        (basis.transpose() * basis - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
    s.basis = defect <= 1e-12 ? std::move(basis) : orthonormalize(basis);
    s.offset = std::move(offset);
    s.extent = extent;
    return s;
}

ManifoldSpec ManifoldSpec::random_affine(int d, int D, std::uint64_t seed, double extent) {
    Rng rng(seed, 7);
    Mat raw(D, d);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < d; ++j) raw(i, j) = rng.normal();
    Vec offset = rng.normal_vector(D);
    return make_affine(d, D, std::move(raw), std::move(offset), extent);
}

ManifoldSpec ManifoldSpec::make_poly_graph(PolyModel graph, Vec box_lo, Vec box_hi,
                                           double reach_hint) {
    if (graph.d < 1 || graph.d > 2)
        throw DimensionMismatch("poly-graph supports d in {1, 2}");
    if (graph.codim < 1) throw DimensionMismatch("poly-graph needs codim >= 1");
    if (box_lo.size() != graph.d || box_hi.size() != graph.d)
        throw DimensionMismatch("poly-graph box shape does not match d");
    for (int j = 0; j < graph.d; ++j)
        if (!(box_lo[j] < box_hi[j])) throw DimensionMismatch("poly-graph box is empty");
    if (!(reach_hint > 0.0)) throw DimensionMismatch("poly-graph needs a positive reach bound");
    ManifoldSpec s;
    s.kind = ManifoldKind::PolyGraph;
    s.d = graph.d;
    s.D = graph.d + graph.codim;
    s.graph = std::move(graph);
    s.box_lo = std::move(box_lo);
    s.box_hi = std::move(box_hi);
    s.reach_hint = reach_hint;
    return s;
}

PointCloud sample_tubular(const ManifoldSpec& spec, std::size_t n, double sigma,
                          std::uint64_t seed) {
    if (n < 1) throw Error("sample_tubular needs n >= 1");
    if (!(sigma > 0.0) || !(sigma < spec.reach()))
        throw SigmaExceedsReach("noise width must satisfy 0 < sigma < reach");
    RowMat pts(static_cast<Eigen::Index>(n), spec.D);
    Rng rng(seed);

    switch (spec.kind) {
        case ManifoldKind::Affine: {
            const Mat normal = complement(spec.basis);
            for (std::size_t i = 0; i < n; ++i) {
                Vec u(spec.d);
                for (int j = 0; j < spec.d; ++j) u[j] = rng.uniform(-spec.extent, spec.extent);
                const Vec z = rng.ball_vector(spec.D - spec.d, sigma);
                pts.row(static_cast<Eigen::Index>(i)) =
                    (spec.offset + spec.basis * u + normal * z).transpose();
            }
            break;
        }
        case ManifoldKind::Circle: {
            // Tube coordinates (theta, s, z) carry the volume element
            // (R + s) dtheta ds dz, so accept proportionally to R + s.
            for (std::size_t i = 0; i < n; ++i) {
                for (;;) {
                    const double theta = rng.uniform(0.0, 2.0 * M_PI);
                    const Vec w = rng.ball_vector(spec.D - 1, sigma);
                    const double s = w[0];
                    const double accept = (spec.R + s) / (spec.R + sigma);
                    if (rng.uniform() < accept) {
                        auto row = pts.row(static_cast<Eigen::Index>(i));
                        row[0] = (spec.R + s) * std::cos(theta);
                        row[1] = (spec.R + s) * std::sin(theta);
                        for (int j = 2; j < spec.D; ++j) row[j] = w[j - 1];
                        break;
                    }
                }
            }
            break;
        }
        case ManifoldKind::Sphere: {
            // Volume element (R + s)^d dA(u) ds dz over direction u, radial
            // offset s, and the off-subspace coordinates z.
            for (std::size_t i = 0; i < n; ++i) {
                for (;;) {
                    const Vec u = rng.unit_vector(spec.d + 1);
                    const Vec w = rng.ball_vector(spec.D - spec.d, sigma);
                    const double s = w[0];
                    const double accept =
                        std::pow((spec.R + s) / (spec.R + sigma), static_cast<double>(spec.d));
                    if (rng.uniform() < accept) {
                        auto row = pts.row(static_cast<Eigen::Index>(i));
                        for (int j = 0; j <= spec.d; ++j) row[j] = (spec.R + s) * u[j];
                        for (int j = spec.d + 1; j < spec.D; ++j) row[j] = w[j - spec.d];
                        break;
                    }
                }
            }
            break;
        }
        case ManifoldKind::PolyGraph: {
            // Bounding box of the sigma-tube, then rejection through the
            // projection oracle — exact for the curved graph.
            const int d = spec.d;
            const int codim = spec.D - d;
            Vec ylo = Vec::Constant(codim, kInf), yhi = Vec::Constant(codim, -kInf);
            const int nodes = d == 1 ? 20001 : 401;
            std::vector<int> idx(static_cast<std::size_t>(d), 0);
            for (;;) {
                Vec x(d);
                for (int j = 0; j < d; ++j)
                    x[j] = spec.box_lo[j] + (spec.box_hi[j] - spec.box_lo[j]) *
                                                idx[static_cast<std::size_t>(j)] / (nodes - 1.0);
                const Vec y = eval(spec.graph, x);
                ylo = ylo.cwiseMin(y);
                yhi = yhi.cwiseMax(y);
                int j = 0;
                while (j < d && ++idx[static_cast<std::size_t>(j)] == nodes) {
                    idx[static_cast<std::size_t>(j)] = 0;
                    ++j;
                }
                if (j == d) break;
            }
            const double pad = sigma * (1.0 + 1e-9) + 1e-12;
            for (std::size_t i = 0; i < n; ++i) {
                for (;;) {
                    Vec c(spec.D);
                    for (int j = 0; j < d; ++j)
                        c[j] = rng.uniform(spec.box_lo[j] - pad, spec.box_hi[j] + pad);
                    for (int j = 0; j < codim; ++j)
                        c[d + j] = rng.uniform(ylo[j] - pad, yhi[j] + pad);
                    double dist;
                    try {
                        dist = (c - oracle_project(spec, c)).norm();
                    } catch (const AmbiguousProjection&) {
                        continue; // equidistant points lie beyond sigma anyway
                    }
                    if (dist < sigma) {
                        pts.row(static_cast<Eigen::Index>(i)) = c.transpose();
                        break;
                    }
                }
            }
            break;
        }
    }
    return PointCloud(std::move(pts));
}

Vec oracle_project(const ManifoldSpec& spec, const Vec& point) {
    if (point.size() != spec.D)
        throw DimensionMismatch("oracle_project: point dimension mismatch");
    switch (spec.kind) {
        case ManifoldKind::Affine:
            return spec.offset + spec.basis * (spec.basis.transpose() * (point - spec.offset));
        case ManifoldKind::Circle: {
            const double nr = std::hypot(point[0], point[1]);
            if (nr < 1e-12 * spec.R)
                throw AmbiguousProjection("point lies on the circle's axis");
            Vec p = Vec::Zero(spec.D);
            p[0] = spec.R * point[0] / nr;
            p[1] = spec.R * point[1] / nr;
            return p;
        }
        case ManifoldKind::Sphere: {
            const Vec head = point.head(spec.d + 1);
            const double nr = head.norm();
            if (nr < 1e-12 * spec.R)
                throw AmbiguousProjection("point lies at the sphere's center");
            Vec p = Vec::Zero(spec.D);
            p.head(spec.d + 1) = spec.R * head / nr;
            return p;
        }
        case ManifoldKind::PolyGraph:
            return graph_lift(spec, graph_project_param(spec, point, true));
    }
    throw Error("unreachable");
}

Mat oracle_tangent(const ManifoldSpec& spec, const Vec& point) {
    const Vec p = oracle_project(spec, point);
    switch (spec.kind) {
        case ManifoldKind::Affine:
            return spec.basis;
        case ManifoldKind::Circle: {
            Mat t = Mat::Zero(spec.D, 1);
            const double nr = std::hypot(p[0], p[1]);
            t(0, 0) = -p[1] / nr;
            t(1, 0) = p[0] / nr;
            fix_column_signs(t);
            return t;
        }
        case ManifoldKind::Sphere: {
            const Vec u = p.head(spec.d + 1) / p.head(spec.d + 1).norm();
            const Mat comp = complement(u); // (d+1) x d
            Mat t = Mat::Zero(spec.D, spec.d);
            t.topRows(spec.d + 1) = comp;
            return t;
        }
        case ManifoldKind::PolyGraph: {
            const Vec x = p.head(spec.d);
            // Columns (e_j, dg/dx_j) of the graph differential, lifted.
            const auto exps = monomial_exponents(spec.d, spec.graph.degree);
            Mat J = Mat::Zero(spec.D - spec.d, spec.d);
            for (std::size_t t = 0; t < exps.size(); ++t) {
                for (int j = 0; j < spec.d; ++j) {
                    const int e = exps[t][static_cast<std::size_t>(j)];
                    if (e == 0) continue;
                    double v = static_cast<double>(e);
                    for (int jj = 0; jj < spec.d; ++jj) {
                        const int pw = exps[t][static_cast<std::size_t>(jj)] - (jj == j ? 1 : 0);
                        for (int u = 0; u < pw; ++u) v *= x[jj];
                    }
                    J.col(j) += v * spec.graph.coeffs.row(static_cast<Eigen::Index>(t)).transpose();
                }
            }
            Mat lifted(spec.D, spec.d);
            lifted.topRows(spec.d) = Mat::Identity(spec.d, spec.d);
            lifted.bottomRows(spec.D - spec.d) = J;
            return orthonormalize(lifted);
        }
    }
    throw Error("unreachable");
}

double oracle_distance(const ManifoldSpec& spec, const Vec& point) {
    return (point - oracle_project(spec, point)).norm();
}

GeodesicResult geodesic_walk(const ProjectFn& project_fn, const Vec& x0, const Vec& v0,
                             double eps, int steps) {
    if (!(eps > 0.0)) throw Error("geodesic_walk needs eps > 0");
    if (steps < 1) throw Error("geodesic_walk needs steps >= 1");
    if (v0.norm() == 0.0) throw DegenerateTransport("initial velocity is zero");

    GeodesicResult out;
    auto [x, T] = project_fn(x0);
    if (v0.size() != T.cols())
        throw DimensionMismatch("v0 must hold one coefficient per tangent direction");
    Vec v = T * v0;
    const double vn = v.norm();
    if (vn < 1e-8) throw DegenerateTransport("initial velocity vanishes in the tangent");
    v /= vn;
    out.points.push_back(x);
    out.tangents.push_back(T);
    out.velocities.push_back(v);

    for (int i = 0; i < steps; ++i) {
        const Vec ahead = x + eps * v;
        auto [xn, Tn] = project_fn(ahead);
        Vec vn_vec = Tn * (Tn.transpose() * v);
        const double norm = vn_vec.norm();
        if (norm < 1e-8)
            throw DegenerateTransport("velocity is nearly normal to the new tangent");
        v = vn_vec / norm;
        x = xn;
        T = Tn;
        out.points.push_back(x);
        out.tangents.push_back(T);
        out.velocities.push_back(v);
    }
    return out;
}

} // namespace manproj
