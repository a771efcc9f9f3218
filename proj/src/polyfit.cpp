#include "manproj/polyfit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "manproj/errors.hpp"
#include "manproj/rng.hpp"

namespace manproj {

int monomial_count(int d, int degree) {
    // C(d + degree, d) by incremental products to stay in integer range.
    long long num = 1;
    for (int i = 1; i <= d; ++i) num = num * (degree + i) / i;
    return static_cast<int>(num);
}

namespace {

void enumerate_exponents(int d, int total, std::vector<int>& prefix,
                         std::vector<std::vector<int>>& out) {
    if (d == 1) {
        prefix.push_back(total);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int e = total; e >= 0; --e) {
        prefix.push_back(e);
        enumerate_exponents(d - 1, total - e, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

std::vector<std::vector<int>> monomial_exponents(int d, int degree) {
    if (d < 1 || degree < 0)
        throw DimensionMismatch("monomial_exponents needs d >= 1, degree >= 0");
    std::vector<std::vector<int>> out;
    std::vector<int> prefix;
    for (int total = 0; total <= degree; ++total)
        enumerate_exponents(d, total, prefix, out);
    return out;
}

Vec monomials(int d, int degree, const Vec& x) {
    if (x.size() != d)
        throw DimensionMismatch("monomials: point dimension does not match d");
    const auto exps = monomial_exponents(d, degree);
    Vec out(static_cast<Eigen::Index>(exps.size()));
    for (std::size_t t = 0; t < exps.size(); ++t) {
        double v = 1.0;
        for (int j = 0; j < d; ++j)
            for (int e = 0; e < exps[t][static_cast<std::size_t>(j)]; ++e) v *= x[j];
        out[static_cast<Eigen::Index>(t)] = v;
    }
    return out;
}

namespace {

Mat design_matrix(const Mat& X, int degree) {
    const int d = static_cast<int>(X.cols());
    const auto exps = monomial_exponents(d, degree);
    Mat A(X.rows(), static_cast<Eigen::Index>(exps.size()));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (std::size_t t = 0; t < exps.size(); ++t) {
            double v = 1.0;
            for (int j = 0; j < d; ++j)
                for (int e = 0; e < exps[t][static_cast<std::size_t>(j)]; ++e) v *= X(i, j);
            A(i, static_cast<Eigen::Index>(t)) = v;
        }
    }
    return A;
}

} // namespace

PolyModel fit_ls(const Mat& X, const Mat& Y, int degree, FitDiagnostics* diag) {
    if (X.rows() != Y.rows())
        throw DimensionMismatch("fit_ls: X and Y row counts differ");
    const int m = monomial_count(static_cast<int>(X.cols()), degree);
    if (X.rows() < m)
        throw InsufficientSamples("fit_ls needs at least " + std::to_string(m) +
                                  " samples, got " + std::to_string(X.rows()));
    const Mat A = design_matrix(X, degree);
    Eigen::CompleteOrthogonalDecomposition<Mat> cod;
    cod.setThreshold(1e-10);
    cod.compute(A);
    const int rank = static_cast<int>(cod.rank());
    PolyModel model;
    model.d = static_cast<int>(X.cols());
    model.codim = static_cast<int>(Y.cols());
    model.degree = degree;
    model.coeffs = cod.solve(Y);
    if (diag) {
        const auto& T = cod.matrixT();
        double cond = std::numeric_limits<double>::infinity();
        if (rank == m && T(rank - 1, rank - 1) != 0.0)
            cond = std::abs(T(0, 0) / T(rank - 1, rank - 1));
        diag->rank = rank;
        diag->condition = cond;
        diag->ill_conditioned = !(cond <= 1e12);
    }
    return model;
}

PolyModel fit_mom(const Mat& X, const Mat& Y, int degree, int blocks, std::uint64_t seed,
                  FitDiagnostics* diag) {
    if (blocks < 1) throw DimensionMismatch("fit_mom needs blocks >= 1");
    if (blocks == 1) return fit_ls(X, Y, degree, diag);
    const auto N = X.rows();
    const int m = monomial_count(static_cast<int>(X.cols()), degree);
    if (N < static_cast<Eigen::Index>(blocks) * m)
        throw InsufficientSamples("fit_mom needs at least " + std::to_string(blocks * m) +
                                  " samples, got " + std::to_string(N));
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(N));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Rng rng(seed);
    rng.shuffle(perm);

    std::vector<PolyModel> fits;
    fits.reserve(static_cast<std::size_t>(blocks));
    int ill_count = 0;
    const Eigen::Index base = N / blocks;
    const Eigen::Index extra = N % blocks;
    Eigen::Index start = 0;
    for (int b = 0; b < blocks; ++b) {
        const Eigen::Index len = base + (b < extra ? 1 : 0);
        Mat Xb(len, X.cols()), Yb(len, Y.cols());
        for (Eigen::Index t = 0; t < len; ++t) {
            Xb.row(t) = X.row(perm[static_cast<std::size_t>(start + t)]);
            Yb.row(t) = Y.row(perm[static_cast<std::size_t>(start + t)]);
        }
        start += len;
        FitDiagnostics bd;
        fits.push_back(fit_ls(Xb, Yb, degree, &bd));
        if (bd.ill_conditioned) ++ill_count;
    }

    PolyModel model = fits.front();
    std::vector<double> vals(static_cast<std::size_t>(blocks));
    for (Eigen::Index r = 0; r < model.coeffs.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.coeffs.cols(); ++c) {
            for (int b = 0; b < blocks; ++b)
                vals[static_cast<std::size_t>(b)] = fits[static_cast<std::size_t>(b)].coeffs(r, c);
            std::sort(vals.begin(), vals.end());
            const std::size_t mid = vals.size() / 2;
            model.coeffs(r, c) = (vals.size() % 2 == 1)
                                     ? vals[mid]
                                     : 0.5 * (vals[mid - 1] + vals[mid]);
        }
    }
    if (diag) {
        diag->rank = m;
        diag->condition = 0.0;
        diag->ill_conditioned = ill_count > blocks / 2;
    }
    return model;
}

Vec value_at_zero(const PolyModel& model) { return model.coeffs.row(0).transpose(); }

Mat differential_at_zero(const PolyModel& model) {
    Mat J(model.codim, model.d);
    for (int j = 0; j < model.d; ++j) J.col(j) = model.coeffs.row(1 + j).transpose();
    return J;
}

Vec eval(const PolyModel& model, const Vec& x) {
    return model.coeffs.transpose() * monomials(model.d, model.degree, x);
}

Mat graph_tangent(const Frame& frame, const Mat& Dpi) {
    if (Dpi.rows() != frame.codim() || Dpi.cols() != frame.dim())
        throw DimensionMismatch("graph_tangent: differential shape does not match frame");
    Mat lifted = frame.tangent + frame.normal * Dpi;
    return orthonormalize(lifted);
}

void save_poly_csv(const std::string& path, const PolyModel& model) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "d,codim,degree\n"
        << model.d << ',' << model.codim << ',' << model.degree << '\n';
    char buf[32];
    for (Eigen::Index r = 0; r < model.coeffs.rows(); ++r) {
        for (Eigen::Index c = 0; c < model.coeffs.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", model.coeffs(r, c));
            if (c) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw Error("failed writing '" + path + "'");
}

PolyModel load_poly_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    std::string line;
    long lineno = 0;
    auto next_line = [&]() {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line[0] != '#') return true;
        }
        return false;
    };
    if (!next_line() || line.find('d') == std::string::npos)
        throw ParseError("missing 'd,codim,degree' header", lineno);
    if (!next_line()) throw ParseError("missing dimension row", lineno);
    PolyModel model;
    if (std::sscanf(line.c_str(), "%d,%d,%d", &model.d, &model.codim, &model.degree) != 3)
        throw ParseError("row " + std::to_string(lineno) + ": malformed dimension row", lineno);
    if (model.d < 1 || model.codim < 1 || model.degree < 0)
        throw ParseError("row " + std::to_string(lineno) + ": invalid dimensions", lineno);
    const int m = monomial_count(model.d, model.degree);
    model.coeffs.resize(m, model.codim);
    for (int r = 0; r < m; ++r) {
        if (!next_line())
            throw ParseError("expected " + std::to_string(m) + " coefficient rows", lineno);
        std::size_t pos = 0;
        for (int c = 0; c < model.codim; ++c) {
            std::size_t consumed = 0;
            try {
                model.coeffs(r, c) = std::stod(line.substr(pos), &consumed);
            } catch (const std::exception&) {
                throw ParseError("row " + std::to_string(lineno) + ": malformed coefficient",
                                 lineno);
            }
            pos += consumed;
            if (c + 1 < model.codim) {
                if (pos >= line.size() || line[pos] != ',')
                    throw ParseError("row " + std::to_string(lineno) + ": expected ',' separator",
                                     lineno);
                ++pos;
            }
        }
    }
    return model;
}

} // namespace manproj
