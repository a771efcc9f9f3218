#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace manproj {

// Seedable random source built on std::mt19937_64, whose output sequence is
// fixed by the standard. The distribution transforms are written out by hand
// (the std:: distributions are not bit-portable), so a given (seed, stream)
// produces the same draws on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(mix(seed, stream)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; caches the second deviate.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        spare_ = mag * std::sin(ang);
        has_spare_ = true;
        return mag * std::cos(ang);
    }

    Eigen::VectorXd normal_vector(int dim) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v[i] = normal();
        return v;
    }

    // Uniform on the unit sphere S^{dim-1}.
    Eigen::VectorXd unit_vector(int dim) {
        Eigen::VectorXd v = normal_vector(dim);
        double n = v.norm();
        while (n == 0.0) {
            v = normal_vector(dim);
            n = v.norm();
        }
        return v / n;
    }

    // Uniform in the solid ball of the given radius.
    Eigen::VectorXd ball_vector(int dim, double radius) {
        Eigen::VectorXd dir = unit_vector(dim);
        const double r = radius * std::pow(uniform(), 1.0 / dim);
        return r * dir;
    }

    // Fisher-Yates shuffle of an index array, deterministic for a fixed seed.
    template <typename Index>
    void shuffle(std::vector<Index>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Uniform integer in [0, bound) without modulo bias.
    std::uint64_t bounded(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r >= threshold) return r % bound;
        }
    }

private:
    // splitmix64 over (seed, stream) decorrelates per-stream engines.
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace manproj
