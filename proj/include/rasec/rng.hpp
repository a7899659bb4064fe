#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "rasec/complex_matrix.hpp"

namespace rasec {

/// Counter-based generator with named substreams. Values depend only on
/// (seed, stream name, draw index), so regeneration order across channel
/// objects never changes what each one gets.
class SubStream {
public:
    SubStream(std::uint64_t seed, std::string_view name)
        : key_(mix(seed ^ fnv1a(name))) {}

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++ctr_); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal, Box-Muller (pair cached).
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Circularly symmetric complex normal, unit variance.
    cxd cgauss() {
        const double re = gauss();
        const double im = gauss();
        return cxd(re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0);
    }

    CVec cgauss_vec(std::size_t n) {
        CVec v(n);
        for (auto& z : v) z = cgauss();
        return v;
    }
    CMatrix cgauss_mat(std::size_t rows, std::size_t cols) {
        CMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = cgauss();
        return m;
    }

private:
    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace rasec
