#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "dwellcert/matrix.hpp"

namespace dwellcert {

/// Seeded random source. Wraps mt19937_64 but does the integer-to-double and
/// bounded-integer mappings by hand, since the std distributions are allowed
/// to differ between standard library implementations and we want identical
/// streams for identical seeds everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, k) by rejection, bias-free.
    std::uint64_t below(std::uint64_t k) {
        require(k > 0, "Rng: empty range");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % k;
        std::uint64_t r;
        do {
            r = eng_();
        } while (r >= limit);
        return r % k;
    }

    /// Standard normal via Box-Muller (polar form avoided to keep the draw
    /// count per call fixed at two).
    double normal() {
        double u1 = uniform();
        const double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    /// Uniform point on the unit sphere in R^n.
    Vec unit_vector(std::size_t n) {
        Vec x(n);
        double nrm = 0.0;
        do {
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = normal();
            }
            nrm = norm2(x);
        } while (nrm < 1e-12);
        for (double& v : x) {
            v /= nrm;
        }
        return x;
    }

private:
    std::mt19937_64 eng_;
};

/// Decorrelated child seed for sub-streams (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace dwellcert
