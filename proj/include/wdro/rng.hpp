// Seedable, cross-platform-deterministic random number generator.
//
// Engine: xoshiro256++ (Blackman & Vigna), seeded through splitmix64 so that
// any 64-bit seed yields a well-mixed state. Uniform doubles use the standard
// 53-bit mantissa construction; Gaussians use Box-Muller on that stream.
// The stream is reproducible across platforms for the integer outputs; the
// Gaussian path additionally depends on libm's log/cos rounding.

#pragma once

#include <cmath>
#include <cstdint>

#include "wdro/vec.hpp"

namespace wdro {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 expansion of the seed into 256 bits of state
        std::uint64_t x = seed;
        for (auto& si : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            si = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [a, b]
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // standard normal via Box-Muller; caches the second deviate
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586476925286766559;
        cached_ = r * std::sin(two_pi * u2);
        have_cached_ = true;
        return r * std::cos(two_pi * u2);
    }

    Vec uniform_vec(const Vec& lower, const Vec& upper) {
        if (lower.size() != upper.size()) throw DimensionMismatch("uniform_vec");
        Vec v(lower.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = uniform(lower[i], upper[i]);
        return v;
    }

  private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace wdro
