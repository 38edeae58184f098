#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "riskcast/errors.hpp"

namespace riskcast {

// Self-contained xoshiro256** generator. The standard library distributions
// are implementation-defined, which would break byte-identical replays, so
// uniform/normal/Poisson sampling is spelled out here.
class Rng {
public:
    explicit Rng(std::uint64_t seed) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        // SplitMix64 expansion of the seed into the xoshiro state.
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
        has_cached_normal_ = false;
    }

    // Independent substream for task `stream`; parallel and serial
    // schedules draw identical numbers per task.
    Rng derive(std::uint64_t stream) const {
        std::uint64_t mix = state_[0] ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        return Rng(mix ^ (state_[2] >> 7));
    }

    std::uint64_t next_u64() {
        std::uint64_t* s = state_;
        const std::uint64_t result = rotl(s[1] * 5, 7) * 9;
        const std::uint64_t t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = rotl(s[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw ValidationError("uniform_index: n must be positive");
        const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via Box-Muller (cached pair).
    double normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        cached_normal_ = radius * std::sin(angle);
        has_cached_normal_ = true;
        return radius * std::cos(angle);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Poisson draw. Knuth multiplication below 64, normal approximation with
    // continuity correction above (means there are large enough that the
    // relative error is negligible for count simulation).
    std::uint64_t poisson(double mean) {
        if (mean < 0.0 || !std::isfinite(mean))
            throw ValidationError("poisson: mean must be finite and non-negative");
        if (mean > 1e12) throw NumericalError("poisson: mean overflow (> 1e12)");
        if (mean == 0.0) return 0;
        if (mean < 64.0) {
            const double limit = std::exp(-mean);
            std::uint64_t count = 0;
            double product = uniform();
            while (product > limit) {
                ++count;
                product *= uniform();
            }
            return count;
        }
        const double draw = std::floor(mean + std::sqrt(mean) * normal() + 0.5);
        return draw <= 0.0 ? 0 : static_cast<std::uint64_t>(draw);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4] = {};
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace riskcast
