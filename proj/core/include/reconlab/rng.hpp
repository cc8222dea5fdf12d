#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace reconlab {

/** Engine used everywhere. mt19937_64 seeded from a single 64-bit value is
 *  fully specified by the standard, so streams are bit-identical across
 *  platforms as long as all variates are drawn through the helpers below
 *  (the std::*_distribution classes are implementation-defined and must not
 *  be used). */
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/** Derive an independent stream seed from a master seed. Used for per-trial /
 *  per-chain / per-worker streams; (master, stream) -> seed is a fixed
 *  injective-in-practice mixing, so experiments are reproducible for any job
 *  count. */
inline std::uint64_t seed_for(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    (void)splitmix64(s);
    s ^= 0x9E3779B97F4A7C15ULL * (stream + 1);
    std::uint64_t out = splitmix64(s);
    out ^= splitmix64(s);
    return out;
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Uniform integer in [0, n). Unbiased via rejection sampling.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
        std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform_real(rng) < p; }

/** Poisson variate by inversion for small means; larger means are split as
 *  the sum of two independent halves (exact by Poisson additivity). Keeps the
 *  sampler portable and reproducible, unlike std::poisson_distribution. */
inline std::uint64_t poisson(Rng& rng, double mean) {
    if (mean < 0) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0) return 0;
    if (mean > 20.0) return poisson(rng, mean / 2) + poisson(rng, mean / 2);
    double p = std::exp(-mean);
    double cum = p;
    double u = uniform_real(rng);
    std::uint64_t k = 0;
    while (u > cum) {
        ++k;
        p *= mean / static_cast<double>(k);
        cum += p;
        if (p == 0.0) break;  // exhausted double precision; tail mass ~ 0
    }
    return k;
}

}  // namespace reconlab
