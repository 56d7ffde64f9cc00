#pragma once

#include <cstdint>
#include <random>

namespace mscgarch {

/// All randomness goes through a 64-bit Mersenne Twister.
using Rng = std::mt19937_64;

/// Independent named streams derived from one user seed.
///
/// A stream is seeded with seed_seq{seed, stream, index}, so the simulation
/// stream and each MCMC chain never share state even under the same --seed.
enum class Stream : std::uint64_t {
    simulation = 0,
    mcmc = 1,
    test = 2,
};

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    const auto s = static_cast<std::uint64_t>(stream);
    std::seed_seq seq{lo(seed), hi(seed), lo(s), hi(s), lo(index), hi(index)};
    return Rng(seq);
}

/// Uniform draw on the open interval (0, 1).
inline double uniform01(Rng& rng) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    double u = dist(rng);
    while (u <= 0.0) u = dist(rng);
    return u;
}

inline double beta_draw(Rng& rng, double a, double b) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    const double x = ga(rng);
    const double y = gb(rng);
    return x / (x + y);
}

}  // namespace mscgarch
