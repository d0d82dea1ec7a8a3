#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "mvdiv/rng.hpp"

namespace mvdiv::detail {

/// 1024-layer ziggurat for the standard normal (Marsaglia-Tsang layout with
/// Doornik's sampling scheme). x[0] is the pseudo-width of the base strip,
/// x[1] the tail cut-off and x[1024] = 0; ratio[i] = x[i+1] / x[i] and
/// f[i] = exp(-x[i]^2 / 2).
struct Ziggurat {
    static constexpr unsigned kLayers = 1024;
    std::array<double, kLayers + 1> x;
    std::array<double, kLayers + 1> f;
    std::array<double, kLayers> ratio;
};

const Ziggurat& ziggurat() noexcept;

/// One 64-bit draw gives the layer (low 10 bits) and a uniform in [-1, 1)
/// from the top 53 bits.
inline unsigned zig_layer(std::uint64_t bits) noexcept { return static_cast<unsigned>(bits & (Ziggurat::kLayers - 1)); }
inline double zig_uniform(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-52 - 1.0;
}

/// Continues the sampler after the rectangle test failed for (u, layer).
double normal_slow_path(Xoshiro256pp& rng, double u, unsigned layer, const Ziggurat& z) noexcept;

inline double standard_normal(Xoshiro256pp& rng, const Ziggurat& z) noexcept {
    const std::uint64_t bits = rng();
    const double u = zig_uniform(bits);
    const unsigned i = zig_layer(bits);
    if (std::abs(u) < z.ratio[i]) return u * z.x[i];
    return normal_slow_path(rng, u, i, z);
}

}  // namespace mvdiv::detail
