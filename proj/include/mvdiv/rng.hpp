#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace mvdiv {

/// xoshiro256++ (Blackman & Vigna). Small state, fast, passes BigCrush;
/// satisfies UniformRandomBitGenerator so it plugs into <random>/Boost.Random.
class Xoshiro256pp {
public:
    using result_type = std::uint64_t;

    /// State filled from a SplitMix64 sequence started at `seed`.
    explicit Xoshiro256pp(std::uint64_t seed) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
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

    /// Uniform double in (0, 1) with 53 random bits.
    double uniform_open() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    using State = std::array<std::uint64_t, 4>;

    const State& state() const noexcept { return s_; }
    /// Resumes a generator from a previously saved state (must not be all zero).
    static Xoshiro256pp from_state(const State& state) noexcept {
        Xoshiro256pp g(0);
        g.s_ = state;
        return g;
    }

    friend bool operator==(const Xoshiro256pp&, const Xoshiro256pp&) = default;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_;
};

/// SplitMix64 finalizer; a bijective 64-bit mix.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Generator for path `index` of a run seeded with `seed`. Depends only on
/// (seed, index), so a path's draws are independent of how paths are
/// scheduled across workers.
Xoshiro256pp path_stream(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace mvdiv
