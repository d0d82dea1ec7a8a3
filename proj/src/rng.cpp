#include "mvdiv/rng.hpp"

namespace mvdiv {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t seed) noexcept {
    std::uint64_t state = seed;
    for (auto& word : s_) {
        state += 0x9e3779b97f4a7c15ULL;
        word = mix64(state);
    }
}

Xoshiro256pp path_stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return Xoshiro256pp(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace mvdiv
