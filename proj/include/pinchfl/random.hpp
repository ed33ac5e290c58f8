#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace pinchfl {

using Engine = std::mt19937_64;

// splitmix64 finalizer; used to decorrelate substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for the substream identified by `keys` under the run seed.
// Substreams are independent of evaluation order, so trials and
// training events can be replayed in any order or on any worker.
inline std::uint64_t substream_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = 0x5851f42d4c957f2dULL;
    for (auto k : keys) h = mix64(h ^ mix64(k));
    return seed ^ h;
}

inline Engine substream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    return Engine(substream_seed(seed, keys));
}

}  // namespace pinchfl
