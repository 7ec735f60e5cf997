#pragma once

// Stateless random draws: every value is a hash of its coordinates, so the result of a
// simulation does not depend on the order (or the thread) in which draws are made.

#include <cstdint>

namespace mcadiff::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stream tags keep the draw families of one seed disjoint.
enum class Stream : std::uint64_t {
    BlockRotation = 0x726f74,
    Skip = 0x736b6970,
    Fill = 0x66696c6c,
    Trial = 0x747269616c,
    Placement = 0x706c6163,
    Bootstrap = 0x626f6f74,
};

constexpr std::uint64_t counter_hash(std::uint64_t seed, Stream stream, std::uint64_t a, std::uint64_t b,
                                     std::uint64_t c) {
    std::uint64_t h = mix64(seed ^ 0x6d63616469666600ULL);
    h = mix64(h ^ static_cast<std::uint64_t>(stream));
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    return mix64(h ^ c);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

}  // namespace mcadiff::rng
