#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace zpsync {

using Rng = std::mt19937_64;

/// Sub-stream tags. Each trial draws its data, channel, noise and search
/// randomness from separate streams so that changing one parameter (for
/// example N) does not shift the random numbers consumed elsewhere.
enum class Stream : std::uint64_t {
    TrueOffset = 1,
    Source = 2,
    Channel = 3,
    Noise = 4,
    Golden = 5,
    Mcs = 6,
    PdpError = 7,
    Diagnostics = 8,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic engine keyed by a root seed and a path of integer keys.
Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

inline Rng make_stream(std::uint64_t seed, std::uint64_t trial, Stream purpose) {
    return make_stream(seed, {trial, static_cast<std::uint64_t>(purpose)});
}

/// Child engine seeded from a parent draw.
Rng fork(Rng& parent, Stream purpose);

} // namespace zpsync
