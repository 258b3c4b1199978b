#pragma once

#include <cstdint>
#include <random>

namespace crowdship {

using Rng = std::mt19937_64;

/// Independent random streams derived from one experiment seed. Each
/// concern draws from its own stream so that changing how often one concern
/// consumes randomness never perturbs another (common random numbers).
enum class Stream : std::uint64_t {
    traces = 1,
    trace_starts = 2,
    task_arrivals = 3,
    courier_noise = 4,
    training = 5,
    incidents = 6,
    deadlines = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline Rng make_stream(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

/// Counter-based uniform draw in [0, 1) keyed on (seed, stream, a, b, c).
/// Used where a draw must be the same regardless of what else happened in
/// the run, e.g. the incident trial of a given engagement minute.
inline double keyed_uniform(std::uint64_t seed, Stream stream, std::uint64_t a, std::uint64_t b,
                            std::uint64_t c) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace crowdship
