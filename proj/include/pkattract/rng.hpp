#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "pkattract/projective.hpp"

namespace pkattract {

using Rng = std::mt19937_64;

/// Independent substream for (seed, stream index). Streams are derived by a
/// splitmix64 hash so nearby indices give unrelated generator states.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

double uniform01(Rng& rng);
/// Uniform point of the closed disc |z| <= radius.
cplx uniform_disc(Rng& rng, double radius);
/// Uniform point of the circle |z| = radius.
cplx uniform_circle(Rng& rng, double radius);

/// Samples per chunk for seeded parallel loops. Results depend only on
/// (seed, chunk index), never on the worker count.
inline constexpr std::size_t kChunkSize = 1024;

/// Runs body(begin, end, rng) over [0, n) split into kChunkSize chunks, with
/// chunk c drawing from make_stream(seed, c). Chunks are distributed over
/// `workers` threads; each index is written by exactly one chunk.
void parallel_chunks(std::size_t n, int workers, std::uint64_t seed,
                     const std::function<void(std::size_t, std::size_t, Rng&)>& body);

}  // namespace pkattract
