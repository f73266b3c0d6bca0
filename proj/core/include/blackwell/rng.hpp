#pragma once

#include <cstdint>
#include <random>

namespace blackwell {

// splitmix64 finalizer, used only to derive child stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

// Named engine streams. One run of the game engine owns exactly three
// independent streams: context draws, Player action draws, Nature action
// draws. Diagnostics derive replication streams with ids >= kFirstReplica.
enum class Stream : std::uint64_t {
  context = 0,
  player = 1,
  nature = 2,
};
inline constexpr std::uint64_t kFirstReplica = 16;

// Child stream `id` of master `seed`: mt19937_64 seeded with
// mix64(mix64(seed) ^ mix64(id + 1)). This is the stream-splitting rule;
// all reproducibility guarantees assume it.
inline Rng make_stream(std::uint64_t seed, std::uint64_t id) {
  return Rng(mix64(mix64(seed) ^ mix64(id + 1)));
}

inline Rng make_stream(std::uint64_t seed, Stream s) {
  return make_stream(seed, static_cast<std::uint64_t>(s));
}

// Uniform in [0,1) from the top 53 bits of one engine draw. Avoids
// std::uniform_real_distribution, whose output is not pinned by the
// standard; this mapping is bit-stable across platforms.
inline double uniform01(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

}  // namespace blackwell
