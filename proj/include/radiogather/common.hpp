#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/dynamic_bitset.hpp>

namespace radiogather {

using NodeId = std::int32_t;
using Step = std::int64_t;
using Freq = std::int32_t;
using Seed = std::uint64_t;

/// Set of node labels (or rumor origins) over the universe [0, n).
using LabelSet = boost::dynamic_bitset<std::uint64_t>;

inline constexpr Step kNeverStep = std::numeric_limits<Step>::max();

/// Thrown when a run is requested with an incompatible protocol/model pairing
/// or malformed configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// ceil(log2 n), clamped to at least 1 so derived lengths never degenerate.
inline int log2_ceil(std::int64_t n) {
  int bits = 0;
  std::int64_t v = 1;
  while (v < n) {
    v <<= 1;
    ++bits;
  }
  return bits < 1 ? 1 : bits;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent seed for a sub-stream, so one base seed can fan out
/// deterministically across instances, ladder rungs, trials, etc.
inline Seed derive_seed(Seed base, std::uint64_t tag) {
  return splitmix64(base ^ splitmix64(tag));
}

inline Seed derive_seed(Seed base, std::uint64_t tag_a, std::uint64_t tag_b) {
  return derive_seed(derive_seed(base, tag_a), tag_b);
}

/// Portable bounded draw; std::uniform_int_distribution is not specified
/// bit-for-bit across standard libraries.
inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  // rejection sampling to keep the draw unbiased
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

inline double draw_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t hash_label_set(const LabelSet& s,
                                    std::uint64_t h = 0xcbf29ce484222325ULL) {
  std::uint64_t size = s.size();
  h = fnv1a(&size, sizeof size, h);
  std::vector<std::uint64_t> blocks(s.num_blocks());
  boost::to_block_range(s, blocks.begin());
  for (std::uint64_t b : blocks) h = fnv1a(&b, sizeof b, h);
  return h;
}

}  // namespace radiogather
