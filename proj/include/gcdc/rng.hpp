#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace gcdc {

/// Seed for a named substream; distinct key tuples give unrelated streams.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> key) {
  std::vector<std::uint32_t> words;
  words.reserve(key.size() * 2);
  for (const auto k : key) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

namespace stream {
inline constexpr std::uint64_t kMatrix = 1;
inline constexpr std::uint64_t kInit = 2;
inline constexpr std::uint64_t kLatency = 3;
inline constexpr std::uint64_t kData = 4;
}  // namespace stream

}  // namespace gcdc
