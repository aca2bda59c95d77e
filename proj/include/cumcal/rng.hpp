#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cumcal {

using Engine = std::mt19937_64;

/// Independent stream identified by a root seed and a list of stream tags
/// (cell identity, replicate counter, ...). Streams depend only on these
/// values, never on execution order.
inline Engine make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (stream.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (const std::uint64_t tag : stream) {
    push(tag);
  }
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

inline std::uint64_t double_bits(double v) {
  return std::bit_cast<std::uint64_t>(v);
}

}  // namespace cumcal
