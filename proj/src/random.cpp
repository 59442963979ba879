#include "hospstay/random.hpp"

#include <algorithm>

namespace hospstay {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::for_replication(std::uint64_t seed, std::uint64_t index) {
  return RandomStream(splitmix64(splitmix64(seed) ^ index));
}

std::size_t RandomStream::discrete(std::span<const double> cumulative) {
  const double u = uniform();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace hospstay
