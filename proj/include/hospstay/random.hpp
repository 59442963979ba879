#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace hospstay {

/// Deterministic random stream. Uniforms are built from the top 53 bits of
/// a 64-bit Mersenne Twister so sequences are identical on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for replication `index` of a run seeded with `seed`.
  static RandomStream for_replication(std::uint64_t seed, std::uint64_t index);

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Index drawn from a cumulative distribution whose last entry is 1.
  std::size_t discrete(std::span<const double> cumulative);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace hospstay
