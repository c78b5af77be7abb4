#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "immp/linalg.hpp"

namespace immp {

/// One random stream: a 64-bit Mersenne twister with its own normal/uniform state.
class RandomStream {
 public:
  RandomStream() = default;
  explicit RandomStream(std::seed_seq& seq) : engine_(seq) {}

  double gaussian() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  Vec gaussian(Index n);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Stable 64-bit FNV-1a hash of a stream tag.
std::uint64_t stream_tag_hash(std::string_view tag);

/// Stream determined by (seed, replica, tag) only.
RandomStream rng_stream(std::uint64_t seed, std::uint64_t replica, std::string_view tag);

/// Noise sources used by the steppers. The position-momentum noise, the
/// auxiliary-momentum noise and the Metropolis uniforms come from separate
/// streams so that runs with different penalties (or without auxiliary
/// variables) consume identical position noise.
struct NoiseStreams {
  RandomStream momentum;
  RandomStream auxiliary;
  RandomStream metropolis;

  static NoiseStreams make(std::uint64_t seed, std::uint64_t replica);
};

}  // namespace immp
