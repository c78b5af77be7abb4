#include "immp/rng.hpp"

namespace immp {

Vec RandomStream::gaussian(Index n) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal_(engine_);
  return v;
}

std::uint64_t stream_tag_hash(std::string_view tag) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

RandomStream rng_stream(std::uint64_t seed, std::uint64_t replica, std::string_view tag) {
  const std::uint64_t h = stream_tag_hash(tag);
  auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x & 0xffffffffULL); };
  auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(replica), hi(replica), lo(h), hi(h)};
  return RandomStream(seq);
}

NoiseStreams NoiseStreams::make(std::uint64_t seed, std::uint64_t replica) {
  return NoiseStreams{rng_stream(seed, replica, "momentum"), rng_stream(seed, replica, "auxiliary"),
                      rng_stream(seed, replica, "metropolis")};
}

}  // namespace immp
