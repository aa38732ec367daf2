#include "heterolab/rng.hpp"

namespace heterolab {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = a;
  std::uint64_t h = splitmix64(state);
  state = h ^ b;
  return splitmix64(state);
}

}  // namespace

RngSeed RngSeed::derive(std::uint64_t index) const {
  return {master, mix(stream, index + 1)};
}

Rng::Rng(RngSeed seed) {
  std::uint64_t state = mix(seed.master, seed.stream);
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state))};
  engine_.seed(seq);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Reject the low tail so every residue class is equally likely.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

}  // namespace heterolab
