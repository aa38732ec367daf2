#pragma once

#include <cstdint>
#include <random>

namespace heterolab {

// A (master, stream) pair. Distinct streams of the same master seed give
// statistically independent sequences; equal pairs give identical ones.
struct RngSeed {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  // Sub-stream keyed by an index, e.g. a partition or a K-grid position.
  RngSeed derive(std::uint64_t index) const;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

class Rng {
 public:
  explicit Rng(RngSeed seed);

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on [0, n) by rejection; n must be positive.
  std::uint64_t below(std::uint64_t n);

  double normal() { return normal_(engine_); }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace heterolab
