#pragma once

#include <cstdint>
#include <random>

#include "mochlab/littlewood_paley.hpp"

namespace mochlab {

/// Portable uniform draws on top of mt19937_64 (the std distributions are
/// implementation-defined, which would break cross-toolchain determinism).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

/// Random real trigonometric polynomial with modes |k| <= max_mode and
/// coefficient magnitudes ~ (1 + k)^-decay.
RealField random_bandlimited(const Grid& grid, std::uint64_t seed, std::size_t max_mode,
                             double decay = 1.0);

/// Random field whose spectrum lies inside the support of block j >= 0.
RealField random_annulus_field(const DyadicPartition& part, int j, std::uint64_t seed);

}  // namespace mochlab
