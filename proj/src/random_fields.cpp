#include "mochlab/random_fields.hpp"

#include <cmath>

#include "mochlab/error.hpp"

namespace mochlab {

RealField random_bandlimited(const Grid& grid, std::uint64_t seed, std::size_t max_mode,
                             double decay) {
  require(max_mode < grid.nyquist_index(), "random field band must stay below Nyquist");
  SeededRng rng(seed);
  SpectralField sp(grid);
  auto c = sp.coefficients();
  c[0] = rng.uniform(-1.0, 1.0);
  for (std::size_t k = 1; k <= max_mode; ++k) {
    const double amp = std::pow(1.0 + static_cast<double>(k), -decay);
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    c[k] = amp * Complex(re, im);
  }
  return to_physical(sp);
}

RealField random_annulus_field(const DyadicPartition& part, int j, std::uint64_t seed) {
  require(j >= 0 && j <= part.j_max(), "annulus field needs 0 <= j <= j_max");
  const auto s = part.support(j);
  SeededRng rng(seed);
  SpectralField sp(part.grid());
  auto c = sp.coefficients();
  const std::size_t nyq = part.grid().nyquist_index();
  for (std::size_t k = s.k_begin; k < s.k_end && k < nyq; ++k)
    c[k] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return to_physical(sp);
}

}  // namespace mochlab
