#include "mochlab/spectral_ops.hpp"

#include <cmath>

#include "mochlab/error.hpp"

namespace mochlab {

void derivative_inplace(const Grid& grid, std::span<Complex> coeffs) {
  const auto xi = grid.wavenumbers();
  for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] *= Complex(0.0, xi[k]);
  coeffs[grid.nyquist_index()] = 0.0;
}

RealField derivative(const RealField& f) {
  auto sp = to_spectral(f);
  derivative_inplace(f.grid(), sp.coefficients());
  return to_physical(sp);
}

RealField apply_symbol(const RealField& f, const std::function<double(double)>& symbol) {
  auto sp = to_spectral(f);
  const auto xi = f.grid().wavenumbers();
  auto c = sp.coefficients();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= symbol(xi[k]);
  return to_physical(sp);
}

RealField helmholtz_inverse(const RealField& f) { return apply_symbol(f, helmholtz_inverse_symbol); }

RealField helmholtz(const RealField& f) {
  return apply_symbol(f, [](double xi) { return -(1.0 + xi * xi); });
}

std::size_t dealias_cutoff(const Grid& grid) noexcept {
  // k <= (2/3)(n/2)  <=>  3k <= n
  return grid.size() / 3;
}

void dealias_inplace(const Grid& grid, std::span<Complex> coeffs) noexcept {
  for (std::size_t k = dealias_cutoff(grid) + 1; k < coeffs.size(); ++k) coeffs[k] = 0.0;
}

RealField dealias(const RealField& f) {
  auto sp = to_spectral(f);
  dealias_inplace(f.grid(), sp.coefficients());
  return to_physical(sp);
}

RealField dealiased_product(const RealField& a, const RealField& b) {
  return dealias(pointwise_product(a, b));
}

void evaluate_series(const SpectralField& f, std::span<const double> x, std::span<double> out) {
  require(x.size() == out.size(), "evaluate_series: size mismatch");
  const auto c = f.coefficients();
  const std::size_t nyq = f.grid().nyquist_index();
  const double dxi = f.grid().wavenumber(1);
  for (std::size_t p = 0; p < x.size(); ++p) {
    // exp(i k dxi x) by repeated multiplication; renormalized periodically
    // to keep the recurrence on the unit circle.
    const Complex step = std::polar(1.0, dxi * x[p]);
    Complex rot = step;
    double acc = c[0].real();
    for (std::size_t k = 1; k < nyq; ++k) {
      acc += 2.0 * (c[k] * rot).real();
      rot *= step;
      if ((k & 63) == 0) rot /= std::abs(rot);
    }
    acc += (c[nyq] * std::polar(1.0, dxi * static_cast<double>(nyq) * x[p])).real();
    out[p] = acc;
  }
}

}  // namespace mochlab
