#pragma once

#include <functional>

#include "mochlab/grid.hpp"

namespace mochlab {

/// d/dx as the multiplier i*xi. The Nyquist bin of the result is zeroed so
/// derivatives of real fields stay real.
RealField derivative(const RealField& f);
void derivative_inplace(const Grid& grid, std::span<Complex> coeffs);

/// Symbol of G^{-1} = (d_xx - 1)^{-1}: -1/(1 + xi^2).
inline double helmholtz_inverse_symbol(double xi) noexcept { return -1.0 / (1.0 + xi * xi); }

/// G^{-1} f with G = d_xx - 1.
RealField helmholtz_inverse(const RealField& f);
/// G f = f_xx - f.
RealField helmholtz(const RealField& f);

/// Highest integer mode kept by the 2/3 rule: modes with k > (2/3)*(n/2)
/// are removed.
std::size_t dealias_cutoff(const Grid& grid) noexcept;

/// 2/3-rule truncation. Idempotent.
RealField dealias(const RealField& f);
void dealias_inplace(const Grid& grid, std::span<Complex> coeffs) noexcept;

/// Generic real even multiplier m(|xi|).
RealField apply_symbol(const RealField& f, const std::function<double(double)>& symbol);

/// Pointwise product followed by 2/3-rule truncation.
RealField dealiased_product(const RealField& a, const RealField& b);

/// Evaluates the trigonometric interpolant of `f` (given by its half-spectrum)
/// at arbitrary abscissae by direct summation of the Fourier series.
void evaluate_series(const SpectralField& f, std::span<const double> x, std::span<double> out);

}  // namespace mochlab
