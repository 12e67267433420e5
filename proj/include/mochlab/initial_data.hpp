#pragma once

#include <string>

#include "mochlab/besov.hpp"

namespace mochlab {

enum class CorrectorMode {
  /// Multiplier -1/(1 + xi^2), i.e. -(1 - d_xx)^{-1}.
  Regular,
  /// Multiplier 1/(1 - xi^2), i.e. -(-1 - d_xx)^{-1}; zeroed at |xi| = 1.
  Literal,
};

std::string to_string(CorrectorMode mode);
/// Accepts "regular" or "literal".
CorrectorMode parse_corrector_mode(const std::string& name);

double corrector_symbol(CorrectorMode mode, double xi) noexcept;

/// Indicator of [0, L/2) sampled on the grid (1 at the node x = 0).
RealField periodized_heaviside(const Grid& grid);

/// S_N h: the lowpass S_N applied to the Fourier series of the periodized
/// step. The coefficients of the step are taken in closed form, so the result
/// does not carry the sampling error of the discontinuity.
RealField smoothed_step(const DyadicPartition& part, int N);

/// Carrier frequency 2^{N+5}.
double carrier_frequency(int N);
/// Smallest grid recommended for a given N: 2^{N+8} points on [-pi, pi).
Grid inflation_grid(int N);

struct InflationDatum {
  int N = 0;
  CorrectorMode corrector = CorrectorMode::Regular;
  Grid grid;
  RealField gamma0;
  RealField carrier;     // cos(2^{N+5} x)
  RealField modulation;  // 1 + N^{-1/10} S_N h
  RealField correction;  // corrector applied to carrier * modulation
  /// Largest mode index carrying energy in gamma0.
  std::size_t band = 0;
  /// True when N <= 10, below the range where the growth bounds are asymptotic.
  bool below_asymptotic_range = false;
  double norm_b0_inf_1 = 0.0;
  double norm_weighted = 0.0;
  /// ||gamma0^2||_{B^0_{inf,1}}.
  double norm_square_b0_inf_1 = 0.0;
};

/// gamma0 = N^{-1/10} [cos(2^{N+5} x)(1 + N^{-1/10} S_N h) + R].
/// Requires a 2*pi-commensurate period and a Nyquist wavenumber above
/// (8/3) 2^{N+5}.
InflationDatum build_gamma0(const DyadicPartition& part, int N,
                            CorrectorMode mode = CorrectorMode::Regular);

struct AlgebraDefect {
  double a = 0.0;  // ||gamma0||_{B^0_{inf,1}}
  double b = 0.0;  // ||gamma0^2||_{B^0_{inf,1}}
  double ratio = 0.0;
};

/// Alias-free square of `u` when its spectrum sits below half the Nyquist
/// index; throws ErrorKind::Resolution otherwise.
RealField exact_square(const RealField& u, std::size_t band);

AlgebraDefect algebra_defect(const DyadicPartition& part, const InflationDatum& datum);

/// Share of ||u||_{B^0_{inf,1}} carried by blocks j <= j_cut.
double low_frequency_share(const DyadicPartition& part, const RealField& u, int j_cut);

}  // namespace mochlab
