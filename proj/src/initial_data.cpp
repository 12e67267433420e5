#include "mochlab/initial_data.hpp"

#include <cmath>
#include <numbers>

#include "mochlab/error.hpp"

namespace mochlab {

namespace {

// Fourier coefficient of the indicator of [0, L/2) at mode k >= 0.
Complex step_coefficient(std::size_t k) {
  if (k == 0) return 0.5;
  if (k % 2 == 0) return 0.0;
  return Complex(0.0, -1.0 / (std::numbers::pi * static_cast<double>(k)));
}

void require_order(int N) {
  require(N > 0, "N must be a positive integer (got " + std::to_string(N) + ")");
  require(N <= 40, "N is too large to represent (got " + std::to_string(N) + ")");
}

std::string resolution_hint(int N) {
  return "use at least n = 2^" + std::to_string(N + 8) + " points on a 2*pi period";
}

// Half-spectrum coefficients of S_N h and the index of its last nonzero mode.
std::vector<Complex> smoothed_step_coefficients(const DyadicPartition& part, int N,
                                                std::size_t& last) {
  const Grid& g = part.grid();
  require_order(N);
  if (N > part.j_max() + 1 || std::ldexp(1.0, N) >= g.max_wavenumber())
    fail(ErrorKind::Resolution, "smoothed step at N = " + std::to_string(N) +
                                    " needs a Nyquist wavenumber above 2^N; " + resolution_hint(N));
  std::vector<Complex> c(g.num_modes());
  last = 0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double m = part.lowpass_multiplier(N, k);
    if (m == 0.0) continue;
    c[k] = m * step_coefficient(k);
    last = k;
  }
  return c;
}

}  // namespace

std::string to_string(CorrectorMode mode) {
  return mode == CorrectorMode::Regular ? "regular" : "literal";
}

CorrectorMode parse_corrector_mode(const std::string& name) {
  if (name == "regular") return CorrectorMode::Regular;
  if (name == "literal") return CorrectorMode::Literal;
  fail(ErrorKind::InvalidArgument, "corrector must be 'regular' or 'literal' (got '" + name + "')");
}

double corrector_symbol(CorrectorMode mode, double xi) noexcept {
  const double xi2 = xi * xi;
  if (mode == CorrectorMode::Regular) return -1.0 / (1.0 + xi2);
  if (std::abs(xi2 - 1.0) < 1e-12) return 0.0;
  return 1.0 / (1.0 - xi2);
}

RealField periodized_heaviside(const Grid& grid) {
  return RealField::from_function(grid, [](double x) { return x >= 0.0 ? 1.0 : 0.0; });
}

RealField smoothed_step(const DyadicPartition& part, int N) {
  std::size_t last = 0;
  auto c = smoothed_step_coefficients(part, N, last);
  return to_physical(SpectralField(part.grid(), std::move(c)));
}

double carrier_frequency(int N) {
  require_order(N);
  return std::ldexp(1.0, N + 5);
}

Grid inflation_grid(int N) {
  require_order(N);
  require(N + 8 <= 26, "inflation grid for N = " + std::to_string(N) + " exceeds 2^26 points",
          ErrorKind::Resolution);
  return Grid::make(std::size_t{1} << (N + 8));
}

InflationDatum build_gamma0(const DyadicPartition& part, int N, CorrectorMode mode) {
  require_order(N);
  const Grid& g = part.grid();
  const double K = carrier_frequency(N);
  if (!(g.max_wavenumber() > (8.0 / 3.0) * K))
    fail(ErrorKind::Resolution, "initial datum at N = " + std::to_string(N) +
                                    " needs a Nyquist wavenumber above (8/3) 2^" +
                                    std::to_string(N + 5) + "; " + resolution_hint(N));
  const double turns = K * g.period() / (2.0 * std::numbers::pi);
  const double k_carrier = std::round(turns);
  require(std::abs(turns - k_carrier) < 1e-9 * turns,
          "grid period must make cos(2^{N+5} x) periodic");
  const auto kc = static_cast<std::size_t>(k_carrier);

  const double delta = std::pow(static_cast<double>(N), -0.1);
  std::size_t last = 0;
  auto s = smoothed_step_coefficients(part, N, last);

  // Modulation 1 + delta S_N h on the half spectrum.
  std::vector<Complex> mod(g.num_modes());
  for (std::size_t k = 0; k <= last; ++k) mod[k] = delta * s[k];
  mod[0] += 1.0;
  auto mod_at = [&](long k) -> Complex {
    const auto a = static_cast<std::size_t>(std::labs(k));
    if (a > last) return 0.0;
    return k < 0 ? std::conj(mod[a]) : mod[a];
  };

  // Carrier times modulation: shift the modulation spectrum by +-kc.
  const std::size_t band = kc + last;
  require(band < g.nyquist_index(), "initial datum band reaches the Nyquist mode",
          ErrorKind::Resolution);
  std::vector<Complex> prod(g.num_modes()), corr(g.num_modes()), total(g.num_modes());
  for (std::size_t k = 0; k <= band; ++k) {
    const long kl = static_cast<long>(k);
    const long kcl = static_cast<long>(kc);
    prod[k] = 0.5 * (mod_at(kl - kcl) + mod_at(kl + kcl));
    corr[k] = corrector_symbol(mode, g.wavenumber(k)) * prod[k];
    total[k] = delta * (prod[k] + corr[k]);
  }

  InflationDatum d{N,
                   mode,
                   g,
                   to_physical(SpectralField(g, std::move(total))),
                   RealField::from_function(g, [K](double x) { return std::cos(K * x); }),
                   to_physical(SpectralField(g, std::move(mod))),
                   to_physical(SpectralField(g, std::move(corr))),
                   band,
                   N <= 10};
  d.gamma0.require_finite("initial datum");

  const auto prof = norm_profile_refined(part, d.gamma0);
  d.norm_b0_inf_1 = prof.b0_inf_1();
  d.norm_weighted = prof.weighted().value;
  if (2 * band < g.nyquist_index())
    d.norm_square_b0_inf_1 = norm_profile_refined(part, exact_square(d.gamma0, band)).b0_inf_1();
  else
    d.norm_square_b0_inf_1 = std::nan("");
  return d;
}

RealField exact_square(const RealField& u, std::size_t band) {
  const Grid& g = u.grid();
  if (2 * band >= g.nyquist_index())
    fail(ErrorKind::Resolution, "squaring a field with band " + std::to_string(band) +
                                    " on " + std::to_string(g.size()) +
                                    " points would alias; need n > " + std::to_string(4 * band));
  return pointwise_product(u, u);
}

AlgebraDefect algebra_defect(const DyadicPartition& part, const InflationDatum& datum) {
  require_same_grid(part.grid(), datum.grid);
  AlgebraDefect r;
  r.a = norm_profile_refined(part, datum.gamma0).b0_inf_1();
  r.b = norm_profile_refined(part, exact_square(datum.gamma0, datum.band)).b0_inf_1();
  r.ratio = r.b / (r.a * r.a);
  return r;
}

double low_frequency_share(const DyadicPartition& part, const RealField& u, int j_cut) {
  const auto prof = norm_profile_refined(part, u);
  double low = 0.0, all = 0.0;
  for (std::size_t i = 0; i < prof.j_values.size(); ++i) {
    all += prof.block_sup_norms[i];
    if (prof.j_values[i] <= j_cut) low += prof.block_sup_norms[i];
  }
  return all > 0.0 ? low / all : 0.0;
}

}  // namespace mochlab
