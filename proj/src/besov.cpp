#include "mochlab/besov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "mochlab/error.hpp"
#include "mochlab/io.hpp"

namespace mochlab {

void validate(const BesovIndex& idx) {
  require(std::isfinite(idx.s), "Besov regularity s must be finite");
  require(idx.p >= 1.0, "Besov integrability p must lie in [1, inf]");
  require(idx.r >= 1.0, "Besov summability r must lie in [1, inf]");
}

double lp_norm(std::span<const double> samples, double spacing, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : samples) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  for (double v : samples) acc += std::pow(std::abs(v), p);
  return std::pow(spacing * acc, 1.0 / p);
}

double NormProfile::b0_inf_1() const {
  double s = 0.0;
  for (double v : block_sup_norms) s += v;
  return s;
}

double NormProfile::b0_inf_inf() const {
  double m = 0.0;
  for (double v : block_sup_norms) m = std::max(m, v);
  return m;
}

WeightedNormValue NormProfile::weighted() const {
  WeightedNormValue out;
  for (std::size_t i = 0; i < j_values.size(); ++i) {
    const double w = static_cast<double>(j_values[i] + 2);
    const double v = w * w * block_sup_norms[i];
    if (v > out.value) {
      out.value = v;
      out.argmax_j = j_values[i];
    }
  }
  return out;
}

double NormProfile::combine(double s, double r, bool use_lp) const {
  const auto& norms = (use_lp && block_lp_norms) ? *block_lp_norms : block_sup_norms;
  double acc = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    const double term = std::pow(2.0, s * j_values[i]) * norms[i];
    if (std::isinf(r))
      acc = std::max(acc, term);
    else
      acc += std::pow(term, r);
  }
  return std::isinf(r) ? acc : std::pow(acc, 1.0 / r);
}

std::string NormProfile::to_csv() const {
  std::string out = "j,block_sup_norm\n";
  for (std::size_t i = 0; i < j_values.size(); ++i) {
    out += std::to_string(j_values[i]);
    out += ',';
    out += format_double(block_sup_norms[i]);
    out += '\n';
  }
  return out;
}

NormProfile norm_profile(const DyadicPartition& part, const SpectralField& u_hat) {
  NormProfile prof;
  prof.j_values.reserve(static_cast<std::size_t>(part.num_blocks()));
  prof.block_sup_norms.reserve(prof.j_values.capacity());
  part.for_each_block(u_hat, [&](int j, std::span<const double> s) {
    prof.j_values.push_back(j);
    prof.block_sup_norms.push_back(lp_norm(s, 0.0, kInf));
  });
  return prof;
}

NormProfile norm_profile(const DyadicPartition& part, const RealField& u, std::optional<double> p) {
  require_same_grid(part.grid(), u.grid());
  u.require_finite("norm_profile");
  NormProfile prof;
  const double h = u.grid().spacing();
  const bool finite_p = p && std::isfinite(*p);
  if (p) require(*p >= 1.0, "L^p exponent must be >= 1");
  if (finite_p) {
    prof.p = *p;
    prof.block_lp_norms.emplace();
  }
  part.for_each_block(u, [&](int j, std::span<const double> s) {
    prof.j_values.push_back(j);
    prof.block_sup_norms.push_back(lp_norm(s, h, kInf));
    if (finite_p) prof.block_lp_norms->push_back(lp_norm(s, h, *p));
  });
  return prof;
}

namespace {

// Value and first two derivatives of sum over k in [kb, ke) of the real
// series with half-spectrum coefficients c.
struct Jet {
  double f = 0.0, d1 = 0.0, d2 = 0.0;
};

Jet series_jet(std::span<const Complex> c, std::size_t kb, std::size_t ke, std::size_t nyq,
               double dxi, double x) {
  Jet out;
  Complex rot, step = std::polar(1.0, dxi * x);
  for (std::size_t k = kb; k < ke; ++k) {
    if (k == kb || ((k - kb) & 63) == 0) rot = std::polar(1.0, dxi * static_cast<double>(k) * x);
    const double xi = dxi * static_cast<double>(k);
    const double w = (k == 0 || k == nyq) ? 1.0 : 2.0;
    const Complex t = c[k] * rot;
    out.f += w * t.real();
    out.d1 -= w * xi * t.imag();
    out.d2 -= w * xi * xi * t.real();
    rot *= step;
  }
  return out;
}

// Grids reused for oversampled block evaluation, keyed by point count.
Grid fine_grid(std::size_t n, double period) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, double>, Grid> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(n, period);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, Grid::make(n, period)).first;
  return it->second;
}

struct SupScratch {
  std::vector<Complex> padded;
  std::vector<double> samples;
  std::vector<std::pair<double, std::size_t>> peaks;
};

// Maximum of |f| for the real series with half-spectrum coefficients c
// supported on [kb, ke). The series is sampled at >= 16 points per shortest
// wavelength (zero-padded transform), local maxima are ranked by their
// parabolic vertex estimate, and the best `candidates` are polished by
// Newton steps on the exact series.
double polished_sup(const Grid& g, std::span<const Complex> c, std::size_t kb, std::size_t ke,
                    std::size_t candidates, SupScratch& w) {
  while (ke > kb && c[ke - 1] == Complex(0.0)) --ke;
  if (ke == kb) return 0.0;
  const std::size_t n = g.size();
  const std::size_t nyq = g.nyquist_index();
  std::size_t factor = 1;
  while (factor < 16 && factor * n < 16 * (ke - 1)) factor *= 2;
  const Grid fg = factor == 1 ? g : fine_grid(factor * n, g.period());
  const std::size_t nf = fg.size();
  w.padded.assign(fg.num_modes(), Complex(0.0));
  for (std::size_t k = kb; k < ke; ++k) w.padded[k] = c[k];
  // On a finer grid the coarse Nyquist mode is an ordinary mode counted twice.
  if (factor > 1 && ke > nyq) w.padded[nyq] *= 0.5;
  w.samples.resize(nf);
  fg.inverse(w.padded, w.samples);

  const auto& s = w.samples;
  w.peaks.clear();
  double best = 0.0;
  for (std::size_t i = 0; i < nf; ++i) {
    const double b = std::abs(s[i]);
    best = std::max(best, b);
    const double a = std::abs(s[(i + nf - 1) % nf]);
    const double d = std::abs(s[(i + 1) % nf]);
    if (b > 0.0 && b >= a && b >= d) {
      const double curv = 2.0 * b - a - d;
      const double est = curv > 0.0 ? b + (d - a) * (d - a) / (8.0 * curv) : b;
      w.peaks.emplace_back(est, i);
    }
  }
  const std::size_t take = std::min(candidates, w.peaks.size());
  std::partial_sort(w.peaks.begin(), w.peaks.begin() + static_cast<long>(take), w.peaks.end(),
                    [](const auto& x, const auto& y) {
                      return x.first > y.first || (x.first == y.first && x.second < y.second);
                    });
  const double h = fg.spacing();
  const double dxi = g.wavenumber(1);
  for (std::size_t q = 0; q < take; ++q) {
    double x = fg.node(w.peaks[q].second);
    Jet jet = series_jet(c, kb, ke, nyq, dxi, x);
    for (int it = 0; it < 8; ++it) {
      // Newton on f' toward a maximum of |f|; f f'' < 0 there.
      if (!(jet.f * jet.d2 < 0.0)) break;
      const double dx = std::clamp(-jet.d1 / jet.d2, -h, h);
      const Jet next = series_jet(c, kb, ke, nyq, dxi, x + dx);
      if (std::abs(next.f) <= std::abs(jet.f)) break;
      x += dx;
      jet = next;
      if (std::abs(dx) < 1e-14 * g.period()) break;
    }
    best = std::max(best, std::abs(jet.f));
  }
  return best;
}

}  // namespace

NormProfile norm_profile_refined(const DyadicPartition& part, const SpectralField& u_hat,
                                 std::size_t candidates) {
  require_same_grid(part.grid(), u_hat.grid());
  const Grid& g = u_hat.grid();
  SpectralField blk(g);
  SupScratch scratch;
  NormProfile prof;
  for (int j = -1; j <= part.j_max(); ++j) {
    const auto sup = part.support(j);
    part.apply_block(u_hat.coefficients(), j, blk.coefficients());
    prof.j_values.push_back(j);
    prof.block_sup_norms.push_back(
        polished_sup(g, blk.coefficients(), sup.k_begin, sup.k_end, candidates, scratch));
  }
  return prof;
}

NormProfile norm_profile_refined(const DyadicPartition& part, const RealField& u,
                                 std::size_t candidates) {
  require_same_grid(part.grid(), u.grid());
  u.require_finite("norm_profile_refined");
  return norm_profile_refined(part, to_spectral(u), candidates);
}

double refined_sup_norm(const SpectralField& u_hat, std::size_t candidates) {
  SupScratch scratch;
  const auto c = u_hat.coefficients();
  return polished_sup(u_hat.grid(), c, 0, c.size(), candidates, scratch);
}

double besov_norm(const DyadicPartition& part, const RealField& u, const BesovIndex& idx) {
  validate(idx);
  if (std::isinf(idx.p)) return norm_profile(part, u).combine(idx.s, idx.r, false);
  return norm_profile(part, u, idx.p).combine(idx.s, idx.r, true);
}

WeightedNormValue weighted_norm(const DyadicPartition& part, const RealField& u) {
  return norm_profile(part, u).weighted();
}

NormTriple norm_triple(const DyadicPartition& part, const RealField& u) {
  const auto prof = norm_profile(part, u);
  return {prof.b0_inf_1(), prof.weighted().value, u.sup_norm()};
}

}  // namespace mochlab
