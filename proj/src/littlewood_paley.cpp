#include "mochlab/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mochlab/error.hpp"
#include "mochlab/spectral_ops.hpp"

namespace mochlab {

namespace {
constexpr double kInner = 0.75;
constexpr double kOuter = 8.0 / 3.0;
}  // namespace

double smooth_transition(double t) noexcept { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double smooth_ramp(double t) noexcept {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = smooth_transition(t);
  return a / (a + smooth_transition(1.0 - t));
}

double annulus_bump(double r) noexcept {
  if (r <= kInner || r >= kOuter) return 0.0;
  if (r < 1.0) return smooth_ramp((r - kInner) / (1.0 - kInner));
  if (r <= 2.0) return 1.0;
  return smooth_ramp((kOuter - r) / (kOuter - 2.0));
}

double dyadic_phi(double r) noexcept {
  const double num = annulus_bump(r);
  if (num == 0.0) return 0.0;
  // Only m in {-1, 0, 1} can contribute for r inside the annulus; the wider
  // window costs nothing. Scaling by 2^-m is exact in binary floating point.
  double den = 0.0;
  for (int m = -3; m <= 3; ++m) den += annulus_bump(std::ldexp(r, -m));
  return num / den;
}

double low_chi(double r) noexcept {
  if (r <= kInner) return 1.0;
  double s = 0.0;
  for (int j = 0; std::ldexp(kInner, j) < r; ++j) s += dyadic_phi(std::ldexp(r, -j));
  return std::clamp(1.0 - s, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

DyadicPartition::DyadicPartition(Grid grid) : grid_(std::move(grid)) {
  const auto xi = grid_.wavenumbers();
  const std::size_t modes = xi.size();

  // Largest j whose annulus 2^j (3/4, 8/3) holds a represented frequency.
  j_max_ = -1;
  for (int j = 0; std::ldexp(kInner, j) < xi.back(); ++j) {
    const double lo = std::ldexp(kInner, j), hi = std::ldexp(kOuter, j);
    const bool hit = std::any_of(xi.begin(), xi.end(), [&](double x) { return x > lo && x < hi; });
    if (hit) j_max_ = j;
  }
  if (j_max_ < 1)
    fail(ErrorKind::Resolution,
         "grid too small for a dyadic partition: need blocks j = -1, 0, 1 (max wavenumber " +
             std::to_string(xi.back()) + ")");

  const int nb = num_blocks();
  begin_.assign(nb, 0);
  end_.assign(nb, 0);
  weights_.assign(nb, {});
  std::vector<double> covered(modes, 0.0);

  for (int j = 0; j <= j_max_; ++j) {
    const double lo = std::ldexp(kInner, j), hi = std::ldexp(kOuter, j);
    const auto first = std::upper_bound(xi.begin(), xi.end(), lo);
    const auto last = std::lower_bound(xi.begin(), xi.end(), hi);
    const std::size_t b = static_cast<std::size_t>(first - xi.begin());
    const std::size_t e = std::max(b, static_cast<std::size_t>(last - xi.begin()));
    auto& w = weights_[j + 1];
    w.resize(e - b);
    for (std::size_t k = b; k < e; ++k) {
      w[k - b] = dyadic_phi(std::ldexp(xi[k], -j));
      covered[k] += w[k - b];
    }
    begin_[j + 1] = b;
    end_[j + 1] = e;
  }

  // chi = 1 - sum_{j>=0} phi(2^-j xi), supported in |xi| < 4/3 = 2^-1 * 8/3.
  // Every represented frequency above that is already fully covered by the
  // annulus blocks, the top one included, so no truncation weight is needed.
  std::size_t chi_end = 0;
  std::vector<double> chi(modes, 0.0);
  for (std::size_t k = 0; k < modes && xi[k] < 0.5 * kOuter; ++k) {
    chi[k] = std::clamp(1.0 - covered[k], 0.0, 1.0);
    if (chi[k] > 0.0) chi_end = k + 1;
  }
  chi.resize(chi_end);
  weights_[0] = std::move(chi);
  begin_[0] = 0;
  end_[0] = chi_end;
}

void DyadicPartition::check_block_index(int j) const {
  if (j < -1 || j > j_max_)
    fail(ErrorKind::InvalidArgument, "block index " + std::to_string(j) + " outside [-1, " +
                                         std::to_string(j_max_) + "]");
}

DyadicPartition::Support DyadicPartition::support(int j) const {
  check_block_index(j);
  const auto idx = static_cast<std::size_t>(j + 1);
  return {begin_[idx], end_[idx], weights_[idx]};
}

double DyadicPartition::multiplier(int j, std::size_t k) const {
  const auto s = support(j);
  return (k >= s.k_begin && k < s.k_end) ? s.weights[k - s.k_begin] : 0.0;
}

double DyadicPartition::lowpass_multiplier(int j, std::size_t k) const {
  if (j < 0 || j > j_max_ + 1)
    fail(ErrorKind::InvalidArgument, "lowpass index " + std::to_string(j) + " outside [0, " +
                                         std::to_string(j_max_ + 1) + "]");
  double s = 0.0;
  for (int jj = -1; jj <= j - 1; ++jj) s += multiplier(jj, k);
  return s;
}

void DyadicPartition::apply_block(std::span<const Complex> in, int j, std::span<Complex> out) const {
  const auto s = support(j);
  require(in.size() == grid_.num_modes() && out.size() == in.size(), "apply_block: size mismatch");
  std::fill(out.begin(), out.end(), Complex{});
  for (std::size_t k = s.k_begin; k < s.k_end; ++k) out[k] = in[k] * s.weights[k - s.k_begin];
}

RealField DyadicPartition::block(const RealField& u, int j) const {
  require_same_grid(grid_, u.grid());
  check_block_index(j);
  const auto u_hat = to_spectral(u);
  SpectralField out(grid_);
  apply_block(u_hat.coefficients(), j, out.coefficients());
  return to_physical(out);
}

RealField DyadicPartition::lowpass(const RealField& u, int j) const {
  require_same_grid(grid_, u.grid());
  if (j < 0 || j > j_max_ + 1)
    fail(ErrorKind::InvalidArgument, "lowpass index " + std::to_string(j) + " outside [0, " +
                                         std::to_string(j_max_ + 1) + "]");
  auto sp = to_spectral(u);
  auto c = sp.coefficients();
  std::vector<double> mult(c.size(), 0.0);
  for (int jj = -1; jj <= j - 1; ++jj) {
    const auto s = support(jj);
    for (std::size_t k = s.k_begin; k < s.k_end; ++k) mult[k] += s.weights[k - s.k_begin];
  }
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= mult[k];
  return to_physical(sp);
}

void DyadicPartition::for_each_block(
    const SpectralField& u_hat, const std::function<void(int, std::span<const double>)>& visit) const {
  require_same_grid(grid_, u_hat.grid());
  std::vector<Complex> buf(grid_.num_modes());
  std::vector<double> samples(grid_.size());
  for (int j = -1; j <= j_max_; ++j) {
    apply_block(u_hat.coefficients(), j, buf);
    grid_.inverse(buf, samples);
    visit(j, samples);
  }
}

void DyadicPartition::for_each_block(
    const RealField& u, const std::function<void(int, std::span<const double>)>& visit) const {
  for_each_block(to_spectral(u), visit);
}

std::vector<RealField> DyadicPartition::blocks(const RealField& u) const {
  std::vector<RealField> out;
  out.reserve(static_cast<std::size_t>(num_blocks()));
  for_each_block(u, [&](int, std::span<const double> s) {
    out.emplace_back(grid_, std::vector<double>(s.begin(), s.end()));
  });
  return out;
}

// ---------------------------------------------------------------------------

BonyDecomposition bony_decompose(const DyadicPartition& part, const RealField& u,
                                 const RealField& v) {
  require_same_grid(u.grid(), v.grid());
  require_same_grid(part.grid(), u.grid());
  const auto bu = part.blocks(u);
  const auto bv = part.blocks(v);
  const std::size_t n = u.size();
  const int nb = part.num_blocks();

  BonyDecomposition out{RealField(u.grid()), RealField(u.grid()), RealField(u.grid())};
  // low_u / low_v hold S_{j-1} = sum_{j' <= j-2} Delta_j', indexed by block slot b = j + 1.
  std::vector<double> low_u(n, 0.0), low_v(n, 0.0);
  for (int b = 0; b < nb; ++b) {
    if (b >= 2) {
      for (std::size_t i = 0; i < n; ++i) {
        low_u[i] += bu[b - 2][i];
        low_v[i] += bv[b - 2][i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      out.paraproduct_uv[i] += low_u[i] * bv[b][i];
      out.paraproduct_vu[i] += low_v[i] * bu[b][i];
      double near = bv[b][i];
      if (b > 0) near += bv[b - 1][i];
      if (b + 1 < nb) near += bv[b + 1][i];
      out.remainder[i] += bu[b][i] * near;
    }
  }
  return out;
}

BernsteinReport bernstein_check(const DyadicPartition& part, const RealField& u, int j, int order) {
  require(j >= 0 && j <= part.j_max(), "Bernstein check needs an annulus block 0 <= j <= j_max");
  require(order >= 0, "derivative order must be non-negative");
  require_same_grid(part.grid(), u.grid());
  const auto u_hat = to_spectral(u);
  SpectralField blk(part.grid());
  part.apply_block(u_hat.coefficients(), j, blk.coefficients());
  const double base = to_physical(blk).sup_norm();
  // Blocks at round-off level relative to u carry no spectral content.
  if (!(base > 1e-13 * u.sup_norm()))
    fail(ErrorKind::InvalidArgument, "Bernstein check: block " + std::to_string(j) + " is zero");
  for (int d = 0; d < order; ++d) derivative_inplace(part.grid(), blk.coefficients());
  const double deriv = to_physical(blk).sup_norm();

  BernsteinReport r;
  r.j = j;
  r.order = order;
  r.ratio = deriv / (std::pow(2.0, j * order) * base);
  r.lower = std::pow(0.75, order) / 4.0;
  r.upper = 4.0 * std::pow(8.0 / 3.0, order);
  return r;
}

}  // namespace mochlab
