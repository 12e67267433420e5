#include "mochlab/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <string>

#include "mochlab/error.hpp"

namespace mochlab {

namespace {

// FFTW's planner is not reentrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<Complex>& scratch_spectrum(std::size_t n) {
  thread_local std::vector<Complex> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

}  // namespace

namespace detail {

struct GridImpl {
  std::size_t n = 0;
  double period = 0.0;
  std::vector<double> nodes;
  std::vector<double> wavenumbers;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;

  GridImpl(std::size_t num_points, double L) : n(num_points), period(L) {
    nodes.resize(n);
    const double h = L / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = -0.5 * L + static_cast<double>(i) * h;
    wavenumbers.resize(n / 2 + 1);
    for (std::size_t k = 0; k < wavenumbers.size(); ++k)
      wavenumbers[k] = 2.0 * std::numbers::pi * static_cast<double>(k) / L;

    // ESTIMATE keeps plan selection deterministic; UNALIGNED lets us execute
    // on arbitrary std::vector storage.
    std::vector<double> re(n);
    std::vector<Complex> sp(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    r2c = fftw_plan_dft_r2c_1d(static_cast<int>(n), re.data(),
                               reinterpret_cast<fftw_complex*>(sp.data()), flags);
    c2r = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(sp.data()),
                               re.data(), flags);
    if (!r2c || !c2r) fail(ErrorKind::InvalidArgument, "FFTW failed to create a plan");
  }

  ~GridImpl() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }

  GridImpl(const GridImpl&) = delete;
  GridImpl& operator=(const GridImpl&) = delete;
};

}  // namespace detail

Grid Grid::make(std::size_t num_points, double period) {
  if (num_points < 8 || !std::has_single_bit(num_points))
    fail(ErrorKind::InvalidArgument,
         "count must be power of two and at least 8 (got " + std::to_string(num_points) + ")");
  if (!(period > 0.0) || !std::isfinite(period))
    fail(ErrorKind::InvalidArgument, "period must be positive and finite");
  return Grid(std::make_shared<const detail::GridImpl>(num_points, period));
}

std::size_t Grid::size() const noexcept { return impl_->n; }
double Grid::period() const noexcept { return impl_->period; }
std::span<const double> Grid::nodes() const noexcept { return impl_->nodes; }
std::span<const double> Grid::wavenumbers() const noexcept { return impl_->wavenumbers; }

std::vector<long> Grid::mode_numbers() const {
  const long n = static_cast<long>(size());
  std::vector<long> out;
  out.reserve(size());
  for (long k = 0; k <= n / 2; ++k) out.push_back(k);
  for (long k = -(n / 2 - 1); k <= -1; ++k) out.push_back(k);
  return out;
}

void Grid::forward(std::span<const double> samples, std::span<Complex> coeffs) const {
  const auto& g = *impl_;
  require(samples.size() == g.n && coeffs.size() == g.n / 2 + 1, "forward: buffer size mismatch");
  // r2c does not modify its input, but the C signature is non-const.
  fftw_execute_dft_r2c(g.r2c, const_cast<double*>(samples.data()),
                       reinterpret_cast<fftw_complex*>(coeffs.data()));
  // Nodes start at -L/2, so index-based DFT bins carry a (-1)^k phase
  // relative to exp(i xi_k x); fold it in with the 1/n scaling.
  const double scale = 1.0 / static_cast<double>(g.n);
  const std::size_t nm = coeffs.size();
  for (std::size_t k = 0; k + 1 < nm; k += 2) {
    coeffs[k] *= scale;
    coeffs[k + 1] *= -scale;
  }
  if (nm % 2 == 1) coeffs[nm - 1] *= ((nm - 1) % 2 == 0) ? scale : -scale;
}

void Grid::inverse(std::span<const Complex> coeffs, std::span<double> samples) const {
  const auto& g = *impl_;
  require(samples.size() == g.n && coeffs.size() == g.n / 2 + 1, "inverse: buffer size mismatch");
  auto& tmp = scratch_spectrum(coeffs.size());
  const std::size_t nm = coeffs.size();
  for (std::size_t k = 0; k + 1 < nm; k += 2) {
    tmp[k] = coeffs[k];
    tmp[k + 1] = -coeffs[k + 1];
  }
  if (nm % 2 == 1) tmp[nm - 1] = ((nm - 1) % 2 == 0) ? coeffs[nm - 1] : -coeffs[nm - 1];
  // The imaginary parts of the DC and Nyquist bins are ignored by c2r.
  fftw_execute_dft_c2r(g.c2r, reinterpret_cast<fftw_complex*>(tmp.data()), samples.data());
}

bool operator==(const Grid& a, const Grid& b) noexcept {
  return a.impl_ == b.impl_ || (a.size() == b.size() && a.period() == b.period());
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b))
    fail(ErrorKind::GridMismatch, "grid mismatch: " + std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()) + " points");
}

// ---------------------------------------------------------------------------

RealField::RealField(Grid grid) : grid_(std::move(grid)), samples_(grid_.size(), 0.0) {}

RealField::RealField(Grid grid, std::vector<double> samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size())
    fail(ErrorKind::InvalidArgument, "sample count " + std::to_string(samples_.size()) +
                                         " does not match grid size " +
                                         std::to_string(grid_.size()));
}

bool RealField::all_finite() const noexcept {
  return std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); });
}

void RealField::require_finite(const char* context) const {
  if (!all_finite()) fail(ErrorKind::NonFinite, std::string(context) + ": field has NaN/Inf samples");
}

double RealField::sup_norm() const noexcept {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

double RealField::mean() const noexcept {
  double s = 0.0;
  for (double v : samples_) s += v;
  return s / static_cast<double>(samples_.size());
}

RealField& RealField::operator+=(const RealField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
  return *this;
}

RealField& RealField::operator-=(const RealField& other) {
  require_same_grid(grid_, other.grid_);
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= other.samples_[i];
  return *this;
}

RealField& RealField::operator*=(double c) noexcept {
  for (double& v : samples_) v *= c;
  return *this;
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double c, RealField a) { return a *= c; }

RealField pointwise_product(const RealField& a, const RealField& b) {
  require_same_grid(a.grid(), b.grid());
  RealField out(a.grid());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(Grid grid)
    : grid_(std::move(grid)), coeffs_(grid_.num_modes(), Complex{}) {}

SpectralField::SpectralField(Grid grid, std::vector<Complex> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  require(coeffs_.size() == grid_.num_modes(), "spectral coefficient count does not match grid");
}

Complex SpectralField::coeff(long k) const {
  const long nyq = static_cast<long>(grid_.nyquist_index());
  require(k >= -nyq && k <= nyq, "mode number out of range");
  if (k >= 0) return coeffs_[static_cast<std::size_t>(k)];
  return std::conj(coeffs_[static_cast<std::size_t>(-k)]);
}

SpectralField to_spectral(const RealField& f) {
  SpectralField out(f.grid());
  f.grid().forward(f.samples(), out.coefficients());
  return out;
}

RealField to_physical(const SpectralField& f) {
  RealField out(f.grid());
  f.grid().inverse(f.coefficients(), out.samples());
  return out;
}

}  // namespace mochlab
