#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

namespace mochlab {

using Complex = std::complex<double>;

namespace detail {
struct GridImpl;
}

/// Equispaced periodic sample grid on [-L/2, L/2) together with its real
/// FFT plans. Copies share the same immutable state, so a Grid is cheap to
/// pass around and safe to use from several threads at once.
///
/// Spectral coefficients are stored on the half spectrum k = 0..n/2 and are
/// normalized so that cos(k x) maps to 1/2 at +k (and, implicitly, at -k).
class Grid {
 public:
  static Grid make(std::size_t num_points, double period = 2.0 * std::numbers::pi);

  std::size_t size() const noexcept;
  std::size_t num_modes() const noexcept { return size() / 2 + 1; }
  std::size_t nyquist_index() const noexcept { return size() / 2; }
  double period() const noexcept;
  double spacing() const noexcept { return period() / static_cast<double>(size()); }

  double node(std::size_t i) const noexcept { return nodes()[i]; }
  std::span<const double> nodes() const noexcept;

  /// Angular wavenumbers 2*pi*k/L for k = 0..n/2.
  std::span<const double> wavenumbers() const noexcept;
  double wavenumber(std::size_t k) const noexcept { return wavenumbers()[k]; }
  double max_wavenumber() const noexcept { return wavenumbers().back(); }

  /// Integer mode numbers in FFT order: 0, 1, ..., n/2, -(n/2-1), ..., -1.
  /// The Nyquist index appears once (self-conjugate).
  std::vector<long> mode_numbers() const;

  /// Forward transform, samples -> half-spectrum coefficients (scaled by 1/n).
  void forward(std::span<const double> samples, std::span<Complex> coeffs) const;
  /// Inverse transform; `coeffs` is left untouched.
  void inverse(std::span<const Complex> coeffs, std::span<double> samples) const;

  friend bool operator==(const Grid& a, const Grid& b) noexcept;

 private:
  explicit Grid(std::shared_ptr<const detail::GridImpl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const detail::GridImpl> impl_;
};

class SpectralField;

/// Real samples of a periodic function, one per grid node.
class RealField {
 public:
  explicit RealField(Grid grid);
  RealField(Grid grid, std::vector<double> samples);

  template <class F>
  static RealField from_function(const Grid& grid, F&& f) {
    std::vector<double> s(grid.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = f(grid.node(i));
    return RealField(grid, std::move(s));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const double> samples() const noexcept { return samples_; }
  std::span<double> samples() noexcept { return samples_; }
  const std::vector<double>& values() const noexcept { return samples_; }

  double operator[](std::size_t i) const noexcept { return samples_[i]; }
  double& operator[](std::size_t i) noexcept { return samples_[i]; }

  bool all_finite() const noexcept;
  /// Throws ErrorKind::NonFinite naming `context` if any sample is NaN/Inf.
  void require_finite(const char* context) const;

  double sup_norm() const noexcept;
  double mean() const noexcept;

  RealField& operator+=(const RealField& other);
  RealField& operator-=(const RealField& other);
  RealField& operator*=(double c) noexcept;

 private:
  Grid grid_;
  std::vector<double> samples_;
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double c, RealField a);
/// Pointwise product; no dealiasing.
RealField pointwise_product(const RealField& a, const RealField& b);

/// Half-spectrum Fourier coefficients of a real field.
class SpectralField {
 public:
  explicit SpectralField(Grid grid);
  SpectralField(Grid grid, std::vector<Complex> coeffs);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }
  std::span<Complex> coefficients() noexcept { return coeffs_; }

  /// Coefficient at signed mode number k; negative k returns the conjugate.
  Complex coeff(long k) const;

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

SpectralField to_spectral(const RealField& f);
RealField to_physical(const SpectralField& f);

void require_same_grid(const Grid& a, const Grid& b);

}  // namespace mochlab
