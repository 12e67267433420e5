#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mochlab/grid.hpp"

namespace mochlab {

// Profile functions of the dyadic partition. All take r = |xi| >= 0.

/// exp(-1/t) for t > 0, else 0.
double smooth_transition(double t) noexcept;
/// C-infinity ramp: 0 for t <= 0, 1 for t >= 1.
double smooth_ramp(double t) noexcept;
/// Plateau bump: supported in [3/4, 8/3], equal to 1 on [1, 2].
double annulus_bump(double r) noexcept;
/// phi(r) = bump(r) / sum_{m in Z} bump(2^-m r); sum_j phi(2^-j r) = 1 for r > 0.
double dyadic_phi(double r) noexcept;
/// chi(r) = 1 - sum_{j >= 0} phi(2^-j r); equals 1 on [0, 3/4], 0 beyond 4/3.
double low_chi(double r) noexcept;

/// Nonhomogeneous Littlewood-Paley partition sampled on the frequencies of a
/// grid: block j = -1 uses chi, blocks j = 0..j_max use phi(2^-j xi).
/// Immutable after construction.
class DyadicPartition {
 public:
  /// Multiplier values of one block over the contiguous index range
  /// [k_begin, k_end) of the half spectrum; zero elsewhere.
  struct Support {
    std::size_t k_begin = 0;
    std::size_t k_end = 0;
    std::span<const double> weights;
  };

  /// Throws ErrorKind::Resolution when the grid cannot host blocks -1, 0, 1.
  explicit DyadicPartition(Grid grid);

  const Grid& grid() const noexcept { return grid_; }
  int j_max() const noexcept { return j_max_; }
  /// Number of blocks, j = -1..j_max.
  int num_blocks() const noexcept { return j_max_ + 2; }

  Support support(int j) const;
  /// Multiplier of block j at half-spectrum index k.
  double multiplier(int j, std::size_t k) const;

  RealField block(const RealField& u, int j) const;
  /// S_j u = sum_{j' <= j-1} Delta_{j'} u, for 0 <= j <= j_max + 1.
  RealField lowpass(const RealField& u, int j) const;
  /// Multiplier of S_j at index k.
  double lowpass_multiplier(int j, std::size_t k) const;

  /// Applies the block multiplier to spectral coefficients, writing a full
  /// half spectrum (zero outside the support).
  void apply_block(std::span<const Complex> in, int j, std::span<Complex> out) const;

  /// Visits every block once; the sample span is only valid during the call.
  /// The forward transform is done once for all blocks.
  void for_each_block(const RealField& u,
                      const std::function<void(int, std::span<const double>)>& visit) const;
  void for_each_block(const SpectralField& u_hat,
                      const std::function<void(int, std::span<const double>)>& visit) const;

  /// All blocks, index 0 holding j = -1.
  std::vector<RealField> blocks(const RealField& u) const;

 private:
  void check_block_index(int j) const;

  Grid grid_;
  int j_max_ = 0;
  std::vector<std::size_t> begin_;
  std::vector<std::size_t> end_;
  std::vector<std::vector<double>> weights_;
};

struct BonyDecomposition {
  RealField paraproduct_uv;  // T_u v = sum_j S_{j-1}u Delta_j v
  RealField paraproduct_vu;  // T_v u
  RealField remainder;       // R(u, v) = sum_{|j-j'|<=1} Delta_j u Delta_j' v
};

/// uv = T_u v + T_v u + R(u, v), evaluated pointwise on the grid.
BonyDecomposition bony_decompose(const DyadicPartition& part, const RealField& u,
                                 const RealField& v);

struct BernsteinReport {
  int j = 0;
  int order = 0;
  double ratio = 0.0;  // ||d^k Delta_j u||_inf / (2^{jk} ||Delta_j u||_inf)
  double lower = 0.0;  // (3/4)^k / 4
  double upper = 0.0;  // 4 (8/3)^k
  bool within() const noexcept { return ratio >= lower && ratio <= upper; }
};

/// Bernstein ratio for the annulus block j >= 0 of `u`. Throws when the
/// block vanishes.
BernsteinReport bernstein_check(const DyadicPartition& part, const RealField& u, int j, int order);

}  // namespace mochlab
