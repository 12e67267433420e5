#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mochlab/littlewood_paley.hpp"

namespace mochlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Index (s, p, r) of B^s_{p,r}; p and r take values in [1, inf].
struct BesovIndex {
  double s = 0.0;
  double p = kInf;
  double r = 1.0;
};

void validate(const BesovIndex& idx);

/// sup_j (j+2)^2 ||Delta_j u||_inf and the block attaining it (empty for u = 0).
struct WeightedNormValue {
  double value = 0.0;
  std::optional<int> argmax_j;
};

/// Per-block norms ||Delta_j u|| for j = -1..j_max.
struct NormProfile {
  std::vector<int> j_values;
  std::vector<double> block_sup_norms;
  /// Present when a finite p was requested.
  std::optional<std::vector<double>> block_lp_norms;
  double p = kInf;

  /// ||u||_{B^0_{inf,1}} = sum_j ||Delta_j u||_inf.
  double b0_inf_1() const;
  /// ||u||_{B^0_{inf,inf}} = sup_j ||Delta_j u||_inf.
  double b0_inf_inf() const;
  /// sup_j (j+2)^2 ||Delta_j u||_inf.
  WeightedNormValue weighted() const;
  /// l^r combination of 2^{js} times the stored block norms (L^inf, or L^p
  /// when available and requested).
  double combine(double s, double r, bool use_lp) const;

  /// "j,block_sup_norm" CSV.
  std::string to_csv() const;
};

/// L^p norm of samples over one period, (h * sum |f|^p)^{1/p}; p = inf gives
/// the sample maximum.
double lp_norm(std::span<const double> samples, double spacing, double p);

NormProfile norm_profile(const DyadicPartition& part, const RealField& u,
                         std::optional<double> p = std::nullopt);
NormProfile norm_profile(const DyadicPartition& part, const SpectralField& u_hat);

/// Like norm_profile, but each block maximum is polished by Newton steps on
/// the block's trigonometric polynomial, started from the `candidates`
/// largest sampled local maxima. Removes most of the grid dependence of the
/// sampled maximum for blocks with few points per wavelength.
NormProfile norm_profile_refined(const DyadicPartition& part, const RealField& u,
                                 std::size_t candidates = 16);
NormProfile norm_profile_refined(const DyadicPartition& part, const SpectralField& u_hat,
                                 std::size_t candidates = 16);
/// Newton-polished ||u||_inf of the whole field.
double refined_sup_norm(const SpectralField& u_hat, std::size_t candidates = 16);

double besov_norm(const DyadicPartition& part, const RealField& u, const BesovIndex& idx);
WeightedNormValue weighted_norm(const DyadicPartition& part, const RealField& u);

/// The three norms tracked along trajectories.
struct NormTriple {
  double b0_inf_1 = 0.0;
  double weighted = 0.0;
  double linf = 0.0;
};

NormTriple norm_triple(const DyadicPartition& part, const RealField& u);

}  // namespace mochlab
