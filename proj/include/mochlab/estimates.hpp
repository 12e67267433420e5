#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mochlab/initial_data.hpp"
#include "mochlab/moch.hpp"

namespace mochlab {

/// One measured inequality lhs <= C * rhs with the constant stripped.
///
/// Inequality ids, with a = ||G||_{B^0_{inf,1}}, w = ||G||_{B^0_{inf,inf,1}},
/// v = G^{-1} M and M = G_x + G^2/(2 lambda):
///   flux_b0inf1               ||G v_x||_{B^0_{inf,1}}       vs a^2 w/(2|lambda|) + w a
///   flux_weighted             ||G v_x||_{B^0_{inf,inf,1}}   vs a^2 w/(2|lambda|) + w a
///   square_b0inf1             ||G^2||_{B^0_{inf,1}}         vs a w
///   square_weighted           ||G^2||_{B^0_{inf,inf,1}}     vs a w
///   commutator_weighted_sup   sup_j (j+2)^2 ||R_j||_inf     vs a (w + w a/(2|lambda|))
///   commutator_sum            sum_j ||R_j||_inf             vs a (w + w a/(2|lambda|))
///   product_commutator_sum    sum_j ||R~_j||_inf            vs a^2 w + (w a)^2/(2|lambda|)
struct EstimateReport {
  std::string lemma_id;
  double lhs = 0.0;
  double rhs = 0.0;
  /// lhs / rhs; 0 when both vanish, +inf when only rhs does.
  double ratio = 0.0;
  /// rhs == 0 (e.g. G = 0).
  bool degenerate = false;
  std::string ensemble_id;
};

struct CommutatorProfile {
  std::vector<int> j_values;
  std::vector<double> sup_norms;

  double sum() const;
  double weighted_sup() const;
};

/// R_j = v Delta_j G_x - Delta_j(v G_x) and its product analogue.
struct CommutatorCheck {
  CommutatorProfile r;
  /// R~_j = v Delta_j (G G_x) - Delta_j(v G G_x), i.e. the commutator with
  /// (G^2/2)_x that appears when the equation is multiplied by gamma.
  CommutatorProfile r_tilde;
  /// v Delta_j (G/2)_x - Delta_j(v (G/2)_x) = R_j / 2, the other reading of
  /// the product commutator; kept as a diagnostic.
  CommutatorProfile r_half;
  /// max_j | ||R_j|| via v Delta_j G_x - Delta_j(v G_x) minus ||R_j|| via
  /// (1 - Delta_j)(v Delta_j G_x) - Delta_j(v (1 - Delta_j) G_x) |.
  double two_path_deviation = 0.0;
  std::vector<EstimateReport> reports;
};

/// Evaluates with every product resolved exactly: the field is zero-padded
/// onto a finer grid with room for quartic products before any nonlinearity.
std::vector<EstimateReport> product_estimate_check(const DyadicPartition& part, const RealField& gamma,
                                                   double lambda, const std::string& ensemble_id = "");
CommutatorCheck commutator_check(const DyadicPartition& part, const RealField& gamma, double lambda,
                                 const std::string& ensemble_id = "");

/// Index of the last half-spectrum mode above round-off (1e-14 of the peak).
std::size_t spectral_band(const RealField& u);

struct EnsembleSpec {
  std::size_t grid_size = 1024;
  std::size_t max_mode = 64;
  double decay = 1.0;
  std::uint64_t first_seed = 1;
  std::size_t members = 100;
  double lambda = 1.0;
};

struct EnsembleSummary {
  EnsembleSpec spec;
  std::vector<std::string> lemma_ids;
  /// Per lemma id, the maximum ratio over members.
  std::vector<double> max_ratio;
  std::vector<EstimateReport> reports;
  bool all_finite = true;

  double max_for(const std::string& lemma_id) const;
  std::string to_csv() const;
};

/// Product and commutator checks over random band-limited fields with
/// seeds first_seed .. first_seed + members - 1.
EnsembleSummary run_ensemble(const EnsembleSpec& spec);

struct ScalingRow {
  int N = 0;
  std::size_t grid_size = 0;
  double norm_b0_inf_1 = 0.0;
  double norm_weighted = 0.0;
  double norm_square_b0_inf_1 = 0.0;
};

struct ScalingSweep {
  std::vector<ScalingRow> rows;
  /// Least-squares slopes of log(column) against log N.
  double exponent_b0_inf_1 = 0.0;
  double exponent_weighted = 0.0;
  double exponent_square = 0.0;

  bool b0_inf_1_non_increasing() const;
  bool defect_ratio_increasing() const;
  std::string to_csv() const;
  /// "quantity,value" rows: fitted exponents and trend verdicts.
  std::string fit_csv() const;
};

/// One row on the automatic grid 2^{N+8}.
ScalingRow scaling_row(int N, CorrectorMode mode = CorrectorMode::Regular);
ScalingSweep summarize_scaling(std::vector<ScalingRow> rows);
ScalingSweep datum_scaling_sweep(const std::vector<int>& N_list,
                                    CorrectorMode mode = CorrectorMode::Regular);

/// Least-squares slope of log y against log x.
double fitted_exponent(const std::vector<double>& x, const std::vector<double>& y);

struct InflationPolicy {
  double lambda = 1.0;
  /// Time step at N <= 8; halved per unit of N above 8 to keep the carrier
  /// phase advance per step fixed.
  double base_dt = 1e-4;
  /// Norm samples over [0, T].
  int samples = 100;
  bool refine_norms = true;
  CorrectorMode corrector = CorrectorMode::Regular;
};

double inflation_dt(const InflationPolicy& policy, int N);

/// Terms of the t = 0 growth-rate bookkeeping, all in B^0_{inf,1} except
/// the commutator (sum over j of sup norms).
struct RateBreakdown {
  double source = 0.0;      // ||gamma0^2 / 2||
  double linear = 0.0;      // |lambda| ||G^{-1} m||
  double stretch = 0.0;     // ||gamma G^{-1} m_x||
  double commutator = 0.0;  // sum_j ||R_j||_inf
  double bound() const { return source + linear + stretch + commutator; }
  /// source - (linear + stretch + commutator); positive when the source dominates.
  double dominance_margin() const { return source - (linear + stretch + commutator); }
};

RateBreakdown rate_breakdown(const DyadicPartition& part, const RealField& gamma, double lambda);

struct InflationReport {
  int N = 0;
  double T = 0.0;
  double dt = 0.0;
  std::size_t grid_size = 0;
  double norm_b0_inf_1 = 0.0;
  double norm_weighted = 0.0;
  double norm_square_b0_inf_1 = 0.0;
  double sup_norm = 0.0;
  double t0 = 0.0;
  /// One-sided second-order difference of ||gamma(t)||_{B^0_{inf,1}} at t = 0
  /// over two solver steps.
  double initial_slope = 0.0;
  double amplification = 0.0;
  double weighted_ceiling = 0.0;
  RateBreakdown breakdown;
  bool truncated = false;
  std::string truncation_reason;
  std::vector<NormSample> norm_series;

  /// sup_t norm >= ln N.
  bool reaches_log_n() const;
};

struct InflationSweep {
  std::vector<InflationReport> reports;
  double slope_exponent = 0.0;
  bool amplification_increasing = false;
  /// max over N of weighted_ceiling / N^{19/10}.
  double ceiling_constant = 0.0;

  std::string to_csv() const;
  /// "quantity,value" rows: slope exponent, monotonicity verdict, ceiling constant.
  std::string summary_csv() const;
};

InflationReport inflation_run(int N, const InflationPolicy& policy = {});
/// Cross-N summary of reports given in sweep order.
InflationSweep summarize_inflation(std::vector<InflationReport> reports);
InflationSweep inflation_experiment(const std::vector<int>& N_list, const InflationPolicy& policy = {});

}  // namespace mochlab
