#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mochlab/besov.hpp"

namespace mochlab {

struct MochParams {
  double lambda = 1.0;
  double dt = 1e-4;
  double t_final = 1.0;
  bool dealias_on = true;
  /// Norm-series stride in steps.
  int record_every = 1;
  /// Stored-state stride in steps; 0 keeps only the initial and final states.
  int snapshot_every = 0;
  /// ||gamma||_inf above this (or any NaN) halts the run.
  double blowup_ceiling = 1e6;
  /// Norm series uses Newton-polished block maxima (see norm_profile_refined)
  /// instead of sampled maxima, which drop as peaks move between nodes.
  bool refine_norms = true;
};

/// Throws ErrorKind::InvalidArgument on lambda = 0, dt <= 0, dt >= t_final,
/// non-finite values or non-positive strides.
void validate(const MochParams& params);
void require_lambda(double lambda);

/// m = gamma_x + gamma^2 / (2 lambda).
RealField compute_m(const RealField& gamma, double lambda, bool dealias_on = true);

/// m, v = G^{-1} m and v_x for a given gamma.
struct MochFields {
  RealField m;
  RealField v;
  RealField v_x;
};
MochFields derive_fields(const RealField& gamma, double lambda, bool dealias_on = true);

/// The four terms of the gamma equation:
/// gamma_t = -v gamma_x + gamma^2/2 + lambda v - gamma v_x.
struct RhsBreakdown {
  RealField transport;  // -v gamma_x
  RealField source;     // gamma^2 / 2
  RealField linear;     // lambda v
  RealField stretch;    // -gamma v_x
  RealField total;
};

/// Throws ErrorKind::BlowUp when any term is non-finite.
RhsBreakdown rhs_terms(const RealField& gamma, double lambda, bool dealias_on = true);
RealField rhs(const RealField& gamma, double lambda, bool dealias_on = true);

struct MochState {
  double t = 0.0;
  RealField gamma;
  bool blow_up = false;

  MochFields derived(double lambda, bool dealias_on = true) const {
    return derive_fields(gamma, lambda, dealias_on);
  }
};

/// One classical RK4 step of size params.dt (which may be negative, for
/// backward integration). Sets blow_up instead of throwing.
MochState step_rk4(const MochState& state, const MochParams& params);

struct NormSample {
  double t = 0.0;
  double b0_inf_1 = 0.0;
  double weighted = 0.0;
  double linf = 0.0;
};

/// Off-grid evaluation of band-limited fields at particle positions.
enum class OffGridMethod {
  /// Direct Fourier summation for n <= 2048, otherwise Padded.
  Auto,
  /// Direct Fourier summation; exact, O(n * modes) per evaluation.
  Direct,
  /// Zero-padded inverse transform followed by local Lagrange interpolation.
  Padded,
};

struct FlowOptions {
  OffGridMethod method = OffGridMethod::Auto;
  int pad_factor = 4;
  /// Number of interpolation nodes (even).
  int interpolation_points = 8;
  /// Full particle frames every this many steps; 0 keeps first and last.
  int frame_every = 0;
};

struct FlowSample {
  double t = 0.0;
  double min_y_xi = 1.0;
  double max_y_xi = 1.0;
  /// max_i |y_xi - exp(int_0^t v_x(s, y(s, xi_i)) ds)| / exp(...)
  double max_jacobian_rel_error = 0.0;
};

struct FlowFrame {
  double t = 0.0;
  std::vector<double> y;
  std::vector<double> y_xi;
  std::vector<double> log_jacobian;
};

struct FlowMapSeries {
  std::vector<FlowSample> samples;
  std::vector<FlowFrame> frames;
};

struct Trajectory {
  Grid grid;
  MochParams params;
  /// Times of the stored states.
  std::vector<double> times;
  std::vector<RealField> states;
  std::vector<NormSample> norm_series;
  std::size_t steps_taken = 0;
  bool truncated = false;
  double last_valid_time = 0.0;
  std::string truncation_reason;
  std::optional<FlowMapSeries> flow;

  /// "t,B0inf1,B0infinf1_weighted,Linf"
  std::string norm_series_csv() const;
};

/// Integrates to params.t_final with fixed steps; the last step is shortened
/// to land on t_final. With dealiasing on, gamma0 is first projected onto
/// the 2/3 band. Passing flow options integrates particle paths from every
/// grid node together with the field, using the same RK4 stages.
Trajectory solve(const RealField& gamma0, const DyadicPartition& part, const MochParams& params,
                 const std::optional<FlowOptions>& flow = std::nullopt);

/// Replays the RK4 stages of a trajectory that stored every step
/// (snapshot_every = 1) and integrates the particle paths. Agrees with the
/// coupled integration of solve up to the round-off of re-transforming the
/// stored states.
FlowMapSeries flow_map(const Trajectory& trajectory, double lambda, FlowOptions options = {});

struct MFormResidual {
  double t = 0.0;
  /// ||m_t + 2 v m_x + m v_x - lambda v_x||_inf
  double verbatim = 0.0;
  /// ||m_t + v m_x + 2 m v_x - lambda v_x||_inf
  double conventional = 0.0;
};

/// Residuals at every interior stored state whose neighbours are equally
/// spaced in time; m_t by centered differences.
std::vector<MFormResidual> m_form_residual(const Trajectory& trajectory, double lambda);

}  // namespace mochlab
