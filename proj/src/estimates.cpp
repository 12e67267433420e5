#include "mochlab/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mochlab/error.hpp"
#include "mochlab/io.hpp"
#include "mochlab/random_fields.hpp"
#include "mochlab/spectral_ops.hpp"

namespace mochlab {

namespace {

// A field and the quantities built from it, all on a grid fine enough that
// products of up to `degree` band-limited factors are exact.
class Lifted {
 public:
  Lifted(const DyadicPartition& part, const RealField& gamma, double lambda, int degree)
      : lambda_(lambda),
        grid_(pick_grid(gamma, degree)),
        part_(grid_),
        gamma_(grid_),
        gamma_x_(grid_),
        square_(grid_),
        v_(grid_),
        v_x_(grid_) {
    require_lambda(lambda);
    require_same_grid(part.grid(), gamma.grid());
    gamma.require_finite("estimate input");
    const auto band = spectral_band(gamma);
    const auto coarse = to_spectral(gamma);
    SpectralField fine(grid_);
    for (std::size_t k = 0; k <= band; ++k) fine.coefficients()[k] = coarse.coefficients()[k];
    gamma_ = to_physical(fine);
    gamma_x_ = derivative(gamma_);
    square_ = pointwise_product(gamma_, gamma_);
    const auto m = gamma_x_ + (1.0 / (2.0 * lambda)) * square_;
    v_ = helmholtz_inverse(m);
    v_x_ = derivative(v_);
  }

  const DyadicPartition& part() const { return part_; }
  double lambda() const { return lambda_; }
  const RealField& gamma() const { return gamma_; }
  const RealField& gamma_x() const { return gamma_x_; }
  const RealField& square() const { return square_; }
  const RealField& v() const { return v_; }
  const RealField& v_x() const { return v_x_; }

  NormProfile profile(const RealField& u) const { return norm_profile_refined(part_, u); }

  // sup_j ||v Delta_j f - Delta_j(v f)|| per block, for f band-limited.
  CommutatorProfile commutator(const RealField& f) const {
    const auto vf = pointwise_product(v_, f);
    CommutatorProfile out;
    for (int j = -1; j <= part_.j_max(); ++j) {
      const auto r = pointwise_product(v_, part_.block(f, j)) - part_.block(vf, j);
      out.j_values.push_back(j);
      out.sup_norms.push_back(refined_sup_norm(to_spectral(r)));
    }
    return out;
  }

  // Same commutator as (1 - Delta_j)(v Delta_j f) - Delta_j(v (1 - Delta_j) f).
  CommutatorProfile commutator_split(const RealField& f) const {
    CommutatorProfile out;
    for (int j = -1; j <= part_.j_max(); ++j) {
      const auto fj = part_.block(f, j);
      const auto inner = pointwise_product(v_, fj);
      const auto r = (inner - part_.block(inner, j)) - part_.block(pointwise_product(v_, f - fj), j);
      out.j_values.push_back(j);
      out.sup_norms.push_back(refined_sup_norm(to_spectral(r)));
    }
    return out;
  }

 private:
  static Grid pick_grid(const RealField& gamma, int degree) {
    const Grid& g = gamma.grid();
    const std::size_t band = spectral_band(gamma);
    if (band >= g.nyquist_index())
      fail(ErrorKind::Resolution, "estimate input reaches the Nyquist mode; refine the grid");
    std::size_t n = g.size();
    while (static_cast<std::size_t>(degree) * band >= n / 2) {
      require(n < (std::size_t{1} << 26), "estimate grid would exceed 2^26 points",
              ErrorKind::Resolution);
      n *= 2;
    }
    return n == g.size() ? g : Grid::make(n, g.period());
  }

  double lambda_;
  Grid grid_;
  DyadicPartition part_;
  RealField gamma_, gamma_x_, square_, v_, v_x_;
};

EstimateReport make_report(std::string id, double lhs, double rhs, const std::string& ensemble) {
  EstimateReport r{std::move(id), lhs, rhs, 0.0, !(rhs > 0.0), ensemble};
  if (rhs > 0.0)
    r.ratio = lhs / rhs;
  else
    r.ratio = lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return r;
}

struct BaseNorms {
  double a = 0.0, w = 0.0;
};

BaseNorms base_norms(const Lifted& f) {
  const auto p = f.profile(f.gamma());
  return {p.b0_inf_1(), p.weighted().value};
}

std::vector<EstimateReport> product_reports(const Lifted& f, const BaseNorms& n,
                                            const std::string& ensemble) {
  const double inv2l = 1.0 / (2.0 * std::abs(f.lambda()));
  const auto flux = f.profile(pointwise_product(f.gamma(), f.v_x()));
  const auto sq = f.profile(f.square());
  const double flux_rhs = inv2l * n.a * n.a * n.w + n.w * n.a;
  return {make_report("flux_b0inf1", flux.b0_inf_1(), flux_rhs, ensemble),
          make_report("flux_weighted", flux.weighted().value, flux_rhs, ensemble),
          make_report("square_b0inf1", sq.b0_inf_1(), n.a * n.w, ensemble),
          make_report("square_weighted", sq.weighted().value, n.a * n.w, ensemble)};
}

std::string format_seed_range(const EnsembleSpec& s) {
  return "bandlimited(n=" + std::to_string(s.grid_size) + ",K=" + std::to_string(s.max_mode) +
         ",decay=" + format_double(s.decay) + ",seeds=" + std::to_string(s.first_seed) + ".." +
         std::to_string(s.first_seed + s.members - 1) + ")";
}

}  // namespace

double CommutatorProfile::sum() const {
  double s = 0.0;
  for (double v : sup_norms) s += v;
  return s;
}

double CommutatorProfile::weighted_sup() const {
  double m = 0.0;
  for (std::size_t i = 0; i < j_values.size(); ++i) {
    const double w = static_cast<double>(j_values[i] + 2);
    m = std::max(m, w * w * sup_norms[i]);
  }
  return m;
}

std::size_t spectral_band(const RealField& u) {
  const auto sp = to_spectral(u);
  const auto c = sp.coefficients();
  double peak = 0.0;
  for (const auto& z : c) peak = std::max(peak, std::abs(z));
  std::size_t band = 0;
  for (std::size_t k = 0; k < c.size(); ++k)
    if (std::abs(c[k]) > 1e-14 * peak) band = k;
  return band;
}

std::vector<EstimateReport> product_estimate_check(const DyadicPartition& part, const RealField& gamma,
                                                   double lambda, const std::string& ensemble_id) {
  const Lifted f(part, gamma, lambda, 3);
  return product_reports(f, base_norms(f), ensemble_id);
}

CommutatorCheck commutator_check(const DyadicPartition& part, const RealField& gamma, double lambda,
                                 const std::string& ensemble_id) {
  const Lifted f(part, gamma, lambda, 4);
  const auto n = base_norms(f);
  CommutatorCheck out;
  out.r = f.commutator(f.gamma_x());
  const auto split = f.commutator_split(f.gamma_x());
  for (std::size_t i = 0; i < split.sup_norms.size(); ++i)
    out.two_path_deviation =
        std::max(out.two_path_deviation, std::abs(split.sup_norms[i] - out.r.sup_norms[i]));
  out.r_tilde = f.commutator(pointwise_product(f.gamma(), f.gamma_x()));
  out.r_half = f.commutator(0.5 * f.gamma_x());

  const double inv2l = 1.0 / (2.0 * std::abs(lambda));
  const double r_rhs = n.a * (n.w + inv2l * n.w * n.a);
  const double rt_rhs = n.a * n.a * n.w + inv2l * (n.w * n.a) * (n.w * n.a);
  out.reports = {make_report("commutator_weighted_sup", out.r.weighted_sup(), r_rhs, ensemble_id),
                 make_report("commutator_sum", out.r.sum(), r_rhs, ensemble_id),
                 make_report("product_commutator_sum", out.r_tilde.sum(), rt_rhs, ensemble_id)};
  return out;
}

double EnsembleSummary::max_for(const std::string& lemma_id) const {
  for (std::size_t i = 0; i < lemma_ids.size(); ++i)
    if (lemma_ids[i] == lemma_id) return max_ratio[i];
  fail(ErrorKind::InvalidArgument, "unknown inequality id '" + lemma_id + "'");
}

std::string EnsembleSummary::to_csv() const {
  std::string out = "ensemble_id,lemma_id,lhs,rhs,ratio,degenerate\n";
  for (const auto& r : reports) {
    out += r.ensemble_id + ',' + r.lemma_id + ',' + format_double(r.lhs) + ',' + format_double(r.rhs) +
           ',' + format_double(r.ratio) + ',' + (r.degenerate ? "1" : "0") + '\n';
  }
  return out;
}

EnsembleSummary run_ensemble(const EnsembleSpec& spec) {
  require(spec.members > 0, "ensemble needs at least one member");
  require(spec.max_mode >= 1, "ensemble max mode must be positive");
  const DyadicPartition part(Grid::make(spec.grid_size));
  EnsembleSummary out;
  out.spec = spec;
  const std::string tag = format_seed_range(spec);
  for (std::size_t i = 0; i < spec.members; ++i) {
    const std::uint64_t seed = spec.first_seed + i;
    const auto u = random_bandlimited(part.grid(), seed, spec.max_mode, spec.decay);
    const std::string id = tag + "#" + std::to_string(seed);
    auto reports = product_estimate_check(part, u, spec.lambda, id);
    const auto comm = commutator_check(part, u, spec.lambda, id);
    reports.insert(reports.end(), comm.reports.begin(), comm.reports.end());
    for (const auto& r : reports) {
      auto it = std::find(out.lemma_ids.begin(), out.lemma_ids.end(), r.lemma_id);
      if (it == out.lemma_ids.end()) {
        out.lemma_ids.push_back(r.lemma_id);
        out.max_ratio.push_back(0.0);
        it = out.lemma_ids.end() - 1;
      }
      auto& m = out.max_ratio[static_cast<std::size_t>(it - out.lemma_ids.begin())];
      m = std::max(m, r.ratio);
      if (!std::isfinite(r.ratio)) out.all_finite = false;
      out.reports.push_back(r);
    }
  }
  return out;
}

double fitted_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "exponent fit needs at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0.0 && y[i] > 0.0, "exponent fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  const double den = n * sxx - sx * sx;
  require(den > 0.0, "exponent fit needs distinct abscissae");
  return (n * sxy - sx * sy) / den;
}

bool ScalingSweep::b0_inf_1_non_increasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].norm_b0_inf_1 > rows[i - 1].norm_b0_inf_1) return false;
  return true;
}

bool ScalingSweep::defect_ratio_increasing() const {
  auto ratio = [](const ScalingRow& r) { return r.norm_square_b0_inf_1 / (r.norm_b0_inf_1 * r.norm_b0_inf_1); };
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(ratio(rows[i]) > ratio(rows[i - 1]))) return false;
  return true;
}

std::string ScalingSweep::to_csv() const {
  std::string out = "N,grid_size,u0_B0inf1,u0_B0infinf1_weighted,u0sq_B0inf1,defect_ratio\n";
  for (const auto& r : rows) {
    out += std::to_string(r.N) + ',' + std::to_string(r.grid_size) + ',' + format_double(r.norm_b0_inf_1) +
           ',' + format_double(r.norm_weighted) + ',' + format_double(r.norm_square_b0_inf_1) + ',' +
           format_double(r.norm_square_b0_inf_1 / (r.norm_b0_inf_1 * r.norm_b0_inf_1)) + '\n';
  }
  return out;
}

ScalingRow scaling_row(int N, CorrectorMode mode) {
  const DyadicPartition part(inflation_grid(N));
  const auto d = build_gamma0(part, N, mode);
  return {N, part.grid().size(), d.norm_b0_inf_1, d.norm_weighted, d.norm_square_b0_inf_1};
}

ScalingSweep summarize_scaling(std::vector<ScalingRow> rows) {
  ScalingSweep out;
  out.rows = std::move(rows);
  std::vector<double> xs, a, w, b;
  for (const auto& r : out.rows) {
    xs.push_back(r.N);
    a.push_back(r.norm_b0_inf_1);
    w.push_back(r.norm_weighted);
    b.push_back(r.norm_square_b0_inf_1);
  }
  if (xs.size() >= 2) {
    out.exponent_b0_inf_1 = fitted_exponent(xs, a);
    out.exponent_weighted = fitted_exponent(xs, w);
    out.exponent_square = fitted_exponent(xs, b);
  }
  return out;
}

ScalingSweep datum_scaling_sweep(const std::vector<int>& N_list, CorrectorMode mode) {
  require(!N_list.empty(), "scaling sweep needs a non-empty N list");
  std::vector<ScalingRow> rows;
  for (int N : N_list) rows.push_back(scaling_row(N, mode));
  return summarize_scaling(std::move(rows));
}

std::string ScalingSweep::fit_csv() const {
  std::string out = "quantity,value\n";
  out += "exponent_u0_B0inf1," + format_double(exponent_b0_inf_1) + '\n';
  out += "exponent_u0_B0infinf1_weighted," + format_double(exponent_weighted) + '\n';
  out += "exponent_u0sq_B0inf1," + format_double(exponent_square) + '\n';
  out += std::string("u0_B0inf1_non_increasing,") + (b0_inf_1_non_increasing() ? "1" : "0") + '\n';
  out += std::string("defect_ratio_increasing,") + (defect_ratio_increasing() ? "1" : "0") + '\n';
  return out;
}

double inflation_dt(const InflationPolicy& policy, int N) {
  require(std::isfinite(policy.base_dt) && policy.base_dt > 0.0, "base time step must be positive");
  return policy.base_dt * std::min(1.0, std::ldexp(1.0, 8 - N));
}

RateBreakdown rate_breakdown(const DyadicPartition& part, const RealField& gamma, double lambda) {
  const Lifted f(part, gamma, lambda, 3);
  RateBreakdown r;
  r.source = f.profile(0.5 * f.square()).b0_inf_1();
  r.linear = std::abs(lambda) * f.profile(f.v()).b0_inf_1();
  r.stretch = f.profile(pointwise_product(f.gamma(), f.v_x())).b0_inf_1();
  r.commutator = f.commutator(f.gamma_x()).sum();
  return r;
}

bool InflationReport::reaches_log_n() const { return sup_norm >= std::log(static_cast<double>(N)); }

InflationReport inflation_run(int N, const InflationPolicy& policy) {
  require(policy.samples >= 1, "inflation run needs at least one norm sample");
  const DyadicPartition part(inflation_grid(N));
  const auto d = build_gamma0(part, N, policy.corrector);

  InflationReport rep;
  rep.N = N;
  rep.T = 1.0 / std::sqrt(static_cast<double>(N));
  rep.dt = inflation_dt(policy, N);
  rep.grid_size = part.grid().size();
  rep.norm_b0_inf_1 = d.norm_b0_inf_1;
  rep.norm_weighted = d.norm_weighted;
  rep.norm_square_b0_inf_1 = d.norm_square_b0_inf_1;
  rep.breakdown = rate_breakdown(part, d.gamma0, policy.lambda);

  MochParams p;
  p.lambda = policy.lambda;
  p.dt = rep.dt;
  p.refine_norms = policy.refine_norms;

  p.t_final = 2.0 * rep.dt;
  const auto start = solve(d.gamma0, part, p);
  if (!start.truncated && start.norm_series.size() == 3) {
    const auto& s = start.norm_series;
    rep.initial_slope = (-3.0 * s[0].b0_inf_1 + 4.0 * s[1].b0_inf_1 - s[2].b0_inf_1) / (2.0 * rep.dt);
  }

  p.t_final = rep.T;
  p.record_every = std::max(1, static_cast<int>(std::lround(rep.T / policy.samples / rep.dt)));
  const auto traj = solve(d.gamma0, part, p);
  rep.truncated = traj.truncated;
  rep.truncation_reason = traj.truncation_reason;
  rep.norm_series = traj.norm_series;
  const double n0 = traj.norm_series.front().b0_inf_1;
  for (const auto& s : traj.norm_series) {
    if (s.b0_inf_1 > rep.sup_norm) {
      rep.sup_norm = s.b0_inf_1;
      rep.t0 = s.t;
    }
    rep.weighted_ceiling = std::max(rep.weighted_ceiling, s.weighted);
  }
  rep.amplification = rep.sup_norm / n0;
  return rep;
}

std::string InflationSweep::to_csv() const {
  std::string out =
      "N,T,dt,grid_size,u0_B0inf1,u0_B0infinf1_weighted,u0sq_B0inf1,sup_B0inf1,t0,initial_slope,"
      "amplification,weighted_ceiling,source,linear,stretch,commutator,dominance_margin,truncated\n";
  for (const auto& r : reports) {
    const auto& b = r.breakdown;
    out += std::to_string(r.N) + ',' + format_double(r.T) + ',' + format_double(r.dt) + ',' +
           std::to_string(r.grid_size) + ',' + format_double(r.norm_b0_inf_1) + ',' +
           format_double(r.norm_weighted) + ',' + format_double(r.norm_square_b0_inf_1) + ',' +
           format_double(r.sup_norm) + ',' + format_double(r.t0) + ',' + format_double(r.initial_slope) +
           ',' + format_double(r.amplification) + ',' + format_double(r.weighted_ceiling) + ',' +
           format_double(b.source) + ',' + format_double(b.linear) + ',' + format_double(b.stretch) + ',' +
           format_double(b.commutator) + ',' + format_double(b.dominance_margin()) + ',' +
           (r.truncated ? "1" : "0") + '\n';
  }
  return out;
}

std::string InflationSweep::summary_csv() const {
  std::string out = "quantity,value\n";
  out += "slope_exponent," + format_double(slope_exponent) + '\n';
  out += std::string("amplification_increasing,") + (amplification_increasing ? "1" : "0") + '\n';
  out += "ceiling_constant," + format_double(ceiling_constant) + '\n';
  for (const auto& r : reports)
    out += "reaches_log_n_N" + std::to_string(r.N) + ',' + (r.reaches_log_n() ? "1" : "0") + '\n';
  return out;
}

InflationSweep summarize_inflation(std::vector<InflationReport> reports) {
  InflationSweep out;
  out.reports = std::move(reports);
  std::vector<double> xs, slopes;
  out.amplification_increasing = true;
  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    const auto& r = out.reports[i];
    if (r.initial_slope > 0.0) {
      xs.push_back(r.N);
      slopes.push_back(r.initial_slope);
    }
    out.ceiling_constant = std::max(out.ceiling_constant, r.weighted_ceiling / std::pow(r.N, 1.9));
    if (i > 0 && !(r.amplification > out.reports[i - 1].amplification)) out.amplification_increasing = false;
  }
  if (xs.size() >= 2) out.slope_exponent = fitted_exponent(xs, slopes);
  return out;
}

InflationSweep inflation_experiment(const std::vector<int>& N_list, const InflationPolicy& policy) {
  require(!N_list.empty(), "inflation sweep needs a non-empty N list");
  std::vector<InflationReport> reports;
  for (int N : N_list) reports.push_back(inflation_run(N, policy));
  return summarize_inflation(std::move(reports));
}

}  // namespace mochlab
