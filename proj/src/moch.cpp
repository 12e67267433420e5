#include "mochlab/moch.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mochlab/error.hpp"
#include "mochlab/io.hpp"
#include "mochlab/spectral_ops.hpp"

namespace mochlab {

namespace {

using CVec = std::vector<Complex>;

std::string time_label(double t) {
  std::ostringstream os;
  os.precision(10);
  os << t;
  return os.str();
}

RealField product(const RealField& a, const RealField& b, bool dealias_on) {
  return dealias_on ? dealiased_product(a, b) : pointwise_product(a, b);
}

// Right-hand side in spectral form. With dealiasing, every product is
// truncated to modes k <= n/3, so a state inside that band stays inside it.
class SpectralRhs {
 public:
  SpectralRhs(Grid grid, double lambda, bool dealias_on)
      : grid_(std::move(grid)),
        lambda_(lambda),
        cut_(dealias_on ? dealias_cutoff(grid_) : grid_.nyquist_index()),
        g_(grid_.size()),
        v_(grid_.size()),
        prod_(grid_.size()),
        sq_hat_(grid_.num_modes()),
        gv_hat_(grid_.num_modes()),
        v_hat_(grid_.num_modes()) {}

  const Grid& grid() const { return grid_; }
  std::size_t cut() const { return cut_; }
  std::span<const Complex> v_hat() const { return v_hat_; }

  void operator()(std::span<const Complex> g_hat, std::span<Complex> out) {
    const auto xi = grid_.wavenumbers();
    const std::size_t nm = grid_.num_modes();
    const std::size_t nyq = grid_.nyquist_index();
    grid_.inverse(g_hat, g_);
    for (std::size_t i = 0; i < g_.size(); ++i) prod_[i] = g_[i] * g_[i];
    grid_.forward(prod_, sq_hat_);
    truncate(sq_hat_);
    const double inv2l = 1.0 / (2.0 * lambda_);
    for (std::size_t k = 0; k < nm; ++k) {
      const Complex gx = (k == nyq) ? Complex(0.0) : Complex(0.0, xi[k]) * g_hat[k];
      const Complex m = gx + sq_hat_[k] * inv2l;
      v_hat_[k] = helmholtz_inverse_symbol(xi[k]) * m;
    }
    grid_.inverse(v_hat_, v_);
    for (std::size_t i = 0; i < g_.size(); ++i) prod_[i] = g_[i] * v_[i];
    grid_.forward(prod_, gv_hat_);
    truncate(gv_hat_);
    for (std::size_t k = 0; k < nm; ++k) {
      const Complex flux = (k == nyq) ? Complex(0.0) : Complex(0.0, -xi[k]) * gv_hat_[k];
      out[k] = flux + 0.5 * sq_hat_[k] + lambda_ * v_hat_[k];
    }
    truncate(out);
  }

 private:
  void truncate(std::span<Complex> c) const {
    for (std::size_t k = cut_ + 1; k < c.size(); ++k) c[k] = 0.0;
  }

  Grid grid_;
  double lambda_;
  std::size_t cut_;
  std::vector<double> g_, v_, prod_;
  CVec sq_hat_, gv_hat_, v_hat_;
};

// Classical RK4 on the half spectrum. `stage_hook(s, v_hat)` sees the
// velocity of stage s = 0..3 right after it is formed.
class Rk4 {
 public:
  Rk4(Grid grid, double lambda, bool dealias_on)
      : f_(std::move(grid), lambda, dealias_on),
        k1_(f_.grid().num_modes()),
        k2_(k1_.size()),
        k3_(k1_.size()),
        k4_(k1_.size()),
        tmp_(k1_.size()) {}

  template <class Hook>
  void step(CVec& g, double dt, Hook&& stage_hook) {
    const std::size_t nm = g.size();
    f_(g, k1_);
    stage_hook(0, f_.v_hat());
    for (std::size_t k = 0; k < nm; ++k) tmp_[k] = g[k] + 0.5 * dt * k1_[k];
    f_(tmp_, k2_);
    stage_hook(1, f_.v_hat());
    for (std::size_t k = 0; k < nm; ++k) tmp_[k] = g[k] + 0.5 * dt * k2_[k];
    f_(tmp_, k3_);
    stage_hook(2, f_.v_hat());
    for (std::size_t k = 0; k < nm; ++k) tmp_[k] = g[k] + dt * k3_[k];
    f_(tmp_, k4_);
    stage_hook(3, f_.v_hat());
    const double w = dt / 6.0;
    for (std::size_t k = 0; k < nm; ++k)
      g[k] += w * (k1_[k] + 2.0 * k2_[k] + 2.0 * k3_[k] + k4_[k]);
  }

  void step(CVec& g, double dt) {
    step(g, dt, [](int, std::span<const Complex>) {});
  }

  std::size_t cut() const { return f_.cut(); }

 private:
  SpectralRhs f_;
  CVec k1_, k2_, k3_, k4_, tmp_;
};

// Returns an empty string when the state is acceptable, else the reason.
std::string blow_up_reason(const Grid& grid, std::span<const Complex> g, double ceiling) {
  double l1 = std::abs(g[0]);
  for (std::size_t k = 1; k < g.size(); ++k) l1 += 2.0 * std::abs(g[k]);
  if (!std::isfinite(l1)) return "non-finite values";
  if (l1 <= ceiling) return {};
  std::vector<double> s(grid.size());
  grid.inverse(g, s);
  double sup = 0.0;
  for (double v : s) sup = std::max(sup, std::abs(v));
  if (sup > ceiling) return "sup norm " + format_double(sup) + " exceeds ceiling " + format_double(ceiling);
  return {};
}

NormSample record(const DyadicPartition& part, double t, const CVec& g, bool refine) {
  const SpectralField sp(part.grid(), g);
  if (refine) {
    const auto prof = norm_profile_refined(part, sp);
    return {t, prof.b0_inf_1(), prof.weighted().value, refined_sup_norm(sp)};
  }
  const auto prof = norm_profile(part, sp);
  return {t, prof.b0_inf_1(), prof.weighted().value, to_physical(sp).sup_norm()};
}

// Evaluates a band-limited field and its derivative at arbitrary points.
class OffGridEvaluator {
 public:
  OffGridEvaluator(const Grid& grid, const FlowOptions& opt) : grid_(grid) {
    method_ = opt.method;
    if (method_ == OffGridMethod::Auto)
      method_ = grid.size() <= 2048 ? OffGridMethod::Direct : OffGridMethod::Padded;
    if (method_ == OffGridMethod::Padded) {
      require(opt.pad_factor >= 1 && (opt.pad_factor & (opt.pad_factor - 1)) == 0,
              "flow map pad factor must be a power of two");
      require(opt.interpolation_points >= 2 && opt.interpolation_points % 2 == 0 &&
                  opt.interpolation_points <= 16,
              "flow map interpolation points must be even and at most 16");
      fine_ = Grid::make(grid.size() * static_cast<std::size_t>(opt.pad_factor), grid.period());
      points_ = opt.interpolation_points;
      padded_.assign(fine_->num_modes(), 0.0);
      fine_v_.resize(fine_->size());
      fine_vx_.resize(fine_->size());
      // Barycentric weights of equispaced nodes: (-1)^j binom(p-1, j).
      weights_.resize(static_cast<std::size_t>(points_));
      double b = 1.0;
      for (int j = 0; j < points_; ++j) {
        weights_[static_cast<std::size_t>(j)] = (j % 2 == 0 ? 1.0 : -1.0) * b;
        b = b * (points_ - 1 - j) / (j + 1);
      }
    }
  }

  void evaluate(std::span<const Complex> v_hat, std::span<const double> x, std::span<double> v,
                std::span<double> vx) {
    const auto xi = grid_.wavenumbers();
    const std::size_t nyq = grid_.nyquist_index();
    if (method_ == OffGridMethod::Direct) {
      SpectralField a(grid_, CVec(v_hat.begin(), v_hat.end()));
      SpectralField b(grid_);
      auto bc = b.coefficients();
      for (std::size_t k = 0; k < bc.size(); ++k)
        bc[k] = (k == nyq) ? Complex(0.0) : Complex(0.0, xi[k]) * v_hat[k];
      evaluate_series(a, x, v);
      evaluate_series(b, x, vx);
      return;
    }
    std::fill(padded_.begin(), padded_.end(), Complex(0.0));
    // The original Nyquist mode is not self-conjugate on the finer grid; the
    // real-series convention keeps Re(c e^{i xi x}), i.e. halves it on each side.
    for (std::size_t k = 0; k < nyq; ++k) padded_[k] = v_hat[k];
    padded_[nyq] = 0.5 * v_hat[nyq];
    fine_->inverse(padded_, fine_v_);
    for (std::size_t k = 0; k < nyq; ++k) padded_[k] = Complex(0.0, xi[k]) * v_hat[k];
    padded_[nyq] = 0.0;
    fine_->inverse(padded_, fine_vx_);
    const double h = fine_->spacing();
    const double half = 0.5 * grid_.period();
    const auto nf = static_cast<long>(fine_->size());
    const int left = points_ / 2 - 1;
    for (std::size_t p = 0; p < x.size(); ++p) {
      const double s = (x[p] + half) / h;
      const double fl = std::floor(s);
      const double frac = s - fl;
      const long i0 = static_cast<long>(fl);
      if (frac == 0.0) {
        const auto i = static_cast<std::size_t>(((i0 % nf) + nf) % nf);
        v[p] = fine_v_[i];
        vx[p] = fine_vx_[i];
        continue;
      }
      double num_v = 0.0, num_vx = 0.0, den = 0.0;
      for (int j = 0; j < points_; ++j) {
        const long idx = i0 - left + j;
        const auto i = static_cast<std::size_t>(((idx % nf) + nf) % nf);
        const double c = weights_[static_cast<std::size_t>(j)] / (frac - (j - left));
        num_v += c * fine_v_[i];
        num_vx += c * fine_vx_[i];
        den += c;
      }
      v[p] = num_v / den;
      vx[p] = num_vx / den;
    }
  }

 private:
  Grid grid_;
  OffGridMethod method_;
  std::optional<Grid> fine_;
  int points_ = 0;
  CVec padded_;
  std::vector<double> fine_v_, fine_vx_, weights_;
};

// Particle paths from every grid node, advanced with the RK4 stages of the
// field integration.
class ParticleTracker {
 public:
  ParticleTracker(const Grid& grid, const FlowOptions& opt)
      : grid_(grid),
        eval_(grid, opt),
        frame_every_(opt.frame_every),
        y_(grid.nodes().begin(), grid.nodes().end()),
        logj_(grid.size(), 0.0),
        ys_(grid.size()),
        vs_(4, std::vector<double>(grid.size())),
        vxs_(4, std::vector<double>(grid.size())) {
    require(opt.frame_every >= 0, "flow frame stride must be non-negative");
  }

  // Stage s uses positions y + c_s dt k_{s-1}, with c = (0, 1/2, 1/2, 1).
  void stage(int s, std::span<const Complex> v_hat, double dt) {
    const auto si = static_cast<std::size_t>(s);
    if (s == 0) {
      eval_.evaluate(v_hat, y_, vs_[0], vxs_[0]);
      return;
    }
    const double c = (s == 3) ? dt : 0.5 * dt;
    for (std::size_t i = 0; i < y_.size(); ++i) ys_[i] = y_[i] + c * vs_[si - 1][i];
    eval_.evaluate(v_hat, ys_, vs_[si], vxs_[si]);
  }

  void finish_step(double dt, double t_new) {
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < y_.size(); ++i) {
      y_[i] += w * (vs_[0][i] + 2.0 * vs_[1][i] + 2.0 * vs_[2][i] + vs_[3][i]);
      logj_[i] += w * (vxs_[0][i] + 2.0 * vxs_[1][i] + 2.0 * vxs_[2][i] + vxs_[3][i]);
    }
    const std::size_t n = y_.size();
    bool ordered = y_[0] + grid_.period() > y_[n - 1];
    for (std::size_t i = 0; ordered && i + 1 < n; ++i) ordered = y_[i + 1] > y_[i];
    if (!ordered)
      fail(ErrorKind::Diffeomorphism,
           "diffeomorphism lost at t = " + time_label(t_new) + ": particle order violated");
  }

  std::vector<double> y_xi() const {
    RealField d(grid_);
    for (std::size_t i = 0; i < y_.size(); ++i) d[i] = y_[i] - grid_.node(i);
    auto dy = derivative(d);
    std::vector<double> out(dy.values());
    for (double& v : out) v += 1.0;
    return out;
  }

  void record(double t, std::size_t step, bool final_step, FlowMapSeries& series,
              bool sample) const {
    const bool frame = final_step || step == 0 || (frame_every_ > 0 && step % frame_every_ == 0);
    if (!sample && !frame) return;
    auto yx = y_xi();
    FlowSample fs;
    fs.t = t;
    fs.min_y_xi = *std::min_element(yx.begin(), yx.end());
    fs.max_y_xi = *std::max_element(yx.begin(), yx.end());
    for (std::size_t i = 0; i < yx.size(); ++i) {
      const double e = std::exp(logj_[i]);
      fs.max_jacobian_rel_error = std::max(fs.max_jacobian_rel_error, std::abs(yx[i] - e) / e);
    }
    if (!(fs.min_y_xi > 0.0))
      fail(ErrorKind::Diffeomorphism,
           "diffeomorphism lost at t = " + time_label(t) + ": y_xi = " + format_double(fs.min_y_xi));
    series.samples.push_back(fs);
    if (frame) series.frames.push_back({t, y_, std::move(yx), logj_});
  }

 private:
  Grid grid_;
  OffGridEvaluator eval_;
  int frame_every_;
  std::vector<double> y_, logj_, ys_;
  std::vector<std::vector<double>> vs_, vxs_;
};

std::size_t step_count(double t_final, double dt) {
  return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

}  // namespace

void require_lambda(double lambda) {
  require(lambda != 0.0 && std::isfinite(lambda), "MOCH requires λ ≠ 0 (λ must be nonzero and finite)");
}

void validate(const MochParams& p) {
  require_lambda(p.lambda);
  require(std::isfinite(p.dt) && p.dt > 0.0, "time step dt must be positive and finite");
  require(std::isfinite(p.t_final) && p.t_final > 0.0, "horizon T must be positive and finite");
  require(p.dt < p.t_final, "time step dt must be smaller than the horizon T");
  require(p.record_every >= 1, "record_every must be at least 1");
  require(p.snapshot_every >= 0, "snapshot_every must be non-negative");
  require(p.blowup_ceiling > 0.0, "blow-up ceiling must be positive");
}

RealField compute_m(const RealField& gamma, double lambda, bool dealias_on) {
  require_lambda(lambda);
  auto m = derivative(gamma);
  m += (1.0 / (2.0 * lambda)) * product(gamma, gamma, dealias_on);
  return m;
}

MochFields derive_fields(const RealField& gamma, double lambda, bool dealias_on) {
  auto m = compute_m(gamma, lambda, dealias_on);
  auto v = helmholtz_inverse(m);
  auto vx = derivative(v);
  return {std::move(m), std::move(v), std::move(vx)};
}

RhsBreakdown rhs_terms(const RealField& gamma, double lambda, bool dealias_on) {
  const auto f = derive_fields(gamma, lambda, dealias_on);
  const auto gx = derivative(gamma);
  RhsBreakdown r{-1.0 * product(f.v, gx, dealias_on), 0.5 * product(gamma, gamma, dealias_on),
                 lambda * f.v, -1.0 * product(gamma, f.v_x, dealias_on), RealField(gamma.grid())};
  r.total = r.transport + r.source + r.linear + r.stretch;
  if (!r.total.all_finite()) fail(ErrorKind::BlowUp, "right-hand side has non-finite terms");
  return r;
}

RealField rhs(const RealField& gamma, double lambda, bool dealias_on) {
  require_lambda(lambda);
  gamma.require_finite("rhs input");
  SpectralRhs f(gamma.grid(), lambda, dealias_on);
  const auto g = to_spectral(gamma);
  SpectralField out(gamma.grid());
  f(g.coefficients(), out.coefficients());
  auto r = to_physical(out);
  if (!r.all_finite()) fail(ErrorKind::BlowUp, "right-hand side has non-finite terms");
  return r;
}

MochState step_rk4(const MochState& state, const MochParams& params) {
  require_lambda(params.lambda);
  require(std::isfinite(params.dt) && params.dt != 0.0, "time step dt must be nonzero and finite");
  MochState next{state.t + params.dt, state.gamma, state.blow_up};
  if (state.blow_up || !state.gamma.all_finite()) {
    next.blow_up = true;
    return next;
  }
  Rk4 rk(state.gamma.grid(), params.lambda, params.dealias_on);
  auto sp = to_spectral(state.gamma);
  CVec g(sp.coefficients().begin(), sp.coefficients().end());
  rk.step(g, params.dt);
  if (!blow_up_reason(state.gamma.grid(), g, params.blowup_ceiling).empty()) {
    next.blow_up = true;
    return next;
  }
  next.gamma = to_physical(SpectralField(state.gamma.grid(), std::move(g)));
  return next;
}

std::string Trajectory::norm_series_csv() const {
  std::string out = "t,B0inf1,B0infinf1_weighted,Linf\n";
  for (const auto& s : norm_series) {
    out += format_double(s.t) + ',' + format_double(s.b0_inf_1) + ',' + format_double(s.weighted) +
           ',' + format_double(s.linf) + '\n';
  }
  return out;
}

Trajectory solve(const RealField& gamma0, const DyadicPartition& part, const MochParams& params,
                 const std::optional<FlowOptions>& flow) {
  validate(params);
  require_same_grid(part.grid(), gamma0.grid());
  gamma0.require_finite("initial data");
  const Grid& grid = gamma0.grid();

  Trajectory traj{grid, params, {}, {}, {}, 0, false, 0.0, {}, std::nullopt};
  Rk4 rk(grid, params.lambda, params.dealias_on);
  auto sp = to_spectral(gamma0);
  CVec g(sp.coefficients().begin(), sp.coefficients().end());
  for (std::size_t k = rk.cut() + 1; k < g.size(); ++k) g[k] = 0.0;

  std::optional<ParticleTracker> tracker;
  if (flow) {
    tracker.emplace(grid, *flow);
    traj.flow.emplace();
  }

  const std::size_t steps = step_count(params.t_final, params.dt);
  auto store = [&](double t) {
    traj.times.push_back(t);
    traj.states.push_back(to_physical(SpectralField(grid, g)));
  };
  traj.norm_series.push_back(record(part, 0.0, g, params.refine_norms));
  store(0.0);
  if (tracker) tracker->record(0.0, 0, false, *traj.flow, true);

  double t = 0.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const bool last = n == steps;
    const double dt = last ? params.t_final - t : params.dt;
    if (tracker)
      rk.step(g, dt, [&](int s, std::span<const Complex> v_hat) { tracker->stage(s, v_hat, dt); });
    else
      rk.step(g, dt);
    const double t_new = last ? params.t_final : static_cast<double>(n) * params.dt;
    const auto reason = blow_up_reason(grid, g, params.blowup_ceiling);
    if (!reason.empty()) {
      traj.truncated = true;
      traj.truncation_reason = reason + " at t = " + time_label(t_new);
      break;
    }
    t = t_new;
    traj.steps_taken = n;
    traj.last_valid_time = t;
    if (tracker) tracker->finish_step(dt, t);
    const bool rec = last || n % static_cast<std::size_t>(params.record_every) == 0;
    if (rec) traj.norm_series.push_back(record(part, t, g, params.refine_norms));
    if (last || (params.snapshot_every > 0 && n % static_cast<std::size_t>(params.snapshot_every) == 0))
      store(t);
    if (tracker) tracker->record(t, n, last, *traj.flow, rec);
  }
  return traj;
}

FlowMapSeries flow_map(const Trajectory& traj, double lambda, FlowOptions options) {
  require_lambda(lambda);
  require(traj.params.snapshot_every == 1 && traj.states.size() == traj.steps_taken + 1,
          "flow_map needs a trajectory that stored every step (snapshot_every = 1)");
  const Grid& grid = traj.grid;
  Rk4 rk(grid, lambda, traj.params.dealias_on);
  ParticleTracker tracker(grid, options);
  FlowMapSeries series;
  tracker.record(traj.times[0], 0, traj.steps_taken == 0, series, true);
  for (std::size_t n = 1; n <= traj.steps_taken; ++n) {
    const double dt = traj.times[n] - traj.times[n - 1];
    // Replays the step from the stored state; the state itself is already
    // band-limited, so its transform matches the integrator's to round-off.
    auto sp = to_spectral(traj.states[n - 1]);
    CVec g(sp.coefficients().begin(), sp.coefficients().end());
    for (std::size_t k = rk.cut() + 1; k < g.size(); ++k) g[k] = 0.0;
    rk.step(g, dt, [&](int s, std::span<const Complex> v_hat) { tracker.stage(s, v_hat, dt); });
    tracker.finish_step(dt, traj.times[n]);
    const bool last = n == traj.steps_taken;
    const bool rec = last || n % static_cast<std::size_t>(traj.params.record_every) == 0;
    tracker.record(traj.times[n], n, last, series, rec);
  }
  return series;
}

std::vector<MFormResidual> m_form_residual(const Trajectory& traj, double lambda) {
  require_lambda(lambda);
  require(traj.states.size() >= 3, "m-form residual needs at least 3 stored states");
  const bool da = traj.params.dealias_on;
  std::vector<MochFields> f;
  f.reserve(traj.states.size());
  for (const auto& s : traj.states) f.push_back(derive_fields(s, lambda, da));
  std::vector<MFormResidual> out;
  for (std::size_t i = 1; i + 1 < traj.states.size(); ++i) {
    const double h0 = traj.times[i] - traj.times[i - 1];
    const double h1 = traj.times[i + 1] - traj.times[i];
    if (std::abs(h1 - h0) > 1e-9 * std::max(h0, h1)) continue;
    const auto mt = (1.0 / (h0 + h1)) * (f[i + 1].m - f[i - 1].m);
    const auto mx = derivative(f[i].m);
    const auto vmx = product(f[i].v, mx, da);
    const auto mvx = product(f[i].m, f[i].v_x, da);
    const auto lvx = lambda * f[i].v_x;
    const auto verbatim = mt + 2.0 * vmx + mvx - lvx;
    const auto conventional = mt + vmx + 2.0 * mvx - lvx;
    out.push_back({traj.times[i], verbatim.sup_norm(), conventional.sup_norm()});
  }
  require(!out.empty(), "m-form residual needs equally spaced neighbouring states");
  return out;
}

}  // namespace mochlab
