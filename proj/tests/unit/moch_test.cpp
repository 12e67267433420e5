#include <gtest/gtest.h>

#include <cmath>

#include "mochlab/error.hpp"
#include "mochlab/initial_data.hpp"
#include "mochlab/moch.hpp"
#include "mochlab/spectral_ops.hpp"

namespace mochlab {
namespace {

RealField smooth_datum(const Grid& g, double amp = 0.5) {
  return RealField::from_function(
      g, [amp](double x) { return amp * std::sin(x) + 0.6 * amp * std::cos(2 * x); });
}

RealField constant(const Grid& g, double c) {
  return RealField(g, std::vector<double>(g.size(), c));
}

MochParams params(double dt, double T, double lambda = 1.0) {
  MochParams p;
  p.lambda = lambda;
  p.dt = dt;
  p.t_final = T;
  return p;
}

TEST(ComputeM, SineExample) {
  const auto g = Grid::make(64);
  const auto u = RealField::from_function(g, [](double x) { return std::sin(x); });
  const auto m = compute_m(u, 0.5);
  const auto expected =
      RealField::from_function(g, [](double x) { return std::cos(x) + std::sin(x) * std::sin(x); });
  EXPECT_LE((m - expected).sup_norm(), 1e-13);
}

TEST(ComputeM, RejectsZeroLambda) {
  const auto g = Grid::make(16);
  try {
    compute_m(RealField(g), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    EXPECT_NE(std::string(e.what()).find("nonzero"), std::string::npos);
  }
  EXPECT_THROW(rhs(RealField(g), 0.0), Error);
  EXPECT_THROW(validate(params(1e-3, 1.0, 0.0)), Error);
  EXPECT_THROW(validate(params(1.0, 1.0)), Error);
  EXPECT_THROW(validate(params(-1e-3, 1.0)), Error);
}

TEST(DeriveFields, VelocitySolvesHelmholtz) {
  const auto g = Grid::make(128);
  const auto f = derive_fields(smooth_datum(g), 0.7);
  EXPECT_LE((helmholtz(f.v) - f.m).sup_norm(), 1e-10 * (1.0 + f.m.sup_norm()));
  EXPECT_LE((derivative(f.v) - f.v_x).sup_norm(), 1e-14);
}

TEST(Rhs, Examples) {
  const auto g = Grid::make(64);
  EXPECT_EQ(rhs(RealField(g), 1.0).sup_norm(), 0.0);

  // Constant c: v = -c^2/(2 lambda), so gamma_t = c^2/2 - c^2/2 = 0.
  for (double c : {0.3, -1.7, 4.0}) {
    EXPECT_LE(rhs(constant(g, c), 1.0).sup_norm(), 1e-14 * (1.0 + std::pow(std::abs(c), 3)));
  }

  // Linearization at 0: gamma_t = lambda G^{-1} gamma_x, so eps sin x -> -(eps/2) cos x.
  const double eps = 1e-6;
  const auto u = RealField::from_function(g, [eps](double x) { return eps * std::sin(x); });
  const auto expected = RealField::from_function(g, [eps](double x) { return -0.5 * eps * std::cos(x); });
  EXPECT_LE((rhs(u, 1.0) - expected).sup_norm(), 1e-11);
}

TEST(Rhs, BreakdownSumsToTotal) {
  const auto g = Grid::make(128);
  const auto u = smooth_datum(g);
  const auto b = rhs_terms(u, 1.0);
  EXPECT_LE((b.transport + b.source + b.linear + b.stretch - b.total).sup_norm(), 1e-14);
  EXPECT_LE((b.total - rhs(u, 1.0)).sup_norm(), 1e-13);
}

TEST(Solver, RichardsonRatio) {
  const auto g = Grid::make(64);
  const DyadicPartition part(g);
  const auto u0 = smooth_datum(g);
  std::vector<RealField> finals;
  for (double dt : {0.05, 0.025, 0.0125}) finals.push_back(solve(u0, part, params(dt, 1.0)).states.back());
  const double ratio = (finals[0] - finals[1]).sup_norm() / (finals[1] - finals[2]).sup_norm();
  EXPECT_GE(ratio, 14.0);
  EXPECT_LE(ratio, 18.0);
}

TEST(Solver, SpatialSelfConvergence) {
  const auto g1 = Grid::make(128);
  const auto g2 = Grid::make(256);
  const auto a = solve(smooth_datum(g1, 0.2), DyadicPartition(g1), params(0.01, 0.5)).states.back();
  const auto b = solve(smooth_datum(g2, 0.2), DyadicPartition(g2), params(0.01, 0.5)).states.back();
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[2 * i]));
  EXPECT_LT(diff, 1e-9);
}

TEST(Solver, ConstantAndZeroPreserved) {
  const auto g = Grid::make(64);
  const DyadicPartition part(g);
  const auto c = solve(constant(g, 0.8), part, params(0.01, 1.0));
  EXPECT_LE((c.states.back() - constant(g, 0.8)).sup_norm(), 1e-14);
  const auto z = solve(RealField(g), part, params(0.01, 1.0));
  EXPECT_EQ(z.states.back().sup_norm(), 0.0);
  EXPECT_FALSE(z.truncated);
  EXPECT_EQ(z.steps_taken, 100u);
}

TEST(Solver, TimeReversal) {
  const auto g = Grid::make(64);
  MochState s{0.0, smooth_datum(g)};
  const auto p_fwd = params(0.01, 1.0);
  auto p_bwd = p_fwd;
  p_bwd.dt = -p_fwd.dt;
  for (int i = 0; i < 50; ++i) s = step_rk4(s, p_fwd);
  for (int i = 0; i < 50; ++i) s = step_rk4(s, p_bwd);
  EXPECT_NEAR(s.t, 0.0, 1e-14);
  EXPECT_LE((s.gamma - dealias(smooth_datum(g))).sup_norm(), 1e-8);
}

TEST(Solver, LastStepLandsOnHorizon) {
  const auto g = Grid::make(32);
  const auto tr = solve(smooth_datum(g), DyadicPartition(g), params(0.03, 0.1));
  EXPECT_EQ(tr.steps_taken, 4u);
  EXPECT_EQ(tr.times.back(), 0.1);
  EXPECT_EQ(tr.norm_series.back().t, 0.1);
}

TEST(Solver, BlowUpTruncates) {
  const auto g = Grid::make(64);
  auto p = params(0.01, 2.0);
  p.blowup_ceiling = 0.6;
  const auto tr = solve(smooth_datum(g, 1.0), DyadicPartition(g), p);
  EXPECT_TRUE(tr.truncated);
  EXPECT_LT(tr.last_valid_time, 2.0);
  EXPECT_NE(tr.truncation_reason.find("exceeds ceiling"), std::string::npos);
}

TEST(Solver, NormSeriesCsv) {
  const auto g = Grid::make(64);
  auto p = params(0.01, 0.05);
  p.record_every = 2;
  const auto tr = solve(smooth_datum(g), DyadicPartition(g), p);
  ASSERT_EQ(tr.norm_series.size(), 4u);  // t = 0, 0.02, 0.04, 0.05
  const auto csv = tr.norm_series_csv();
  EXPECT_EQ(csv.rfind("t,B0inf1,B0infinf1_weighted,Linf\n0,", 0), 0u);
  for (const auto& s : tr.norm_series) {
    EXPECT_LE(s.linf, s.b0_inf_1 + 1e-14);
    EXPECT_LE(s.b0_inf_1, s.weighted);
  }
}

TEST(Solver, InflationDatumShortRun) {
  const int N = 6;
  const DyadicPartition part(inflation_grid(N));
  const auto d = build_gamma0(part, N);
  auto p = params(1e-4, 0.01);
  p.record_every = 20;
  const auto tr = solve(d.gamma0, part, p);
  EXPECT_FALSE(tr.truncated);
  EXPECT_NEAR(tr.norm_series.front().b0_inf_1, d.norm_b0_inf_1, 1e-12);
  EXPECT_GT(tr.norm_series.back().b0_inf_1, tr.norm_series.front().b0_inf_1);
}

TEST(MForm, ConventionalConvergesVerbatimDoesNot) {
  const auto g = Grid::make(64);
  std::vector<double> verb, conv;
  for (double dt : {0.01, 0.005, 0.0025}) {
    auto p = params(dt, 0.1);
    p.snapshot_every = 1;
    const auto res = m_form_residual(solve(smooth_datum(g), DyadicPartition(g), p), 1.0);
    double v = 0.0, c = 0.0;
    for (const auto& r : res) {
      v = std::max(v, r.verbatim);
      c = std::max(c, r.conventional);
    }
    verb.push_back(v);
    conv.push_back(c);
  }
  for (std::size_t i = 1; i < conv.size(); ++i) {
    EXPECT_GT(conv[i - 1] / conv[i], 3.5);
    EXPECT_LT(verb[i - 1] / verb[i], 1.1);
    EXPECT_GT(verb[i], 0.1);
  }
}

TEST(MForm, NeedsThreeStates) {
  const auto g = Grid::make(32);
  const auto tr = solve(smooth_datum(g), DyadicPartition(g), params(0.01, 0.05));
  EXPECT_THROW(m_form_residual(tr, 1.0), Error);
}

TEST(FlowMap, ZeroFieldIsIdentity) {
  const auto g = Grid::make(32);
  const auto tr = solve(RealField(g), DyadicPartition(g), params(0.1, 1.0), FlowOptions{});
  ASSERT_TRUE(tr.flow);
  const auto& last = tr.flow->frames.back();
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(last.y[i], g.node(i));
    EXPECT_NEAR(last.y_xi[i], 1.0, 1e-15);
  }
}

TEST(FlowMap, ConstantFieldTranslates) {
  const auto g = Grid::make(32);
  const double c = 0.9, lambda = 1.5, T = 1.0;
  const auto tr = solve(constant(g, c), DyadicPartition(g), params(0.1, T, lambda), FlowOptions{});
  const auto& last = tr.flow->frames.back();
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(last.y[i], g.node(i) - c * c / (2 * lambda) * T, 1e-13);
}

TEST(FlowMap, JacobianLawAndCoupledReplay) {
  const auto g = Grid::make(64);
  auto p = params(1e-3, 1.0);
  p.snapshot_every = 1;
  p.record_every = 50;
  const auto tr = solve(smooth_datum(g), DyadicPartition(g), p, FlowOptions{});
  for (const auto& s : tr.flow->samples) {
    EXPECT_LE(s.max_jacobian_rel_error, 1e-6);
    EXPECT_GE(s.min_y_xi, 0.5);
    EXPECT_LE(s.max_y_xi, 2.0);
  }
  const auto replay = flow_map(tr, p.lambda);
  ASSERT_EQ(replay.samples.size(), tr.flow->samples.size());
  const auto& a = tr.flow->frames.back();
  const auto& b = replay.frames.back();
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(a.y[i], b.y[i], 1e-12);
}

TEST(FlowMap, PaddedMatchesDirect) {
  const auto g = Grid::make(128);
  FlowOptions direct, padded;
  direct.method = OffGridMethod::Direct;
  padded.method = OffGridMethod::Padded;
  const auto p = params(1e-2, 0.5);
  const auto a = solve(smooth_datum(g), DyadicPartition(g), p, direct);
  const auto b = solve(smooth_datum(g), DyadicPartition(g), p, padded);
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_NEAR(a.flow->frames.back().y[i], b.flow->frames.back().y[i], 1e-10);
}

TEST(FlowMap, RequiresEveryStepStored) {
  const auto g = Grid::make(32);
  const auto tr = solve(smooth_datum(g), DyadicPartition(g), params(0.01, 0.05));
  EXPECT_THROW(flow_map(tr, 1.0), Error);
  FlowOptions bad;
  bad.method = OffGridMethod::Padded;
  bad.pad_factor = 3;
  EXPECT_THROW(solve(smooth_datum(g), DyadicPartition(g), params(0.01, 0.05), bad), Error);
}

TEST(FlowMap, CompressionReportsLostDiffeomorphism) {
  // A steep datum whose characteristics cross before the horizon.
  const auto g = Grid::make(256);
  const auto u0 = RealField::from_function(g, [](double x) { return 6.0 * std::sin(x); });
  auto p = params(1e-3, 3.0);
  p.blowup_ceiling = 1e12;
  try {
    solve(u0, DyadicPartition(g), p, FlowOptions{});
    FAIL() << "expected the flow map to fold";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Diffeomorphism);
    EXPECT_NE(std::string(e.what()).find("diffeomorphism lost at t = "), std::string::npos);
  }
}

}  // namespace
}  // namespace mochlab
