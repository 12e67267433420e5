#include <gtest/gtest.h>

#include <cmath>

#include "mochlab/error.hpp"
#include "mochlab/estimates.hpp"
#include "mochlab/random_fields.hpp"

namespace mochlab {
namespace {

const EstimateReport& find(const std::vector<EstimateReport>& rs, const std::string& id) {
  for (const auto& r : rs)
    if (r.lemma_id == id) return r;
  throw std::runtime_error("missing report " + id);
}

RealField shifted(const RealField& u, std::size_t cells) {
  RealField out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) out[(i + cells) % u.size()] = u[i];
  return out;
}

TEST(ProductEstimates, ZeroFieldIsDegenerate) {
  const DyadicPartition part(Grid::make(256));
  const RealField zero(part.grid());
  for (const auto& r : product_estimate_check(part, zero, 1.0)) {
    EXPECT_EQ(r.lhs, 0.0) << r.lemma_id;
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.ratio, 0.0);
  }
  for (const auto& r : commutator_check(part, zero, 1.0).reports) EXPECT_TRUE(r.degenerate);
}

TEST(ProductEstimates, PureModeAgainstMultiplierOracle) {
  const DyadicPartition part(Grid::make(1024));
  const auto u = RealField::from_function(part.grid(), [](double x) { return std::cos(32 * x); });
  double a = 0.0, w = 0.0;
  for (int j = -1; j <= part.j_max(); ++j) {
    const double m = part.multiplier(j, 32);
    a += m;
    w = std::max(w, (j + 2.0) * (j + 2.0) * m);
  }
  const auto rs = product_estimate_check(part, u, 1.0, "cos32");
  const auto& sq = find(rs, "square_b0inf1");
  EXPECT_LE(sq.lhs, 2.0);
  EXPECT_NEAR(sq.lhs, 1.0, 1e-10);
  EXPECT_NEAR(sq.rhs, a * w, 1e-10);
  EXPECT_EQ(sq.ensemble_id, "cos32");
  for (const auto& r : rs) {
    EXPECT_TRUE(std::isfinite(r.ratio)) << r.lemma_id;
    EXPECT_GE(r.lhs, 0.0);
    EXPECT_GT(r.rhs, 0.0);
  }
}

TEST(ProductEstimates, TranslationInvariance) {
  const DyadicPartition part(Grid::make(1024));
  const auto u = random_bandlimited(part.grid(), 11, 64);
  const auto v = shifted(u, 137);
  auto a = product_estimate_check(part, u, 0.8);
  auto b = product_estimate_check(part, v, 0.8);
  const auto ca = commutator_check(part, u, 0.8);
  const auto cb = commutator_check(part, v, 0.8);
  a.insert(a.end(), ca.reports.begin(), ca.reports.end());
  b.insert(b.end(), cb.reports.begin(), cb.reports.end());
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_NEAR(a[i].ratio, b[i].ratio, 1e-10 * a[i].ratio) << a[i].lemma_id;
}

TEST(ProductEstimates, SquareRatiosScaleInvariant) {
  const DyadicPartition part(Grid::make(1024));
  const auto u = random_bandlimited(part.grid(), 5, 48);
  const auto a = product_estimate_check(part, u, 1.0);
  const auto b = product_estimate_check(part, 3.7 * u, 1.0);
  for (const char* id : {"square_b0inf1", "square_weighted"}) {
    EXPECT_NEAR(find(a, id).ratio, find(b, id).ratio, 1e-10 * find(a, id).ratio) << id;
    EXPECT_NEAR(find(b, id).lhs, 3.7 * 3.7 * find(a, id).lhs, 1e-10 * find(b, id).lhs);
  }
}

TEST(ProductEstimates, RejectsZeroLambdaAndUnresolvedInput) {
  const DyadicPartition part(Grid::make(64));
  const auto u = RealField::from_function(part.grid(), [](double x) { return std::sin(3 * x); });
  EXPECT_THROW(product_estimate_check(part, u, 0.0), Error);
  const auto nyq = RealField::from_function(part.grid(), [](double x) { return std::cos(32 * x); });
  EXPECT_THROW(product_estimate_check(part, nyq, 1.0), Error);
}

TEST(Commutator, ConstantFieldVanishes) {
  const DyadicPartition part(Grid::make(256));
  const RealField c(part.grid(), std::vector<double>(256, 0.7));
  const auto chk = commutator_check(part, c, 1.0);
  EXPECT_EQ(chk.r.sum(), 0.0);
  EXPECT_EQ(chk.r_tilde.sum(), 0.0);
}

TEST(Commutator, TwoPathsAgreeAndHalfReading) {
  const DyadicPartition part(Grid::make(1024));
  const auto u = random_bandlimited(part.grid(), 3, 64);
  const auto chk = commutator_check(part, u, 1.0);
  EXPECT_LE(chk.two_path_deviation, 1e-12);
  ASSERT_EQ(chk.r.sup_norms.size(), chk.r_half.sup_norms.size());
  for (std::size_t i = 0; i < chk.r.sup_norms.size(); ++i) {
    EXPECT_GE(chk.r.sup_norms[i], 0.0);
    EXPECT_NEAR(chk.r_half.sup_norms[i], 0.5 * chk.r.sup_norms[i], 1e-13);
  }
  double s = 0.0, w = 0.0;
  for (std::size_t i = 0; i < chk.r.j_values.size(); ++i) {
    s += chk.r.sup_norms[i];
    const double jj = chk.r.j_values[i] + 2.0;
    w = std::max(w, jj * jj * chk.r.sup_norms[i]);
  }
  EXPECT_DOUBLE_EQ(chk.r.sum(), s);
  EXPECT_DOUBLE_EQ(chk.r.weighted_sup(), w);
  EXPECT_DOUBLE_EQ(find(chk.reports, "commutator_sum").lhs, s);
}

TEST(Commutator, SingleBlockFieldIsLocalized) {
  const DyadicPartition part(Grid::make(1024));
  const int j0 = 4;
  const auto u = part.block(random_bandlimited(part.grid(), 9, 60), j0);
  const auto chk = commutator_check(part, u, 1.0);
  double peak = 0.0;
  for (double v : chk.r.sup_norms) peak = std::max(peak, v);
  ASSERT_GT(peak, 0.0);
  for (std::size_t i = 0; i < chk.r.j_values.size(); ++i)
    if (chk.r.j_values[i] > j0 + 4) EXPECT_LE(chk.r.sup_norms[i], 1e-12 * peak) << chk.r.j_values[i];
  EXPECT_TRUE(std::isfinite(chk.r.sum()));
}

TEST(Ensemble, SmallEnsembleFiniteAndTagged) {
  EnsembleSpec spec;
  spec.members = 4;
  spec.first_seed = 500;
  const auto e = run_ensemble(spec);
  EXPECT_TRUE(e.all_finite);
  EXPECT_EQ(e.lemma_ids.size(), 7u);
  EXPECT_EQ(e.reports.size(), 28u);
  EXPECT_NE(e.reports.front().ensemble_id.find("seeds=500..503)#500"), std::string::npos);
  EXPECT_EQ(e.to_csv().rfind("ensemble_id,lemma_id,lhs,rhs,ratio,degenerate\n", 0), 0u);
  EXPECT_GT(e.max_for("commutator_sum"), 0.0);
  EXPECT_THROW(e.max_for("nope"), Error);
  EXPECT_EQ(run_ensemble(spec).to_csv(), e.to_csv());
}

TEST(ScalingSweep, FittedExponentOracle) {
  const std::vector<double> x{2, 3, 5, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
  EXPECT_NEAR(fitted_exponent(x, y), 1.5, 1e-12);
  EXPECT_THROW(fitted_exponent({1.0}, {1.0}), Error);
  EXPECT_THROW(fitted_exponent({2.0, 2.0}, {1.0, 3.0}), Error);
}

TEST(ScalingSweep, SmallSweep) {
  EXPECT_THROW(datum_scaling_sweep({}), Error);
  const auto s = datum_scaling_sweep({5, 6, 7});
  ASSERT_EQ(s.rows.size(), 3u);
  EXPECT_EQ(s.rows[0].grid_size, 1u << 13);
  EXPECT_TRUE(s.b0_inf_1_non_increasing());
  EXPECT_TRUE(s.defect_ratio_increasing());
  EXPECT_LE(s.exponent_weighted, 2.2);
  EXPECT_EQ(s.to_csv().rfind("N,grid_size,u0_B0inf1,u0_B0infinf1_weighted,u0sq_B0inf1,defect_ratio\n", 0), 0u);
}

TEST(Inflation, TimeStepPolicy) {
  InflationPolicy p;
  EXPECT_EQ(inflation_dt(p, 6), 1e-4);
  EXPECT_EQ(inflation_dt(p, 8), 1e-4);
  EXPECT_EQ(inflation_dt(p, 10), 2.5e-5);
  p.base_dt = 0.0;
  EXPECT_THROW(inflation_dt(p, 6), Error);
}

TEST(Inflation, SmallRunInvariants) {
  InflationPolicy p;
  p.samples = 20;
  const auto sweep = inflation_experiment({2, 3}, p);
  ASSERT_EQ(sweep.reports.size(), 2u);
  for (const auto& r : sweep.reports) {
    EXPECT_EQ(r.T, 1.0 / std::sqrt(double(r.N)));
    EXPECT_GE(r.amplification, 1.0 - 1e-12);
    EXPECT_FALSE(r.truncated);
    EXPECT_EQ(r.norm_series.back().t, r.T);
    EXPECT_GE(r.t0, 0.0);
    EXPECT_LE(r.t0, r.T);
    EXPECT_LE(std::abs(r.initial_slope), r.breakdown.bound());
    EXPECT_GE(r.weighted_ceiling, r.norm_weighted - 1e-12);
  }
  EXPECT_EQ(inflation_experiment({2, 3}, p).to_csv(), sweep.to_csv());
  EXPECT_THROW(inflation_experiment({}, p), Error);
}

}  // namespace
}  // namespace mochlab
