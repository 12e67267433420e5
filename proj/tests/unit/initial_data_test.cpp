#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mochlab/error.hpp"
#include "mochlab/initial_data.hpp"

namespace mochlab {
namespace {


TEST(PeriodizedHeaviside, Examples) {
  const auto g = Grid::make(64);
  const auto h = periodized_heaviside(g);
  EXPECT_EQ(h[16], 0.0);  // x = -L/4
  EXPECT_EQ(h[48], 1.0);  // x = +L/4
  EXPECT_EQ(h[32], 1.0);  // x = 0
  EXPECT_EQ(h.mean(), 0.5);
  EXPECT_NEAR(to_spectral(h).coeff(0).real(), 0.5, 1e-15);
}

TEST(SmoothedStep, MeanAndOvershoot) {
  for (int N : {4, 6, 8}) {
    const DyadicPartition part(inflation_grid(N));
    const auto s = smoothed_step(part, N);
    EXPECT_NEAR(s.mean(), 0.5, 1e-12);
    for (double v : s.samples()) {
      ASSERT_GE(v, -0.08);
      ASSERT_LE(v, 1.08);
    }
  }
}

TEST(SmoothedStep, ConvergesToStepInL2) {
  // ||S_N h - h||_{L^2} on a fixed fine grid; ratio per N step ~ 1/sqrt(2).
  const DyadicPartition part(Grid::make(1 << 16));
  const auto h = periodized_heaviside(part.grid());
  double prev = 0.0;
  for (int N = 4; N <= 9; ++N) {
    const auto d = smoothed_step(part, N) - h;
    double l2 = 0.0;
    for (double v : d.samples()) l2 += v * v;
    l2 = std::sqrt(l2 * part.grid().spacing());
    if (N > 4) {
      EXPECT_GT(l2 / prev, 0.65) << "N=" << N;
      EXPECT_LT(l2 / prev, 0.76) << "N=" << N;
    }
    prev = l2;
  }
}

TEST(SmoothedStep, MatchesLowpassOfSampledStep) {
  // Oracle: lowpass of the sampled step with the jump nodes set to 1/2. Its
  // coefficients differ from the closed form only by aliasing, O((2^N/n)^2).
  const DyadicPartition part(Grid::make(1 << 14));
  auto h = periodized_heaviside(part.grid());
  h[0] = 0.5;
  h[h.size() / 2] = 0.5;
  const auto a = smoothed_step(part, 5);
  const auto b = part.lowpass(h, 5);
  EXPECT_LE((a - b).sup_norm(), 1e-5);
}

TEST(SmoothedStep, RejectsUnderresolvedN) {
  const DyadicPartition part(Grid::make(64));
  try {
    smoothed_step(part, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Resolution);
    EXPECT_NE(std::string(e.what()).find("2^16"), std::string::npos);
  }
  EXPECT_THROW(smoothed_step(part, 0), Error);
}

TEST(BuildGamma0, AssembledAsWritten) {
  const int N = 6;
  const DyadicPartition part(inflation_grid(N));
  const auto d = build_gamma0(part, N);
  const double delta = std::pow(6.0, -0.1);
  const auto expected = delta * (pointwise_product(d.carrier, d.modulation) + d.correction);
  EXPECT_LE((d.gamma0 - expected).sup_norm(), 1e-11);
  const auto s = smoothed_step(part, N);
  RealField one(part.grid(), std::vector<double>(part.grid().size(), 1.0));
  EXPECT_LE((d.modulation - (one + delta * s)).sup_norm(), 1e-13);
  EXPECT_TRUE(d.below_asymptotic_range);
  EXPECT_TRUE(d.gamma0.all_finite());
}

TEST(BuildGamma0, SpectrumSupport) {
  const int N = 6;
  const DyadicPartition part(inflation_grid(N));
  const auto d = build_gamma0(part, N);
  const auto sp = to_spectral(d.gamma0);
  const auto c = sp.coefficients();
  const std::size_t K = 1u << (N + 5);
  const std::size_t half = 1u << (N + 1);
  double inside = 0.0, outside = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k)
    ((k + half >= K && k <= K + half) ? inside : outside) += std::norm(c[k]);
  EXPECT_LE(outside, 1e-26 * inside);

  // Corrector = multiplier times the carrier product, mode by mode.
  const auto prod = to_spectral(pointwise_product(d.carrier, d.modulation));
  const auto corr = to_spectral(d.correction);
  for (std::size_t k = K - half; k <= K + half; ++k)
    EXPECT_NEAR(std::abs(corr.coefficients()[k] -
                         corrector_symbol(CorrectorMode::Regular, double(k)) * prod.coefficients()[k]),
                0.0, 1e-15);
}

TEST(BuildGamma0, CorrectorModes) {
  EXPECT_DOUBLE_EQ(corrector_symbol(CorrectorMode::Regular, 2.0), -0.2);
  EXPECT_DOUBLE_EQ(corrector_symbol(CorrectorMode::Literal, 2.0), -1.0 / 3.0);
  EXPECT_EQ(corrector_symbol(CorrectorMode::Literal, 1.0), 0.0);
  EXPECT_EQ(parse_corrector_mode("literal"), CorrectorMode::Literal);
  EXPECT_THROW(parse_corrector_mode("other"), Error);

  const DyadicPartition part(inflation_grid(6));
  const auto a = build_gamma0(part, 6, CorrectorMode::Regular);
  const auto b = build_gamma0(part, 6, CorrectorMode::Literal);
  EXPECT_LE((a.gamma0 - b.gamma0).sup_norm(), 1e-11);
}

TEST(BuildGamma0, Errors) {
  const DyadicPartition small(Grid::make(1024));
  try {
    build_gamma0(small, 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Resolution);
  }
  EXPECT_THROW(build_gamma0(small, 0), Error);
  EXPECT_THROW(build_gamma0(small, -3), Error);
  const DyadicPartition odd(Grid::make(1 << 14, 3.0));
  EXPECT_THROW(build_gamma0(odd, 6), Error);
}

TEST(BuildGamma0, NormScalingBounds) {
  // C1 and C2 frozen from the N = 6..12 oracle sweep.
  for (int N : {6, 7, 8}) {
    const DyadicPartition part(inflation_grid(N));
    const auto d = build_gamma0(part, N);
    EXPECT_LE(d.norm_b0_inf_1, 1.90 * std::pow(N, -0.1)) << "N=" << N;
    EXPECT_LE(d.norm_weighted, 4.5 * std::pow(N, 1.9)) << "N=" << N;
    EXPECT_LE(d.gamma0.sup_norm(), d.norm_b0_inf_1);
  }
}

TEST(BuildGamma0, ResolutionConverged) {
  for (int N : {6, 7}) {
    const auto g = inflation_grid(N);
    const auto d1 = build_gamma0(DyadicPartition(g), N);
    const auto d2 = build_gamma0(DyadicPartition(Grid::make(2 * g.size())), N);
    EXPECT_NEAR(d2.norm_b0_inf_1 / d1.norm_b0_inf_1, 1.0, 1e-6);
    EXPECT_NEAR(d2.norm_weighted / d1.norm_weighted, 1.0, 1e-6);
    EXPECT_NEAR(d2.norm_square_b0_inf_1 / d1.norm_square_b0_inf_1, 1.0, 1e-6);
  }
}

TEST(AlgebraDefect, RatioIncreasesWithN) {
  double prev = 0.0;
  for (int N : {6, 7, 8, 9}) {
    const DyadicPartition part(inflation_grid(N));
    const auto d = build_gamma0(part, N);
    const auto ad = algebra_defect(part, d);
    EXPECT_NEAR(ad.a, d.norm_b0_inf_1, 1e-14);
    EXPECT_NEAR(ad.b, d.norm_square_b0_inf_1, 1e-14);
    EXPECT_GT(ad.ratio, prev) << "N=" << N;
    prev = ad.ratio;
  }
}

TEST(AlgebraDefect, PureModeHasNoDefect) {
  const DyadicPartition part(Grid::make(1024));
  const auto w = RealField::from_function(part.grid(), [](double x) { return std::cos(32 * x); });
  const double a = norm_profile_refined(part, w).b0_inf_1();
  const double b = norm_profile_refined(part, exact_square(w, 32)).b0_inf_1();
  EXPECT_LE(b / (a * a), 2.0);
  EXPECT_NEAR(b, 1.0, 1e-10);  // (1 + cos 64x)/2: chi block 1/2, annulus blocks 1/2
}

TEST(AlgebraDefect, HeadroomViolationRejected) {
  const auto g = Grid::make(256);
  const RealField u(g);
  EXPECT_THROW(exact_square(u, 64), Error);
  EXPECT_NO_THROW(exact_square(u, 63));
}

TEST(LowFrequencyShare, MajorityAndGrowing) {
  double prev = 0.0;
  for (int N : {8, 9}) {
    const DyadicPartition part(inflation_grid(N));
    const auto d = build_gamma0(part, N);
    const double share = low_frequency_share(part, exact_square(d.gamma0, d.band), N + 2);
    EXPECT_GE(share, 0.65);
    EXPECT_GT(share, prev);
    prev = share;
  }
}

TEST(RefinedProfile, NeverBelowSampledAndExactOnShiftedMode) {
  const DyadicPartition part(Grid::make(256));
  // Peak of cos(50(x - s)) falls between nodes; refined sup recovers 1.
  const auto u = RealField::from_function(part.grid(), [](double x) { return std::cos(50 * (x - 0.0123)); });
  const auto plain = norm_profile(part, u);
  const auto fine = norm_profile_refined(part, u);
  for (std::size_t i = 0; i < plain.j_values.size(); ++i)
    EXPECT_GE(fine.block_sup_norms[i], plain.block_sup_norms[i]);
  EXPECT_NEAR(fine.b0_inf_1(), 1.0, 1e-12);
  EXPECT_LT(plain.b0_inf_1(), 1.0 - 1e-4);
}

}  // namespace
}  // namespace mochlab
