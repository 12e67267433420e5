#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "mochlab/error.hpp"
#include "mochlab/grid.hpp"
#include "mochlab/io.hpp"
#include "mochlab/random_fields.hpp"
#include "mochlab/spectral_ops.hpp"

namespace mochlab {
namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const RealField& a, const RealField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TEST(MakeGrid, EightPointNodesAndModes) {
  const auto g = Grid::make(8, 2 * kPi);
  ASSERT_EQ(g.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(g.node(i), -kPi + i * kPi / 4, 1e-15);
  EXPECT_EQ(g.mode_numbers(), (std::vector<long>{0, 1, 2, 3, 4, -3, -2, -1}));
  EXPECT_DOUBLE_EQ(g.wavenumber(4), 4.0);
}

TEST(MakeGrid, RejectsNonPowerOfTwo) {
  try {
    Grid::make(7, 2 * kPi);
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("count must be power of two"), std::string::npos);
  }
  EXPECT_THROW(Grid::make(4, 1.0), Error);
}

TEST(MakeGrid, RejectsNonPositivePeriod) {
  EXPECT_THROW(Grid::make(16, 0.0), Error);
  EXPECT_THROW(Grid::make(16, -1.0), Error);
}

TEST(MakeGrid, LargeGridNyquist) {
  const auto g = Grid::make(std::size_t{1} << 20);
  EXPECT_EQ(g.nyquist_index(), std::size_t{1} << 19);
}

TEST(MakeGrid, EquispacedNodes) {
  const auto g = Grid::make(64, 3.0);
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    EXPECT_NEAR(g.node(i + 1) - g.node(i), 3.0 / 64, 1e-15);
}

TEST(SpectralField, CosineHasHalfCoefficient) {
  const auto g = Grid::make(32);
  for (int k : {1, 2, 3, 7}) {
    auto f = RealField::from_function(g, [k](double x) { return std::cos(k * x); });
    auto sp = to_spectral(f);
    EXPECT_NEAR(sp.coeff(k).real(), 0.5, 1e-15);
    EXPECT_NEAR(sp.coeff(-k).real(), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(sp.coeff(k).imag()), 0.0, 1e-15);
  }
}

TEST(SpectralField, HermitianAndRoundTrip) {
  const auto g = Grid::make(256);
  const auto f = random_bandlimited(g, 7, 100);
  const auto sp = to_spectral(f);
  for (long k = 1; k < 128; ++k) EXPECT_EQ(sp.coeff(-k), std::conj(sp.coeff(k)));
  const auto back = to_physical(sp);
  EXPECT_LE(max_abs_diff(back, f), 1e-12 * f.sup_norm());
}

TEST(SpectralField, Parseval) {
  const auto g = Grid::make(512);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto f = random_bandlimited(g, seed, 255, 0.5);
    const auto sp = to_spectral(f);
    const auto c = sp.coefficients();
    double spec = std::norm(c[0]) + std::norm(c.back());
    for (std::size_t k = 1; k + 1 < c.size(); ++k) spec += 2.0 * std::norm(c[k]);
    double phys = 0.0;
    for (double v : f.samples()) phys += v * v;
    phys /= static_cast<double>(f.size());
    EXPECT_NEAR(spec, phys, 1e-12 * phys);
  }
}

TEST(Derivative, Examples) {
  const auto g = Grid::make(64);
  auto s = RealField::from_function(g, [](double x) { return std::sin(x); });
  auto c = RealField::from_function(g, [](double x) { return std::cos(x); });
  EXPECT_LE(max_abs_diff(derivative(s), c), 1e-12);

  RealField one(g, std::vector<double>(64, 1.0));
  EXPECT_LE(derivative(one).sup_norm(), 1e-12);

  auto c3 = RealField::from_function(g, [](double x) { return std::cos(3 * x); });
  auto ms3 = RealField::from_function(g, [](double x) { return -3 * std::sin(3 * x); });
  EXPECT_LE(max_abs_diff(derivative(c3), ms3), 1e-12);
}

TEST(Derivative, NyquistModeIsDropped) {
  const auto g = Grid::make(16);
  auto nyq = RealField::from_function(g, [](double x) { return std::cos(8 * x); });
  EXPECT_LE(derivative(nyq).sup_norm(), 1e-13);
}

TEST(HelmholtzInverse, Examples) {
  const auto g = Grid::make(64);
  auto c = RealField::from_function(g, [](double x) { return std::cos(x); });
  EXPECT_LE(max_abs_diff(helmholtz_inverse(c), -0.5 * c), 1e-14);

  RealField one(g, std::vector<double>(64, 1.0));
  RealField minus_one(g, std::vector<double>(64, -1.0));
  EXPECT_LE(max_abs_diff(helmholtz_inverse(one), minus_one), 1e-14);

  auto s2 = RealField::from_function(g, [](double x) { return std::sin(2 * x); });
  EXPECT_LE(max_abs_diff(helmholtz_inverse(s2), -0.2 * s2), 1e-14);
}

TEST(HelmholtzInverse, InverseOfG) {
  const auto g = Grid::make(256);
  for (std::uint64_t seed = 11; seed < 16; ++seed) {
    const auto f = random_bandlimited(g, seed, 60);
    EXPECT_LE(max_abs_diff(helmholtz(helmholtz_inverse(f)), f), 1e-10 * f.sup_norm());
    EXPECT_LE(max_abs_diff(helmholtz_inverse(helmholtz(f)), f), 1e-10 * f.sup_norm());
  }
}

TEST(HelmholtzInverse, CommutesWithDerivative) {
  const auto g = Grid::make(256);
  const auto f = random_bandlimited(g, 3, 120);
  const auto a = derivative(helmholtz_inverse(f));
  const auto b = helmholtz_inverse(derivative(f));
  EXPECT_LE(max_abs_diff(a, b), 1e-10 * f.sup_norm());
}

TEST(Dealias, Examples) {
  const auto g = Grid::make(128);
  // cutoff = 128/3 = 42
  auto low = RealField::from_function(g, [](double x) { return std::cos(42 * x) + std::sin(5 * x); });
  EXPECT_LE(max_abs_diff(dealias(low), low), 1e-13);

  auto nyq = RealField::from_function(g, [](double x) { return std::cos(64 * x); });
  EXPECT_LE(dealias(nyq).sup_norm(), 1e-14);

  const auto f = random_bandlimited(g, 5, 63);
  const auto once = dealias(f);
  EXPECT_LE(max_abs_diff(dealias(once), once), 1e-14);
  EXPECT_GT(max_abs_diff(once, f), 1e-6);
}

TEST(EvaluateSeries, MatchesSamplesAndOffGrid) {
  const auto g = Grid::make(64);
  const auto f = RealField::from_function(g, [](double x) { return std::sin(3 * x) + 0.25 * std::cos(10 * x); });
  const auto sp = to_spectral(f);
  std::vector<double> out(g.size());
  evaluate_series(sp, g.nodes(), out);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(out[i], f[i], 1e-13);

  const std::vector<double> xs{0.1234, -2.9, 3.1, 1e-3};
  std::vector<double> vals(xs.size());
  evaluate_series(sp, xs, vals);
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_NEAR(vals[i], std::sin(3 * xs[i]) + 0.25 * std::cos(10 * xs[i]), 1e-13);
}

TEST(Snapshot, RoundTripIsBitExact) {
  const auto g = Grid::make(128, 5.5);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto f = random_bandlimited(g, seed, 40);
    const auto bytes = encode_snapshot(f);
    ASSERT_EQ(bytes.size(), 4 + 4 + 8 + 8 + 8 * 128u);
    EXPECT_EQ(bytes.substr(0, 4), "MOCH");
    const auto back = decode_snapshot(bytes);
    EXPECT_EQ(back.grid().period(), 5.5);
    EXPECT_EQ(back.values(), f.values());
  }
}

TEST(Snapshot, RejectsMalformed) {
  EXPECT_THROW(decode_snapshot("NOPE"), Error);
  const auto g = Grid::make(8);
  auto bytes = encode_snapshot(RealField(g));
  EXPECT_THROW(decode_snapshot(bytes.substr(0, bytes.size() - 3)), Error);
  auto bad_version = bytes;
  bad_version[4] = 2;
  EXPECT_THROW(decode_snapshot(bad_version), Error);
}

TEST(Snapshot, MissingFileIsIoError) {
  try {
    read_snapshot("/nonexistent/dir/x.snap");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(FieldCsv, HeaderAndFullPrecision) {
  const auto g = Grid::make(8);
  const auto f = RealField::from_function(g, [](double x) { return std::exp(x) / 3.0; });
  const auto csv = field_to_csv(f);
  EXPECT_EQ(csv.substr(0, 8), "x,value\n");
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  for (std::size_t i = 0; i < 8; ++i) {
    std::getline(in, line);
    const auto comma = line.find(',');
    EXPECT_EQ(std::stod(line.substr(0, comma)), g.node(i));
    EXPECT_EQ(std::stod(line.substr(comma + 1)), f[i]);
  }
}

}  // namespace
}  // namespace mochlab
