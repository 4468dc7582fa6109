#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "imutube/distmap/frechet.hpp"
#include "imutube/distmap/rank_map.hpp"

using namespace imutube;
using namespace imutube::distmap;

namespace {

std::vector<double> normal_samples(std::size_t n, double mu, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(mu, sigma);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

GaussianStats gauss1(double mu, double var) {
  GaussianStats g;
  g.mean = Eigen::VectorXd::Constant(1, mu);
  g.cov = Eigen::MatrixXd::Constant(1, 1, var);
  return g;
}

}  // namespace

TEST(EmpiricalCdf, HazenPositionsAndInverse) {
  const EmpiricalCDF f({3.0, 1.0, 2.0, 4.0});
  EXPECT_DOUBLE_EQ(f.cdf(1.0), 0.125);
  EXPECT_DOUBLE_EQ(f.cdf(4.0), 0.875);
  EXPECT_DOUBLE_EQ(f.cdf(2.5), 0.5);
  EXPECT_DOUBLE_EQ(f.cdf(-10.0), 0.125);
  EXPECT_DOUBLE_EQ(f.cdf(10.0), 0.875);
  EXPECT_DOUBLE_EQ(f.quantile(0.5), 2.5);
  EXPECT_DOUBLE_EQ(f.quantile(0.0), 1.0);
  EXPECT_DOUBLE_EQ(f.quantile(1.0), 4.0);
  for (double x : {1.0, 1.3, 2.0, 3.7, 4.0}) EXPECT_NEAR(f.quantile(f.cdf(x)), x, 1e-12);
  EXPECT_THROW(EmpiricalCDF({1.0}), DataError);
  const EmpiricalCDF ties({1.0, 2.0, 2.0, 2.0, 3.0});
  EXPECT_DOUBLE_EQ(ties.cdf(2.0), 0.5);
}

TEST(FitMap, EqualSamplesGiveIdentity) {
  const auto v = normal_samples(500, 0, 1, 1);
  const auto m = fit_map({v}, {v});
  for (double x : v) EXPECT_NEAR(m.apply(0, x), x, 1e-9);
  EXPECT_EQ(m.channels.size(), 1u);
  EXPECT_THROW(fit_map({{1.0}}, {{1.0, 2.0}}), DataError);
  EXPECT_THROW(fit_map({v, v}, {v}), DataError);
}

TEST(FitMap, ShiftedCopyMapsOntoOrderStatistics) {
  const auto real = normal_samples(1000, 0, 1, 2);
  std::vector<double> virt = real;
  for (auto& x : virt) x += 5.0;
  const auto m = fit_map({virt}, {real}, {"accel_x"});
  std::vector<double> mapped = apply_map(m, 0, virt);
  for (std::size_t i = 0; i < real.size(); ++i) EXPECT_NEAR(mapped[i], real[i], 1e-9);
  EXPECT_NEAR(m.apply("accel_x", virt[0]), real[0], 1e-9);
}

TEST(FitMap, UniformToNormalKs) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> virt(100000);
  for (auto& x : virt) x = u(rng);
  const auto real = normal_samples(100000, 0, 1, 4);
  const auto m = fit_map({virt}, {real});
  const auto fresh_virt = [&] {
    std::vector<double> v(100000);
    for (auto& x : v) x = u(rng);
    return v;
  }();
  EXPECT_LT(ks_statistic(apply_map(m, 0, fresh_virt), real), 0.02);
  EXPECT_GT(ks_statistic(fresh_virt, real), 0.3);
}

TEST(FitMap, MonotoneAndWithinTargetRange) {
  const auto m = fit_map({normal_samples(300, 2, 3, 5)}, {normal_samples(200, -1, 0.5, 6)});
  double prev = -1e300;
  for (double x = -20; x <= 20; x += 0.01) {
    const double y = m.apply(0, x);
    EXPECT_GE(y, prev);
    EXPECT_GE(y, m.channels[0].target.min());
    EXPECT_LE(y, m.channels[0].target.max());
    prev = y;
  }
}

TEST(FitMap, JsonRoundTrip) {
  const auto m = fit_map({normal_samples(50, 0, 1, 7), {1, 2, 3}}, {normal_samples(40, 1, 2, 8), {4, 5}}, {"a", "b"});
  const auto back = map_from_json(nlohmann::json::parse(map_to_json(m).dump()));
  ASSERT_EQ(back.channels.size(), 2u);
  EXPECT_EQ(back.channels[1].name, "b");
  for (double x : {-3.0, 0.1, 2.5}) EXPECT_EQ(back.apply(0, x), m.apply(0, x));
  auto j = map_to_json(m);
  j["schema"] = "dmap_v0";
  EXPECT_THROW(map_from_json(j), ParseError);
}

TEST(Ks, Examples) {
  EXPECT_DOUBLE_EQ(ks_statistic({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_DOUBLE_EQ(ks_statistic({1, 2}, {3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}), 0.5);
}

TEST(Frechet, ClosedFormOneDimensional) {
  EXPECT_NEAR(frechet_distance(gauss1(0, 1), gauss1(0, 1)), 0.0, 1e-9);
  EXPECT_NEAR(frechet_distance(gauss1(0, 1), gauss1(1, 1)), 1.0, 1e-12);
  EXPECT_NEAR(frechet_distance(gauss1(0, 1), gauss1(0, 4)), 1.0, 1e-12);
}

TEST(Frechet, MatchesCommutingClosedFormAndIsSymmetric) {
  // For diagonal covariances: sum (mu diff)^2 + sum (sqrt(a_i) - sqrt(b_i))^2.
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.1, 4.0);
  for (int t = 0; t < 50; ++t) {
    GaussianStats a, b;
    a.mean = Eigen::VectorXd::Random(5);
    b.mean = Eigen::VectorXd::Random(5);
    Eigen::VectorXd da(5), db(5);
    for (int i = 0; i < 5; ++i) da(i) = u(rng), db(i) = u(rng);
    // Shared random orthonormal basis keeps the covariances commuting.
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(5, 5)).householderQ();
    a.cov = q * da.asDiagonal() * q.transpose();
    b.cov = q * db.asDiagonal() * q.transpose();
    const double expected = (a.mean - b.mean).squaredNorm() + (da.cwiseSqrt() - db.cwiseSqrt()).squaredNorm();
    EXPECT_NEAR(frechet_distance(a, b), expected, 1e-9);
    EXPECT_NEAR(frechet_distance(a, b), frechet_distance(b, a), 1e-9);
  }
  EXPECT_THROW(frechet_distance(gauss1(0, 1), GaussianStats{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)}),
               DataError);
}

TEST(FitGaussian, Examples) {
  const auto g = fit_gaussian(std::vector<std::vector<double>>{{0.0}, {2.0}});
  EXPECT_DOUBLE_EQ(g.mean(0), 1.0);
  EXPECT_DOUBLE_EQ(g.cov(0, 0), 2.0);
  const auto z = fit_gaussian(std::vector<std::vector<double>>(5, {1.0, 2.0, 3.0}));
  EXPECT_EQ(z.cov.norm(), 0.0);
  EXPECT_THROW(fit_gaussian(std::vector<std::vector<double>>{{1.0, 2.0}, {2.0, 3.0}}), DataError);
  EXPECT_THROW(fit_gaussian(std::vector<std::vector<double>>{{1.0, 2.0}, {2.0}, {1.0, 1.0}}), DataError);
}
