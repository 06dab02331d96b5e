#include <gtest/gtest.h>

#include <cmath>

#include "spdwave/harness.hpp"
#include "testing.hpp"

namespace spdwave {
namespace {

TEST(Curves, ValuesAtZero) {
  const SpdMat a = curve_eval(CurveSpec::c1(), 0.0);
  EXPECT_NEAR(a(0, 0), 50.1, 1e-12);
  EXPECT_NEAR(a(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(a(1, 1), 1.0, 1e-12);
  const SpdMat b = curve_eval(CurveSpec::c2(), 0.0);
  EXPECT_NEAR(b(0, 0), 54.441, 1e-3);
  EXPECT_NEAR(b(0, 1), 18.766, 1e-3);
  EXPECT_NEAR(b(1, 1), 7.827, 1e-3);
  const SpdMat c = curve_eval(CurveSpec::c3(), 0.0);
  EXPECT_NEAR(c(0, 0), 50.0, 1e-12);
  EXPECT_NEAR(c(0, 1), 5.0, 1e-12);
  EXPECT_NEAR(c(1, 1), 1.0, 1e-12);
  EXPECT_THROW(curve_eval(CurveSpec::c1(), 1.5), InvalidArgument);
  EXPECT_THROW(CurveSpec::by_name("c4"), InvalidArgument);
}

TEST(Curves, GridIsSpdAwayFromSingularity) {
  for (const char* id : {"c1", "c2", "c3"}) {
    const auto g = make_grid(CurveSpec::by_name(id), 10);
    ASSERT_EQ(g.values.size(), 1024u);
    for (std::size_t k = 0; k < g.values.size(); ++k) {
      EXPECT_NEAR(g.t[k], (2.0 * static_cast<double>(k) + 1) / 2048.0, 1e-15);
      EXPECT_GT(determinant(g.values[k].sym()), 0.0);
    }
  }
}

TEST(Sampling, ZeroNoiseIsExact) {
  RngStream rng(1, {1});
  const auto truth = make_grid(CurveSpec::c2(), 6);
  const auto xs = sample_noisy_curve(CurveSpec::c2(), NoiseSpec{}, 6, rng);
  for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_LT(testing::frob_diff(xs[k], truth.values[k]), 1e-9);
}

TEST(Sampling, LogMeanAndCovarianceMatchNoise) {
  const NoiseSpec noise{0.1, 0.05, 0.1};
  const SpdMat s = testing::spd_diag({2.0, 0.5});
  const LogSequence truth(1, mat_log(s));
  const int n = 20000;
  std::vector<SymMat> offsets;
  RngStream rng(2, {1});
  for (int i = 0; i < n; ++i)
    offsets.push_back(mat_log(mat_exp(sample_noisy_curve_log(truth, noise, rng)[0])) - truth[0]);
  SymMat mean(2);
  for (const auto& o : offsets) mean.axpy(1.0 / n, o);
  EXPECT_NEAR(mean(0, 0), 0.0, 5 * 0.1 / std::sqrt(n));
  EXPECT_NEAR(mean(0, 1), 0.0, 5 * 0.1 / std::sqrt(n));
  const Matrix c = noise.cov().eta_matrix();
  const Matrix emp = empirical_covariance_eta(offsets);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      const double se = std::sqrt((c(a, a) * c(b, b) + c(a, b) * c(a, b)) / n);
      EXPECT_NEAR(emp(a, b), c(a, b), 5 * se);
    }
}

StudyConfig small_study() {
  StudyConfig c = StudyConfig::reference("c3", 99);
  c.J = 7;
  c.J0 = c.J0_star = 4;
  c.N = 3;
  c.K = 6;
  c.B = 40;
  c.boundary_trim = 10;
  c.volume_samples = 500;
  c.volume_stride = 20;
  return c;
}

TEST(CoverageStudy, DeterministicRegardlessOfThreads) {
  StudyConfig c = small_study();
  c.threads = 1;
  const auto a = coverage_study(c);
  c.threads = 3;
  const auto b = coverage_study(c);
  ASSERT_EQ(a.rows.size(), 6u);
  for (std::size_t r = 0; r < a.rows.size(); ++r) {
    EXPECT_EQ(a.rows[r].coverage, b.rows[r].coverage);
    EXPECT_EQ(a.rows[r].scaled_volume, b.rows[r].scaled_volume);
  }
  EXPECT_EQ(a.points.size(), 128u - 20u);
  EXPECT_EQ(a.rows[0].volume_count, 6u * 6u);
}

TEST(CoverageStudy, CoverageMonotoneInLevel) {
  const auto r = coverage_study(small_study());
  for (CsType t : {CsType::asymptotic, CsType::bootstrap}) {
    EXPECT_LE(r.row(0.9, t).coverage, r.row(0.95, t).coverage);
    EXPECT_LE(r.row(0.95, t).coverage, r.row(0.975, t).coverage);
    EXPECT_LE(r.row(0.9, t).volume, r.row(0.975, t).volume);
    EXPECT_GE(r.row(0.9, t).coverage, 0.0);
    EXPECT_LE(r.row(0.975, t).coverage, 1.0);
  }
}

TEST(CoverageStudy, ConstantCurveWithoutNoiseIsAlwaysCovered) {
  StudyConfig c = small_study();
  c.curve = CurveSpec::constant(testing::spd_diag({3.0, 0.5}));
  c.noise = NoiseSpec{};
  c.volumes = false;
  const auto r = coverage_study(c);
  EXPECT_FALSE(r.asymptotic_available);
  for (const auto& row : r.rows)
    if (row.type == CsType::bootstrap) {
      EXPECT_EQ(row.coverage, 1.0);
    }
}

TEST(CoverageStudy, RejectsBadConfig) {
  StudyConfig c = small_study();
  c.boundary_trim = 64;
  EXPECT_THROW(coverage_study(c), InvalidArgument);
  c = small_study();
  c.levels = {0.9, 1.0};
  EXPECT_THROW(coverage_study(c), InvalidArgument);
  c = small_study();
  c.N = 4;
  EXPECT_THROW(coverage_study(c), InvalidArgument);
}

TEST(CltCheck, HaarCaseMatchesBlockAverage) {
  // N = 1: the estimator is the block mean of 2^{J-J0} observations.
  CltConfig c;
  c.J = 8;
  c.J0 = 5;
  c.N = 1;
  c.x = 0.5;
  c.R = 3000;
  c.seed = 3;
  const auto r = clt_check(c);
  EXPECT_EQ(r.kappa, 1.0);
  EXPECT_DOUBLE_EQ(r.exact_factor, 1.0 / 8.0);
  EXPECT_DOUBLE_EQ(r.kappa_factor, 1.0 / 8.0);
  EXPECT_LT(r.rel_error, 0.1);
  EXPECT_GT(r.ks_pvalue, 1e-3);
  EXPECT_EQ(r.k, 128u);
  c.x = 0.3;
  EXPECT_THROW(clt_check(c), InvalidArgument);
}

TEST(CltCheck, EstimatorWeightsSumToOne) {
  const auto order = RefinementOrder::from_N(5);
  for (std::size_t k : {0u, 7u, 100u, 255u}) {
    double s = 0;
    for (double w : detail::estimator_weights(8, 4, order, k)) s += w;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(KsStatistic, Examples) {
  EXPECT_NEAR(ks_statistic_normal({0.0}), 0.5, 1e-15);
  RngStream rng(4, {1});
  std::vector<double> z(5000);
  for (auto& v : z) v = rng.normal();
  EXPECT_LT(ks_statistic_normal(z), 1.63 / std::sqrt(5000.0));
  for (auto& v : z) v += 0.2;
  EXPECT_LT(detail::ks_pvalue(ks_statistic_normal(z), z.size()), 1e-6);
}

TEST(MseStudy, SmallRunDecreases) {
  MseConfig c;
  c.scales = {6, 8};
  c.replicates = 5;
  c.seed = 5;
  const auto pts = mse_study(c);
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_EQ(pts[0].J0, 3);
  EXPECT_EQ(pts[1].J0, 4);
  EXPECT_GT(pts[0].mse, pts[1].mse);
}

}  // namespace
}  // namespace spdwave
