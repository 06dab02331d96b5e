#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spdwave/pyramid.hpp"
#include "testing.hpp"

namespace spdwave {
namespace {

using testing::frob_diff;

SpdMat scalar_exp(double v) {
  const double e = std::exp(v);
  return SpdMat(SymMat::diagonal(std::span<const double>(&e, 1)));
}

std::vector<SpdMat> scalar_sequence(std::initializer_list<double> logs) {
  std::vector<SpdMat> out;
  for (double v : logs) out.push_back(scalar_exp(v));
  return out;
}

TEST(DyadicScale, Basics) {
  EXPECT_EQ(dyadic_scale(1), 0);
  EXPECT_EQ(dyadic_scale(1024), 10);
  EXPECT_THROW(dyadic_scale(0), InvalidArgument);
  EXPECT_THROW(dyadic_scale(6), InvalidArgument);
}

TEST(ReflectIndex, Boundaries) {
  EXPECT_EQ(reflect_index(-1, 4), 0u);
  EXPECT_EQ(reflect_index(-2, 4), 1u);
  EXPECT_EQ(reflect_index(4, 4), 3u);
  EXPECT_EQ(reflect_index(5, 4), 2u);
  EXPECT_EQ(reflect_index(-3, 1), 0u);
  EXPECT_EQ(reflect_index(2, 4), 2u);
}

TEST(BuildPyramid, Examples) {
  const double e = std::numbers::e;
  const std::vector<SpdMat> two{SpdMat::identity(2), testing::spd_diag({e * e, e * e})};
  const auto p = build_pyramid(two);
  EXPECT_EQ(p.J, 1);
  EXPECT_LT(frob_diff(p.levels[0][0], testing::spd_diag({e, e})), 1e-13);

  const auto q = build_pyramid(scalar_sequence({0, 2, 4, 6}));
  EXPECT_NEAR(std::log(q.levels[1][0](0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::log(q.levels[1][1](0, 0)), 5.0, 1e-14);
  EXPECT_NEAR(std::log(q.levels[0][0](0, 0)), 3.0, 1e-14);

  RngStream rng(1, {1});
  const SpdMat s = testing::random_spd(rng, 3);
  const auto c = build_pyramid(std::vector<SpdMat>(8, s));
  for (const auto& level : c.levels)
    for (const auto& m : level) EXPECT_LT(frob_diff(m, s), 1e-12);
  EXPECT_THROW(build_pyramid(std::vector<SpdMat>(3, s)), InvalidArgument);
}

TEST(BuildPyramid, MidpointAndDeterminantProperties) {
  RngStream rng(2, {2});
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const int J = 1 + trial % 5;
    const auto xs = testing::random_spd_sequence(rng, std::size_t{1} << J, d);
    const auto p = build_pyramid(xs);
    for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_EQ(p.levels[J][k], xs[k]);
    for (int j = 0; j < J; ++j)
      for (std::size_t k = 0; k < p.levels[j].size(); ++k) {
        const SpdMat pair[] = {p.levels[j + 1][2 * k], p.levels[j + 1][2 * k + 1]};
        const double half[] = {0.5, 0.5};
        EXPECT_LT(frob_diff(p.levels[j][k], weighted_ave(pair, half)), 1e-10);
        const std::size_t span = std::size_t{1} << (J - j);
        double log_det = 0.0;
        for (std::size_t i = k * span; i < (k + 1) * span; ++i)
          log_det += std::log(determinant(xs[i].sym()));
        EXPECT_NEAR(determinant(p.levels[j][k].sym()) / std::exp(log_det / static_cast<double>(span)), 1.0, 1e-8);
      }
  }
}

TEST(ForwardTransform, Examples) {
  RngStream rng(3, {3});
  const SpdMat s = testing::random_spd(rng, 2);
  const auto w = forward_transform(std::vector<SpdMat>(16, s), RefinementOrder(1));
  EXPECT_LT(frob_diff(w.coarsest, s), 1e-12);
  for (int j = 1; j <= w.J; ++j)
    for (const auto& c : w.scale(j)) EXPECT_LT(frobenius_norm(c), 1e-12);

  const auto one = forward_transform(scalar_sequence({0, 2}), RefinementOrder(0));
  EXPECT_NEAR(std::log(one.coarsest(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(one.scale(1)[0](0, 0), 1.0 / std::sqrt(2.0), 1e-15);
  const auto back = backward_transform(one);
  EXPECT_NEAR(std::log(back[0](0, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::log(back[1](0, 0)), 2.0, 1e-15);
}

TEST(ForwardTransform, GeodesicInputHasZeroDetail) {
  RngStream rng(4, {4});
  const SpdMat a = testing::random_spd(rng, 3), b = testing::random_spd(rng, 3);
  std::vector<SpdMat> xs;
  for (int k = 0; k < 16; ++k) xs.push_back(geodesic(k / 15.0, a, b));
  for (int L = 1; L <= 3; ++L) {
    const auto w = forward_transform(xs, RefinementOrder(L));
    for (int j = 1; j <= w.J; ++j)
      for (std::size_t k = 0; k < w.scale(j).size(); ++k) {
        // Reflection breaks linearity only where the window leaves the range.
        const long long n = static_cast<long long>(w.scale(j).size());
        const long long kk = static_cast<long long>(k);
        if (kk - L < 0 || kk + L >= n) continue;
        EXPECT_LT(frobenius_norm(w.scale(j)[k]), 1e-10) << "L=" << L << " j=" << j << " k=" << k;
      }
  }
}

TEST(BackwardTransform, Examples) {
  RngStream rng(5, {5});
  const SpdMat s = testing::random_spd(rng, 2);
  for (int L = 0; L <= 3; ++L) {
    WaveletPyramid p{3, s, {}, RefinementOrder(L)};
    for (int j = 1; j <= 3; ++j) p.coeffs.emplace_back(std::size_t{1} << (j - 1), SymMat(2));
    for (const auto& m : backward_transform(p)) EXPECT_LT(frob_diff(m, s), 1e-12);
  }
  WaveletPyramid q{2, scalar_exp(3.0), {{SymMat(1)}, {SymMat(1), SymMat(1)}}, RefinementOrder(1)};
  for (const auto& m : backward_transform(q)) EXPECT_NEAR(std::log(m(0, 0)), 3.0, 1e-14);

  WaveletPyramid bad = q;
  bad.coeffs[1].pop_back();
  EXPECT_THROW(backward_transform(bad), InvalidArgument);
  bad = q;
  bad.coeffs[0][0] = SymMat(2);
  EXPECT_THROW(backward_transform(bad), DimensionMismatch);
}

TEST(Transform, PerfectReconstructionProperty) {
  RngStream rng(6, {6});
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const int J = 1 + trial % 7;
    const int L = trial % 4;
    const auto xs = testing::random_spd_sequence(rng, std::size_t{1} << J, d);
    const auto back = backward_transform(forward_transform(xs, RefinementOrder(L)));
    ASSERT_EQ(back.size(), xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_LT(frob_diff(back[k], xs[k]), 1e-9);
  }
}

TEST(Transform, WhitenedNormMatchesLogResidual) {
  RngStream rng(7, {7});
  const auto xs = testing::random_spd_sequence(rng, 32, 2);
  const RefinementOrder order(2);
  const auto w = forward_transform(xs, order);
  const auto levels = log_pyramid(to_log(xs));
  for (int j = 1; j <= w.J; ++j)
    for (std::size_t k = 0; k < w.scale(j).size(); ++k) {
      const auto pred = detail::predict_at(levels[j - 1], k, order);
      const double direct = frobenius_norm(levels[j][2 * k + 1] - pred.odd);
      EXPECT_NEAR(frobenius_norm(w.scale(j)[k]), std::pow(2.0, -0.5 * j) * direct, 1e-12);
    }
}

TEST(Transform, EnergyInvariantUnderCongruence) {
  RngStream rng(8, {8});
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const auto xs = testing::random_spd_sequence(rng, 16, d);
    const Matrix o = testing::random_orthogonal(rng, d);
    std::vector<SpdMat> ys;
    for (const auto& x : xs) ys.push_back(congruence(o, x));
    auto energy = [](const WaveletPyramid& w) {
      double e = 0.0;
      for (const auto& s : w.coeffs)
        for (const auto& c : s) e += frobenius_inner(c, c);
      return e;
    };
    const RefinementOrder order(trial % 4);
    EXPECT_NEAR(energy(forward_transform(xs, order)), energy(forward_transform(ys, order)), 1e-9);
  }
}

TEST(LinearEstimate, Examples) {
  RngStream rng(9, {9});
  const auto xs = testing::random_spd_sequence(rng, 16, 2);
  const auto same = linear_estimate(xs, 4, RefinementOrder(2));
  for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_EQ(same[k], xs[k]);

  const SpdMat s = testing::random_spd(rng, 3);
  for (int J0 = 0; J0 <= 3; ++J0)
    for (const auto& m : linear_estimate(std::vector<SpdMat>(8, s), J0, RefinementOrder(1)))
      EXPECT_LT(frob_diff(m, s), 1e-12);

  const auto flat = linear_estimate(scalar_sequence({0, 1, 2, 3, 4, 5, 6, 7}), 0, RefinementOrder(0));
  for (const auto& m : flat) EXPECT_NEAR(std::log(m(0, 0)), 3.5, 1e-14);

  EXPECT_THROW(linear_estimate(xs, 5, RefinementOrder(1)), InvalidArgument);
  EXPECT_THROW(linear_estimate(xs, -1, RefinementOrder(1)), InvalidArgument);
}

TEST(LinearEstimate, MatchesThresholdedTransform) {
  RngStream rng(10, {10});
  for (int trial = 0; trial < 30; ++trial) {
    const int J = 2 + trial % 6;
    const int J0 = trial % (J + 1);
    const RefinementOrder order(trial % 4);
    const auto xs = testing::random_spd_sequence(rng, std::size_t{1} << J, 2);
    const auto logs = to_log(xs);
    auto w = forward_transform_log(logs, order);
    threshold_above(w, J0);
    const auto slow = backward_transform_log(w, order);
    const auto fast = linear_estimate_log(logs, J0, order);
    for (std::size_t k = 0; k < logs.size(); ++k) EXPECT_LT(frob_diff(slow[k], fast[k]), 1e-11);
    // The kept scales are exactly the level-J0 midpoints.
    const auto levels_in = log_pyramid(logs);
    const auto levels_out = log_pyramid(fast);
    for (std::size_t k = 0; k < levels_in[J0].size(); ++k)
      EXPECT_LT(frob_diff(levels_in[J0][k], levels_out[J0][k]), 1e-11);
  }
}

TEST(LinearEstimate, CongruenceEquivarianceProperty) {
  RngStream rng(11, {11});
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 2 + trial % 2;
    const auto xs = testing::random_spd_sequence(rng, 32, d);
    const Matrix o = trial % 5 == 0 ? Matrix::from_rows(d, d, d == 2 ? std::vector<double>{0, 1, 1, 0}
                                                                      : std::vector<double>{0, 0, 1, 1, 0, 0, 0, 1, 0})
                                    : testing::random_orthogonal(rng, d);
    std::vector<SpdMat> ys;
    for (const auto& x : xs) ys.push_back(congruence(o, x));
    const RefinementOrder order(trial % 4);
    const auto ex = linear_estimate(xs, 2, order);
    const auto ey = linear_estimate(ys, 2, order);
    for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_LT(frob_diff(congruence(o, ex[k]), ey[k]), 1e-9);
  }
}

}  // namespace
}  // namespace spdwave
