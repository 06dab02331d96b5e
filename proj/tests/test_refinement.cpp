#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spdwave/refinement.hpp"
#include "testing.hpp"

namespace spdwave {
namespace {

using testing::frob_diff;

SymMat scalar(double v) { return SymMat::diagonal(std::span<const double>(&v, 1)); }

// Mean of the polynomial sum_m c[m] t^m over [a, b].
double poly_mean(const std::vector<double>& c, double a, double b) {
  double pa = 0.0, pb = 0.0;
  for (std::size_t m = 0; m < c.size(); ++m) {
    const double e = static_cast<double>(m + 1);
    pa += c[m] * std::pow(a, e) / e;
    pb += c[m] * std::pow(b, e) / e;
  }
  return (pb - pa) / (b - a);
}

TEST(PredictionWeights, Table) {
  EXPECT_TRUE(prediction_weights(0).empty());
  EXPECT_EQ(hardcoded_weights(1), (std::vector<Rational>{{-1, 8}}));
  EXPECT_EQ(hardcoded_weights(2), (std::vector<Rational>{{-22, 128}, {3, 128}}));
  EXPECT_EQ(hardcoded_weights(3), (std::vector<Rational>{{-201, 1024}, {44, 1024}, {-5, 1024}}));
  EXPECT_EQ(prediction_weights(1), (std::vector<double>{-0.125}));
  EXPECT_THROW(prediction_weights(-1), InvalidArgument);
}

TEST(PredictionWeights, NevilleDerivationAgrees) {
  EXPECT_TRUE(derive_weights_neville(0).empty());
  for (int L = 1; L <= 3; ++L) {
    const auto table = prediction_weights(L);
    const auto derived = derive_weights_neville(L);
    ASSERT_EQ(derived.size(), table.size());
    for (int i = 0; i < L; ++i) EXPECT_NEAR(derived[i], table[i], 1e-12) << "L=" << L << " i=" << i;
  }
}

TEST(PredictionWeights, HigherOrdersComeFromNeville) {
  const auto w = prediction_weights(4);
  ASSERT_EQ(w.size(), 4u);
  EXPECT_EQ(w, derive_weights_neville(4));
  EXPECT_THROW(derive_weights_neville(-2), InvalidArgument);
}

TEST(RefinementOrder, Shapes) {
  const auto o = RefinementOrder::from_N(5);
  EXPECT_EQ(o.L(), 2);
  EXPECT_EQ(o.N(), 5);
  ASSERT_EQ(o.even_filter().size(), 5u);
  EXPECT_EQ(o.even_filter()[2], 1.0);
  EXPECT_EQ(o.even_filter()[0], -3.0 / 128.0);
  EXPECT_EQ(o.even_filter()[1], 22.0 / 128.0);
  EXPECT_EQ(o.even_filter()[3], -22.0 / 128.0);
  EXPECT_EQ(o.even_filter()[4], 3.0 / 128.0);
  EXPECT_THROW(RefinementOrder::from_N(4), InvalidArgument);
  EXPECT_THROW(RefinementOrder::from_N(-1), InvalidArgument);
}

TEST(PredictPair, Examples) {
  const SymMat a = testing::sym2(1, 2, 3);
  for (int L = 0; L <= 3; ++L) {
    const std::vector<SymMat> window(2 * L + 1, a);
    const auto p = predict_pair(window, RefinementOrder(L));
    EXPECT_LT(frob_diff(p.even, a), 1e-14);
    EXPECT_LT(frob_diff(p.odd, a), 1e-14);
  }
  const std::vector<SymMat> w1{scalar(0), scalar(8), scalar(16)};
  const auto p1 = predict_pair(w1, RefinementOrder(1));
  EXPECT_NEAR(p1.even(0, 0), 6.0, 1e-14);
  EXPECT_NEAR(p1.odd(0, 0), 10.0, 1e-14);
  const std::vector<SymMat> w2{scalar(0), scalar(1), scalar(2)};
  const auto p2 = predict_pair(w2, RefinementOrder(1));
  EXPECT_NEAR(p2.even(0, 0), 0.75, 1e-15);
  EXPECT_NEAR(p2.odd(0, 0), 1.25, 1e-15);
  EXPECT_THROW(predict_pair(w2, RefinementOrder(2)), InvalidArgument);
}

TEST(PredictPair, MidpointAndMirrorProperties) {
  RngStream rng(21, {1});
  for (int trial = 0; trial < 200; ++trial) {
    const int L = trial % 4;
    const std::size_t d = 1 + trial % 3;
    std::vector<SymMat> w;
    for (int i = 0; i < 2 * L + 1; ++i) w.push_back(testing::random_sym(rng, d, 2.0));
    const auto p = predict_pair(w, RefinementOrder(L));
    SymMat mid = p.even + p.odd;
    mid *= 0.5;
    EXPECT_LT(frob_diff(mid, w[L]), 1e-14);
    std::reverse(w.begin(), w.end());
    const auto r = predict_pair(w, RefinementOrder(L));
    EXPECT_LT(frob_diff(r.even, p.odd), 1e-13);
    EXPECT_LT(frob_diff(r.odd, p.even), 1e-13);
  }
}

TEST(PredictPair, PolynomialExactnessProperty) {
  RngStream rng(23, {2});
  for (int trial = 0; trial < 200; ++trial) {
    const int L = trial % 4;
    const int N = 2 * L + 1;
    const std::size_t d = 1 + trial % 3;
    const std::size_t q = tri_size(d);
    // One random polynomial of degree N-1 per upper-triangle entry, on [0, N].
    std::vector<std::vector<double>> coef(q, std::vector<double>(N));
    for (auto& c : coef)
      for (auto& v : c) v = 2.0 * rng.uniform() - 1.0;
    auto averaged = [&](double a, double b) {
      std::vector<double> u(q);
      for (std::size_t e = 0; e < q; ++e) u[e] = poly_mean(coef[e], a, b);
      return SymMat::from_upper(d, u);
    };
    std::vector<SymMat> window;
    for (int i = 0; i < N; ++i) window.push_back(averaged(i, i + 1));
    const auto p = predict_pair(window, RefinementOrder(L));
    EXPECT_LT(frob_diff(p.even, averaged(L, L + 0.5)), 1e-9) << "L=" << L;
    EXPECT_LT(frob_diff(p.odd, averaged(L + 0.5, L + 1)), 1e-9) << "L=" << L;
  }
}

TEST(PredictPair, AgreesWithIntrinsicNevilleScheme) {
  RngStream rng(29, {3});
  for (int trial = 0; trial < 120; ++trial) {
    const int L = trial % 4;
    const std::size_t d = 1 + trial % 3;
    const auto spd = testing::random_spd_sequence(rng, 2 * L + 1, d, 1.5);
    std::vector<SymMat> logs;
    for (const auto& s : spd) logs.push_back(mat_log(s));
    const auto fast = predict_pair(logs, RefinementOrder(L));
    const auto [even, odd] = predict_pair_intrinsic(spd, RefinementOrder(L));
    EXPECT_LT(frob_diff(mat_log(even), fast.even), 1e-9);
    EXPECT_LT(frob_diff(mat_log(odd), fast.odd), 1e-9);
  }
}

TEST(NevilleInterpolate, Examples) {
  RngStream rng(31, {4});
  const SpdMat s = testing::random_spd(rng, 2);
  const NevilleNode one[] = {{0.0, s}};
  EXPECT_LT(frob_diff(neville_interpolate(one, 3.7), s), 1e-12);

  const SpdMat s2 = testing::random_spd(rng, 2);
  const NevilleNode two[] = {{0.0, s}, {1.0, s2}};
  EXPECT_LT(frob_diff(neville_interpolate(two, 0.5), geodesic(0.5, s, s2)), 1e-12);

  const double e = std::numbers::e;
  const double v[] = {1.0, e, std::pow(e, 4)};
  const NevilleNode quad[] = {{0.0, SpdMat(SymMat::diagonal(std::span(&v[0], 1)))},
                              {1.0, SpdMat(SymMat::diagonal(std::span(&v[1], 1)))},
                              {2.0, SpdMat(SymMat::diagonal(std::span(&v[2], 1)))}};
  EXPECT_NEAR(std::log(neville_interpolate(quad, 3.0)(0, 0)), 9.0, 1e-12);

  const NevilleNode dup[] = {{0.0, s}, {0.0, s2}};
  EXPECT_THROW(neville_interpolate(dup, 0.5), InvalidArgument);
}

TEST(NevilleInterpolate, ReproducesNodes) {
  RngStream rng(37, {5});
  std::vector<NevilleNode> nodes;
  for (int i = 0; i < 5; ++i) nodes.push_back({0.5 * i, testing::random_spd(rng, 3, 1.0)});
  for (const auto& n : nodes) EXPECT_LT(frob_diff(neville_interpolate(nodes, n.x), n.value), 1e-10);
}

TEST(Transition, ThreeByThreeBands) {
  const auto t = build_transition(RefinementOrder(1));
  ASSERT_EQ(t.E.rows(), 5u);
  const Matrix expected_e = Matrix::from_rows(5, 5, {
      0.125, 1, -0.125, 0, 0,
      -0.125, 1, 0.125, 0, 0,
      0, 0.125, 1, -0.125, 0,
      0, -0.125, 1, 0.125, 0,
      0, 0, 0.125, 1, -0.125});
  EXPECT_LT(max_abs_diff(t.E, expected_e), 1e-15);
  for (std::size_t r = 0; r < 5; ++r) {
    EXPECT_NEAR(t.E_inf(r, 0) * 12.0, -1.0, 1e-10);
    EXPECT_NEAR(t.E_inf(r, 1) * 12.0, 7.0, 1e-10);
    EXPECT_NEAR(t.E_inf(r, 2) * 12.0, 7.0, 1e-10);
    EXPECT_NEAR(t.E_inf(r, 3) * 12.0, -1.0, 1e-10);
    EXPECT_NEAR(t.E_inf(r, 4), 0.0, 1e-10);
  }
  EXPECT_LT(t.iterations, 60);
}

TEST(Transition, OrderOne) {
  const auto t = build_transition(RefinementOrder(0));
  EXPECT_EQ(t.E.rows(), 1u);
  EXPECT_EQ(t.E(0, 0), 1.0);
  EXPECT_EQ(t.E_inf(0, 0), 1.0);
  EXPECT_EQ(t.kappa, 1.0);
}

TEST(Transition, StructuralInvariants) {
  for (int L = 0; L <= 4; ++L) {
    const auto t = build_transition(RefinementOrder(L));
    const std::size_t n = t.E.rows();
    for (std::size_t r = 0; r < n; ++r) {
      double se = 0.0, so = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        se += t.E(r, c);
        so += t.O(r, c);
        EXPECT_NEAR(t.O(r, c), t.E(n - 1 - r, n - 1 - c), 1e-15);
        EXPECT_NEAR(t.E_inf(r, c), t.E_inf(0, c), 1e-12);
      }
      EXPECT_NEAR(se, 1.0, 1e-14);
      EXPECT_NEAR(so, 1.0, 1e-14);
    }
  }
}

TEST(Kappa, GoldenValues) {
  EXPECT_NEAR(kappa(1), 1.0, 1e-12);
  EXPECT_NEAR(kappa(3), 25.0 / 36.0, 1e-12);
  EXPECT_NEAR(kappa(5), 168549.0 / 213160.0, 1e-12);
  EXPECT_NEAR(kappa(7), 107721892723.0 / 126282847320.0, 1e-12);
  EXPECT_THROW(kappa(4), InvalidArgument);
}

TEST(Transition, ProductWeightLowerBoundProperty) {
  RngStream rng(41, {6});
  for (int L = 0; L <= 3; ++L) {
    const auto t = build_transition(RefinementOrder(L));
    const double bound = 1.0 / (2.0 * t.order.N() + 3.0) - 1e-12;
    for (int trial = 0; trial < 100; ++trial) {
      const int len = 1 + static_cast<int>(rng.uniform() * 20);
      Matrix p = Matrix::identity(t.E.rows());
      for (int f = 0; f < len; ++f) p = p * (rng.uniform() < 0.5 ? t.E : t.O);
      for (std::size_t r = 0; r < p.rows(); ++r) {
        double s = 0.0;
        for (double v : p.row(r)) s += v * v;
        EXPECT_GE(s, bound) << "L=" << L << " len=" << len << " row=" << r;
      }
    }
  }
}

}  // namespace
}  // namespace spdwave
