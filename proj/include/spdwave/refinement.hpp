// Copyright 2026 The spdwave Authors.
// SPDX-License-Identifier: Apache-2.0

// Intrinsic average-interpolation (AI) refinement of order N = 2L + 1.
//
// Given 2L+1 consecutive midpoints M_{k-L..k+L} on one scale, the two
// children of M_k on the next finer scale are predicted as the interval means
// of the unique intrinsic polynomial of degree N-1 with those midpoints. In the
// log domain this is a fixed linear filter:
//
//   log M~_{2k}   = sum_i (-c_L..-c_1, 1, c_1..c_L)_i log M_{k-L+i}
//   log M~_{2k+1} = 2 log M_k - log M~_{2k}
//
// The generic Neville route is kept alongside the filter as an oracle.

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spdwave/errors.hpp"
#include "spdwave/linalg.hpp"
#include "spdwave/spd_core.hpp"

namespace spdwave {

struct Rational {
  long long num;
  long long den;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

/// Exact prediction weights (c_1, ..., c_L) for L <= 3.
inline std::vector<Rational> hardcoded_weights(int L) {
  switch (L) {
    case 0: return {};
    case 1: return {{-1, 8}};
    case 2: return {{-22, 128}, {3, 128}};
    case 3: return {{-201, 1024}, {44, 1024}, {-5, 1024}};
    default: throw InvalidArgument("hardcoded_weights: only L <= 3 is tabulated");
  }
}

/// Neville's scheme for values that form a vector space (double, SymMat).
/// Abscissae must be strictly increasing.
template <class V>
V neville_eval(std::span<const double> xs, std::span<const V> ys, double x) {
  if (xs.empty() || xs.size() != ys.size())
    throw InvalidArgument("neville_eval: need matching, non-empty node lists");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw InvalidArgument("neville_eval: abscissae must be strictly increasing");
  std::vector<V> p(ys.begin(), ys.end());
  const std::size_t n = xs.size();
  for (std::size_t len = 1; len < n; ++len) {
    for (std::size_t i = 0; i + len < n; ++i) {
      const std::size_t j = i + len;
      const double h = xs[j] - xs[i];
      p[i] = ((xs[j] - x) / h) * p[i] + ((x - xs[i]) / h) * p[i + 1];
    }
  }
  return p[0];
}

struct NevilleNode {
  double x;
  SpdMat value;
};

/// Intrinsic (log-Euclidean) polynomial interpolation through the nodes.
inline SpdMat neville_interpolate(std::span<const NevilleNode> nodes, double x) {
  if (nodes.empty()) throw InvalidArgument("neville_interpolate: no nodes");
  std::vector<double> xs;
  std::vector<SymMat> logs;
  xs.reserve(nodes.size());
  logs.reserve(nodes.size());
  for (const auto& n : nodes) {
    if (n.value.dim() != nodes.front().value.dim())
      throw DimensionMismatch("neville_interpolate: dimension mismatch");
    xs.push_back(n.x);
    logs.push_back(mat_log(n.value));
  }
  return mat_exp(neville_eval<SymMat>(xs, logs, x));
}

/// Runs the scalar AI construction on Kronecker-delta log-midpoints and
/// reads off (c_1, ..., c_L). Window positions are measured in units of the
/// coarse interval, with the window's left end at 0.
inline std::vector<double> derive_weights_neville(int L) {
  if (L < 0) throw InvalidArgument("derive_weights_neville: L must be nonnegative");
  const int n = 2 * L + 1;
  std::vector<double> xs(n);
  for (int l = 0; l < n; ++l) xs[l] = l + 1.0;

  std::vector<double> even(n);
  for (int basis = 0; basis < n; ++basis) {
    std::vector<double> cumulative(n);
    double sum = 0.0;
    for (int l = 0; l < n; ++l) {
      sum += (l == basis) ? 1.0 : 0.0;
      cumulative[l] = sum / (l + 1);
    }
    // Mean over [0, L + 1/2] interpolated as a polynomial in the right end.
    const double pi = neville_eval<double>(xs, cumulative, L + 0.5);
    // Mean over [0, L + 1/2] = (2L/(2L+1)) * mean over [0, L] + (1/(2L+1)) * even child.
    even[basis] = L == 0 ? pi : (2.0 * L + 1.0) * pi - 2.0 * L * cumulative[L - 1];
  }
  return {even.begin() + L + 1, even.end()};
}

namespace detail {

inline std::vector<double> cached_neville_weights(int L) {
  static std::mutex mu;
  static std::map<int, std::vector<double>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(L);
  if (it == cache.end()) it = cache.emplace(L, derive_weights_neville(L)).first;
  return it->second;
}

}  // namespace detail

/// (c_1, ..., c_L). Tabulated rationals for L <= 3, Neville-derived beyond.
inline std::vector<double> prediction_weights(int L) {
  if (L < 0) throw InvalidArgument("prediction_weights: L must be nonnegative");
  if (L <= 3) {
    std::vector<double> out;
    for (const auto& r : hardcoded_weights(L)) out.push_back(r.value());
    return out;
  }
  return detail::cached_neville_weights(L);
}

class RefinementOrder {
 public:
  explicit RefinementOrder(int L = 0) : L_(L), weights_(prediction_weights(L)) {
    even_.reserve(2 * L + 1);
    for (int i = L; i >= 1; --i) even_.push_back(-weights_[i - 1]);
    even_.push_back(1.0);
    for (int i = 1; i <= L; ++i) even_.push_back(weights_[i - 1]);
  }

  static RefinementOrder from_N(int N) {
    if (N < 1 || N % 2 == 0)
      throw InvalidArgument("RefinementOrder: N must be a positive odd integer, got " +
                            std::to_string(N));
    return RefinementOrder((N - 1) / 2);
  }

  int L() const noexcept { return L_; }
  int N() const noexcept { return 2 * L_ + 1; }
  std::span<const double> weights() const noexcept { return weights_; }
  /// Filter producing the even child from the 2L+1 window.
  std::span<const double> even_filter() const noexcept { return even_; }

  bool operator==(const RefinementOrder& o) const { return L_ == o.L_; }

 private:
  int L_;
  std::vector<double> weights_;
  std::vector<double> even_;
};

struct PredictedPair {
  SymMat even;
  SymMat odd;
};

/// Fast log-domain prediction of the children of the window's centre.
inline PredictedPair predict_pair(std::span<const SymMat> window, const RefinementOrder& order) {
  const auto filter = order.even_filter();
  if (window.size() != filter.size())
    throw InvalidArgument("predict_pair: window length " + std::to_string(window.size()) +
                          " does not match 2L+1 = " + std::to_string(filter.size()));
  SymMat even = weighted_sum(window, filter);
  SymMat odd = 2.0 * window[order.L()];
  odd -= even;
  return {std::move(even), std::move(odd)};
}

/// Same prediction through cumulative intrinsic means and Neville
/// interpolation on Sym+(d); slow, used to cross-check predict_pair.
inline std::pair<SpdMat, SpdMat> predict_pair_intrinsic(std::span<const SpdMat> window,
                                                        const RefinementOrder& order) {
  const int L = order.L();
  const int n = order.N();
  if (static_cast<int>(window.size()) != n)
    throw InvalidArgument("predict_pair_intrinsic: window length does not match 2L+1");
  std::vector<NevilleNode> nodes;
  std::vector<SpdMat> cumulative;
  for (int l = 1; l <= n; ++l) {
    std::vector<double> w(l, 1.0 / l);
    w.back() = 1.0 - (l - 1) * (1.0 / l);
    cumulative.push_back(weighted_ave(window.subspan(0, l), w));
    nodes.push_back({static_cast<double>(l), cumulative.back()});
  }
  const SpdMat pi = neville_interpolate(nodes, L + 0.5);
  SpdMat even = L == 0 ? pi : geodesic(-2.0 * L, pi, cumulative[L - 1]);
  SpdMat odd = mat_exp(2.0 * mat_log(window[L]) - mat_log(even));
  return {std::move(even), std::move(odd)};
}

/// Band matrices mapping a (4L+1)-window of log-midpoints to the 4L+1 predicted
/// children centred on an even (E) or odd (O) fine index, with the limit of E^m.
struct TransitionMatrices {
  RefinementOrder order;
  Matrix E;
  Matrix O;
  Matrix E_inf;
  double kappa = 0.0;
  int iterations = 0;
};

inline constexpr int kTransitionMaxIterations = 200;
inline constexpr double kTransitionTolerance = 1e-13;

inline TransitionMatrices build_transition(const RefinementOrder& order) {
  const int L = order.L();
  const std::size_t n = 4 * L + 1;
  const auto even = order.even_filter();
  std::vector<double> odd(even.size());
  for (std::size_t i = 0; i < even.size(); ++i)
    odd[i] = (static_cast<int>(i) == L ? 2.0 : 0.0) - even[i];

  auto fill = [&](std::size_t parity_shift) {
    Matrix m(n, n);
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t fine = r + parity_shift;
      const std::size_t first_col = fine / 2;
      const std::span<const double> w = (fine % 2 == 0) ? even : std::span<const double>(odd);
      for (std::size_t c = 0; c < w.size(); ++c) m(r, first_col + c) = w[c];
    }
    return m;
  };

  TransitionMatrices t{order, fill(0), fill(1), Matrix(), 0.0, 0};
  Matrix power = t.E;
  for (int m = 1;; ++m) {
    if (m > kTransitionMaxIterations)
      throw NumericalFailure("build_transition: E^m did not converge within 200 iterations",
                             {t.E.values().begin(), t.E.values().end()});
    Matrix next = power * t.E;
    const double diff = max_abs_diff(next, power);
    power = std::move(next);
    if (diff < kTransitionTolerance) {
      t.iterations = m + 1;
      break;
    }
  }
  t.E_inf = std::move(power);
  for (double v : t.E_inf.row(0)) t.kappa += v * v;
  return t;
}

/// Variance factor of the lifted estimator at level-J0 grid points.
inline double kappa(int N) { return build_transition(RefinementOrder::from_N(N)).kappa; }

}  // namespace spdwave
