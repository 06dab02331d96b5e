// Copyright 2026 The spdwave Authors.
// SPDX-License-Identifier: Apache-2.0

// Midpoint pyramid and the intrinsic AI wavelet transform.
//
// Scale j holds 2^j midpoints; M_{j,k} is the geodesic midpoint of
// M_{j+1,2k} and M_{j+1,2k+1}. The wavelet coefficient of scale j >= 1 at
// k = 0..2^{j-1}-1 is the whitened residual of the odd child,
//
//   D_{j,k} = 2^{-j/2} (log M_{j,2k+1} - log M~_{j,2k+1}),
//
// where M~ is predicted from scale j-1. Prediction windows that overhang the
// ends of scale j-1 are completed by reflection (k' < 0 -> -k'-1,
// k' >= n -> 2n-1-k'), identically in both directions of the transform.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spdwave/errors.hpp"
#include "spdwave/refinement.hpp"
#include "spdwave/spd_core.hpp"

namespace spdwave {

using LogSequence = std::vector<SymMat>;

/// J such that n == 2^J; throws for n that is not a positive power of two.
inline int dyadic_scale(std::size_t n) {
  if (n == 0 || (n & (n - 1)) != 0)
    throw InvalidArgument("sequence length " + std::to_string(n) + " is not a power of two");
  int J = 0;
  while ((std::size_t{1} << J) < n) ++J;
  return J;
}

/// Index into [0, n) of the symmetric (half-sample) extension.
inline std::size_t reflect_index(long long k, long long n) {
  const long long period = 2 * n;
  long long m = k % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < n ? m : period - 1 - m);
}

inline LogSequence to_log(std::span<const SpdMat> xs) {
  LogSequence out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(mat_log(x));
  return out;
}

inline std::vector<SpdMat> to_spd(std::span<const SymMat> logs) {
  std::vector<SpdMat> out;
  out.reserve(logs.size());
  for (const auto& a : logs) out.push_back(mat_exp(a));
  return out;
}

namespace detail {

inline void check_dims(std::span<const SymMat> xs) {
  for (const auto& x : xs)
    if (x.dim() != xs.front().dim()) throw DimensionMismatch("sequence has mixed dimensions");
}

/// Even/odd children of coarse[k] with reflected windows.
inline PredictedPair predict_at(const LogSequence& coarse, std::size_t k,
                                const RefinementOrder& order) {
  const auto filter = order.even_filter();
  const long long n = static_cast<long long>(coarse.size());
  const long long L = order.L();
  SymMat even(coarse[k].dim());
  for (long long i = 0; i <= 2 * L; ++i)
    even.axpy(filter[i], coarse[reflect_index(static_cast<long long>(k) - L + i, n)]);
  SymMat odd = 2.0 * coarse[k];
  odd -= even;
  return {std::move(even), std::move(odd)};
}

}  // namespace detail

/// Log-domain midpoint pyramid; levels[j] has 2^j entries, levels[J] is the input.
inline std::vector<LogSequence> log_pyramid(std::span<const SymMat> finest) {
  const int J = dyadic_scale(finest.size());
  detail::check_dims(finest);
  std::vector<LogSequence> levels(J + 1);
  levels[J].assign(finest.begin(), finest.end());
  for (int j = J - 1; j >= 0; --j) {
    const auto& fine = levels[j + 1];
    auto& coarse = levels[j];
    coarse.reserve(fine.size() / 2);
    for (std::size_t k = 0; k < fine.size() / 2; ++k) {
      SymMat m = fine[2 * k] + fine[2 * k + 1];
      m *= 0.5;
      coarse.push_back(std::move(m));
    }
  }
  return levels;
}

struct MidpointPyramid {
  int J = 0;
  std::vector<std::vector<SpdMat>> levels;
};

inline MidpointPyramid build_pyramid(std::span<const SpdMat> finest) {
  const auto logs = log_pyramid(to_log(finest));
  MidpointPyramid p;
  p.J = static_cast<int>(logs.size()) - 1;
  for (int j = 0; j < p.J; ++j) p.levels.push_back(to_spd(logs[j]));
  p.levels.emplace_back(finest.begin(), finest.end());
  return p;
}

/// Coarsest log-midpoint plus whitened coefficients; coeffs[j-1] is scale j.
struct LogWaveletPyramid {
  int J = 0;
  SymMat coarsest;
  std::vector<LogSequence> coeffs;

  const LogSequence& scale(int j) const { return coeffs.at(j - 1); }
  LogSequence& scale(int j) { return coeffs.at(j - 1); }
};

inline LogWaveletPyramid forward_transform_log(std::span<const SymMat> finest,
                                               const RefinementOrder& order) {
  const auto levels = log_pyramid(finest);
  LogWaveletPyramid w;
  w.J = static_cast<int>(levels.size()) - 1;
  w.coarsest = levels[0][0];
  w.coeffs.resize(w.J);
  for (int j = 1; j <= w.J; ++j) {
    const auto& coarse = levels[j - 1];
    const auto& fine = levels[j];
    const double whiten = std::pow(2.0, -0.5 * j);
    auto& d = w.scale(j);
    d.reserve(coarse.size());
    for (std::size_t k = 0; k < coarse.size(); ++k) {
      SymMat diff = fine[2 * k + 1] - detail::predict_at(coarse, k, order).odd;
      diff *= whiten;
      d.push_back(std::move(diff));
    }
  }
  return w;
}

inline void validate_shape(const LogWaveletPyramid& w) {
  if (w.J < 0 || static_cast<int>(w.coeffs.size()) != w.J)
    throw InvalidArgument("wavelet pyramid: expected one coefficient scale per level");
  const std::size_t d = w.coarsest.dim();
  if (d == 0) throw InvalidArgument("wavelet pyramid: empty coarsest midpoint");
  for (int j = 1; j <= w.J; ++j) {
    const auto& s = w.scale(j);
    if (s.size() != (std::size_t{1} << (j - 1)))
      throw InvalidArgument("wavelet pyramid: scale " + std::to_string(j) + " has " +
                            std::to_string(s.size()) + " coefficients, expected " +
                            std::to_string(std::size_t{1} << (j - 1)));
    for (const auto& c : s)
      if (c.dim() != d) throw DimensionMismatch("wavelet pyramid: coefficient dimension mismatch");
  }
}

inline LogSequence backward_transform_log(const LogWaveletPyramid& w,
                                          const RefinementOrder& order) {
  validate_shape(w);
  LogSequence current{w.coarsest};
  for (int j = 1; j <= w.J; ++j) {
    const auto& d = w.scale(j);
    const double unwhiten = std::pow(2.0, 0.5 * j);
    LogSequence next;
    next.reserve(2 * current.size());
    for (std::size_t k = 0; k < current.size(); ++k) {
      SymMat odd = detail::predict_at(current, k, order).odd;
      odd.axpy(unwhiten, d[k]);
      SymMat even = 2.0 * current[k];
      even -= odd;
      next.push_back(std::move(even));
      next.push_back(std::move(odd));
    }
    current = std::move(next);
  }
  return current;
}

struct WaveletPyramid {
  int J = 0;
  SpdMat coarsest = SpdMat::identity(1);
  std::vector<std::vector<SymMat>> coeffs;  // coeffs[j-1] holds scale j
  RefinementOrder order;

  const std::vector<SymMat>& scale(int j) const { return coeffs.at(j - 1); }
};

inline WaveletPyramid forward_transform(std::span<const SpdMat> finest,
                                        const RefinementOrder& order) {
  auto w = forward_transform_log(to_log(finest), order);
  return {w.J, mat_exp(w.coarsest), std::move(w.coeffs), order};
}

inline std::vector<SpdMat> backward_transform(const WaveletPyramid& p) {
  const LogWaveletPyramid w{p.J, mat_log(p.coarsest), p.coeffs};
  return to_spd(backward_transform_log(w, p.order));
}

/// Zeroes every coefficient of scale j > J0 in place.
inline void threshold_above(LogWaveletPyramid& w, int J0) {
  if (J0 < 0 || J0 > w.J)
    throw InvalidArgument("smoothing scale J0=" + std::to_string(J0) + " outside [0, " +
                          std::to_string(w.J) + "]");
  for (int j = J0 + 1; j <= w.J; ++j)
    for (auto& c : w.scale(j)) c = SymMat(c.dim());
}

namespace detail {

/// Scalar channel of the linear estimator: midpoints down to scale J0, then
/// the prediction cascade back up to scale J.
inline void smooth_channel(std::vector<double>& x, int J, int J0, const RefinementOrder& order,
                           std::vector<double>& scratch) {
  std::size_t n = x.size();
  for (int j = J; j > J0; --j) {
    n /= 2;
    for (std::size_t k = 0; k < n; ++k) x[k] = 0.5 * (x[2 * k] + x[2 * k + 1]);
  }
  const auto filter = order.even_filter();
  const long long L = order.L();
  for (int j = J0; j < J; ++j) {
    scratch.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
    const long long nn = static_cast<long long>(n);
    for (long long k = 0; k < nn; ++k) {
      double even = 0.0;
      if (k >= L && k + L < nn) {
        for (long long i = 0; i <= 2 * L; ++i) even += filter[i] * scratch[k - L + i];
      } else {
        for (long long i = 0; i <= 2 * L; ++i) even += filter[i] * scratch[reflect_index(k - L + i, nn)];
      }
      x[2 * k] = even;
      x[2 * k + 1] = 2.0 * scratch[k] - even;
    }
    n *= 2;
  }
}

}  // namespace detail

/// Linear wavelet estimator: keeps the midpoints of scale J0 and replaces all
/// finer detail by the order-N refinement cascade. J0 == J returns the data.
/// Equivalent to forward_transform_log, threshold_above and
/// backward_transform_log, evaluated entry by entry.
inline LogSequence linear_estimate_log(std::span<const SymMat> data, int J0,
                                       const RefinementOrder& order) {
  const int J = dyadic_scale(data.size());
  detail::check_dims(data);
  if (J0 < 0 || J0 > J)
    throw InvalidArgument("smoothing scale J0=" + std::to_string(J0) + " outside [0, " +
                          std::to_string(J) + "]");
  const std::size_t n = data.size();
  const std::size_t d = data.front().dim();
  const std::size_t q = tri_size(d);
  std::vector<std::vector<double>> channels(q, std::vector<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto u = data[k].upper();
    for (std::size_t c = 0; c < q; ++c) channels[c][k] = u[c];
  }
  std::vector<double> scratch;
  for (auto& ch : channels) detail::smooth_channel(ch, J, J0, order, scratch);
  LogSequence out;
  out.reserve(n);
  std::vector<double> u(q);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < q; ++c) u[c] = channels[c][k];
    out.push_back(SymMat::from_upper(d, u));
  }
  return out;
}

inline std::vector<SpdMat> linear_estimate(std::span<const SpdMat> data, int J0,
                                           const RefinementOrder& order) {
  const int J = dyadic_scale(data.size());
  if (J0 < 0 || J0 > J)
    throw InvalidArgument("linear_estimate: J0=" + std::to_string(J0) + " outside [0, " +
                          std::to_string(J) + "]");
  if (J0 == J) return {data.begin(), data.end()};
  return to_spd(linear_estimate_log(to_log(data), J0, order));
}

}  // namespace spdwave
