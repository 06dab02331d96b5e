// Copyright 2026 The spdwave Authors.
// SPDX-License-Identifier: Apache-2.0

// Log-noise covariance model, chi-square quantiles, confidence sets and their
// Monte Carlo volumes.
//
// A confidence set lives in log coordinates: the asymptotic set is the
// ellipsoid
//
//   2^{J-J0} / kappa_N * (eta(log M^) - eta(log S))^T C~^{-1} (...) <= chi2_{q,1-alpha}
//
// and the bootstrap set is a log-Euclidean ball. Both are closed.
//
// Significance convention: every `alpha` in this header is the significance
// level, so a set built with alpha = 0.1 has nominal coverage 0.9.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "spdwave/errors.hpp"
#include "spdwave/linalg.hpp"
#include "spdwave/refinement.hpp"
#include "spdwave/rng.hpp"
#include "spdwave/spd_core.hpp"

namespace spdwave {

// ---------------------------------------------------------------------------
// Regularized incomplete gamma and chi-square quantiles.

namespace detail {

inline constexpr int kGammaMaxIterations = 10000;
inline constexpr double kGammaEps = 1e-16;

inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kGammaMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
inline double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kGammaMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kGammaEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// P(a, x) = gamma(a, x) / Gamma(a).
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw InvalidArgument("regularized_gamma_p: a must be positive");
  if (std::isnan(x)) throw InvalidArgument("regularized_gamma_p: x is NaN");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? detail::gamma_p_series(a, x) : 1.0 - detail::gamma_q_fraction(a, x);
}

inline double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw InvalidArgument("regularized_gamma_q: a must be positive");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - detail::gamma_p_series(a, x) : detail::gamma_q_fraction(a, x);
}

inline double chi2_cdf(int dof, double x) {
  if (dof < 1) throw InvalidArgument("chi2_cdf: dof must be positive");
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

inline double chi2_pdf(int dof, double x) {
  if (dof < 1) throw InvalidArgument("chi2_pdf: dof must be positive");
  if (x < 0.0) return 0.0;
  if (x == 0.0) return dof == 1 ? std::numeric_limits<double>::infinity() : (dof == 2 ? 0.5 : 0.0);
  const double k = 0.5 * dof;
  return std::exp((k - 1.0) * std::log(x) - 0.5 * x - k * std::numbers::ln2 - std::lgamma(k));
}

/// x with chi2_cdf(dof, x) == p. Bracketing bisection with Newton steps.
inline double chi2_quantile(int dof, double p) {
  if (dof < 1) throw InvalidArgument("chi2_quantile: dof must be positive");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("chi2_quantile: p must lie in (0, 1)");
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * dof);
  while (chi2_cdf(dof, hi) < p) {
    lo = hi;
    hi *= 2.0;
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = chi2_cdf(dof, x) - p;
    if (f == 0.0) return x;
    (f < 0.0 ? lo : hi) = x;
    const double pdf = chi2_pdf(dof, x);
    double next = pdf > 0.0 ? x - f / pdf : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-12 * std::max(1.0, x) || hi - lo <= 1e-15 * hi) return next;
    x = next;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Covariance operator.

namespace detail {

/// Position of the (i, j) entry in eta coordinates, and the factor relating
/// the eta coordinate to the matrix entry (1 on the diagonal, sqrt 2 off it).
inline std::size_t eta_index(std::size_t d, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  if (i == j) return i;
  std::size_t pos = d;
  for (std::size_t r = 0; r < i; ++r) pos += d - r - 1;
  return pos + (j - i - 1);
}

inline double eta_factor(std::size_t i, std::size_t j) { return i == j ? 1.0 : std::sqrt(2.0); }

inline SymMat symmetric_from_matrix(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) throw DimensionMismatch(std::string(who) + ": matrix is not square");
  SymMat s(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j) {
      const double a = m(i, j), b = m(j, i);
      if (!std::isfinite(a) || std::abs(a - b) > 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}))
        throw InvalidArgument(std::string(who) + ": matrix is not symmetric and finite");
      s.at(i, j) = 0.5 * (a + b);
    }
  return s;
}

}  // namespace detail

/// Covariance of the log-noise, sigma_{ijnm} = Cov(xi_ij, xi_nm), held as the
/// q x q matrix C~ of eta(xi). Positive semi-definiteness is checked; a
/// singular C~ is representable (zero noise) but cannot build an ellipsoid.
class CovTensor {
 public:
  static CovTensor from_eta_matrix(const Matrix& c) {
    const SymMat s = detail::symmetric_from_matrix(c, "CovTensor");
    const auto d = tri_root(s.dim());
    if (!d || *d == 0) throw DimensionMismatch("CovTensor: size is not d(d+1)/2");
    return CovTensor(*d, s);
  }

  /// Independent Gaussian entries with standard deviations sd(i, j):
  /// C~ = diag(sd_11^2, ..., sd_dd^2, 2 sd_12^2, ...).
  static CovTensor independent_entries(const SymMat& sd) {
    const std::size_t d = sd.dim();
    Matrix c(tri_size(d), tri_size(d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        if (!(sd(i, j) >= 0.0)) throw InvalidArgument("CovTensor: negative standard deviation");
        const std::size_t a = detail::eta_index(d, i, j);
        const double f = detail::eta_factor(i, j);
        c(a, a) = f * f * sd(i, j) * sd(i, j);
      }
    return from_eta_matrix(c);
  }

  static CovTensor independent_entries(double sd11, double sd22, double sd12) {
    const double upper[] = {sd11, sd12, sd22};
    return independent_entries(SymMat::from_upper(2, upper));
  }

  /// From any callable sigma(i, j, n, m) with the covariance symmetries.
  template <class F>
  static CovTensor from_coefficients(std::size_t d, F&& sigma) {
    const std::size_t q = tri_size(d);
    Matrix c(q, q);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j)
        for (std::size_t n = 0; n < d; ++n)
          for (std::size_t m = n; m < d; ++m) {
            const std::size_t a = detail::eta_index(d, i, j), b = detail::eta_index(d, n, m);
            c(a, b) = detail::eta_factor(i, j) * detail::eta_factor(n, m) * sigma(i, j, n, m);
          }
    return from_eta_matrix(c);
  }

  std::size_t dim() const noexcept { return d_; }
  std::size_t q() const noexcept { return c_.dim(); }
  Matrix eta_matrix() const { return c_.dense(); }
  const SymMat& eta_sym() const noexcept { return c_; }

  /// Cov(xi_ij, xi_nm).
  double sigma(std::size_t i, std::size_t j, std::size_t n, std::size_t m) const {
    if (std::max({i, j, n, m}) >= d_) throw InvalidArgument("CovTensor::sigma: index out of range");
    const std::size_t a = detail::eta_index(d_, i, j), b = detail::eta_index(d_, n, m);
    return c_(a, b) / (detail::eta_factor(i, j) * detail::eta_factor(n, m));
  }

  /// <eta A, C~ eta A>, the variance of <xi, A>_F.
  double quadratic(const SymMat& a) const {
    const auto x = eta_vec(a).values;
    const auto cx = c_.dense() * std::span<const double>(x);
    return dot(x, cx);
  }

  bool singular() const noexcept { return eig_.values.back() <= 1e-14 * eig_.values.front(); }

  /// C~^{-1}; throws for singular C~.
  Matrix inverse() const {
    if (singular()) throw InvalidArgument("CovTensor: covariance is singular");
    return spectral_map(eig_, [](double l) { return 1.0 / l; }).dense();
  }

  /// Symmetric square root, for sampling eta(xi) = C~^{1/2} z.
  Matrix sqrt() const {
    return spectral_map(eig_, [](double l) { return std::sqrt(std::max(l, 0.0)); }).dense();
  }

 private:
  CovTensor(std::size_t d, SymMat c) : d_(d), c_(std::move(c)), eig_(sym_eigen(c_)) {
    if (eig_.values.back() < -1e-12 * std::max(1.0, eig_.values.front()))
      throw NotPositiveDefinite("CovTensor: covariance has a negative eigenvalue");
  }

  std::size_t d_;
  SymMat c_;
  SymEigen eig_;
};

/// Unbiased sample covariance of eta(samples).
inline Matrix empirical_covariance_eta(std::span<const SymMat> samples) {
  if (samples.size() < 2) throw InvalidArgument("empirical_covariance_eta: need at least 2 samples");
  const std::size_t q = tri_size(samples.front().dim());
  std::vector<std::vector<double>> xs;
  xs.reserve(samples.size());
  std::vector<double> mean(q, 0.0);
  for (const auto& s : samples) {
    if (s.dim() != samples.front().dim())
      throw DimensionMismatch("empirical_covariance_eta: mixed dimensions");
    xs.push_back(eta_vec(s).values);
    for (std::size_t a = 0; a < q; ++a) mean[a] += xs.back()[a];
  }
  const double n = static_cast<double>(samples.size());
  for (double& m : mean) m /= n;
  Matrix c(q, q);
  for (const auto& x : xs)
    for (std::size_t a = 0; a < q; ++a)
      for (std::size_t b = 0; b < q; ++b) c(a, b) += (x[a] - mean[a]) * (x[b] - mean[b]);
  return (1.0 / (n - 1.0)) * c;
}

// ---------------------------------------------------------------------------
// Confidence sets.

namespace detail {

inline double cached_kappa(int N) {
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(N);
  if (it == cache.end()) it = cache.emplace(N, kappa(N)).first;
  return it->second;
}

inline void check_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument(std::string(who) + ": alpha must lie in (0, 1)");
}

}  // namespace detail

struct EllipsoidCS {
  SpdMat center;
  SymMat center_log;
  Matrix metric_matrix;  // scale * C~^{-1}
  double radius_sq = 0.0;
  double scale = 0.0;    // 2^{J-J0} / kappa_N
  double alpha = 0.0;
  int J = 0, J0 = 0, N = 1;
  double kappa = 1.0;

  /// Quadratic form of a log-domain candidate relative to the centre.
  double statistic_log(const SymMat& log_s) const {
    if (log_s.dim() != center_log.dim()) throw DimensionMismatch("EllipsoidCS: dimension mismatch");
    const auto x = eta_vec(center_log - log_s).values;
    return dot(x, metric_matrix * std::span<const double>(x));
  }
  bool contains_log(const SymMat& log_s) const { return statistic_log(log_s) <= radius_sq; }
  bool contains(const SpdMat& s) const { return contains_log(mat_log(s)); }
};

struct BallCS {
  SpdMat center;
  SymMat center_log;
  double radius = 0.0;

  BallCS(SpdMat c, double r) : center(std::move(c)), center_log(mat_log(center)), radius(r) {
    if (!(r >= 0.0)) throw InvalidArgument("BallCS: radius must be nonnegative");
  }
  BallCS(SpdMat c, SymMat c_log, double r)
      : center(std::move(c)), center_log(std::move(c_log)), radius(r) {
    if (!(r >= 0.0)) throw InvalidArgument("BallCS: radius must be nonnegative");
  }

  bool contains_log(const SymMat& log_s) const {
    if (log_s.dim() != center_log.dim()) throw DimensionMismatch("BallCS: dimension mismatch");
    return frobenius_norm(log_s - center_log) <= radius;
  }
  bool contains(const SpdMat& s) const { return contains_log(mat_log(s)); }
};

inline bool cs_contains(const EllipsoidCS& cs, const SpdMat& s) { return cs.contains(s); }
inline bool cs_contains(const BallCS& cs, const SpdMat& s) { return cs.contains(s); }

/// Asymptotic ellipsoid with an explicit variance factor kappa.
inline EllipsoidCS asymptotic_cs(const SpdMat& estimate, const SymMat& estimate_log,
                                 const CovTensor& cov, int J, int J0, int N, double alpha,
                                 double kappa_value) {
  detail::check_alpha(alpha, "asymptotic_cs");
  if (cov.dim() != estimate.dim()) throw DimensionMismatch("asymptotic_cs: covariance dimension");
  if (J0 < 0 || J0 > J) throw InvalidArgument("asymptotic_cs: need 0 <= J0 <= J");
  if (!(kappa_value > 0.0)) throw InvalidArgument("asymptotic_cs: kappa must be positive");
  const double scale = std::ldexp(1.0, J - J0) / kappa_value;
  EllipsoidCS cs{estimate, estimate_log, scale * cov.inverse(),
                 chi2_quantile(static_cast<int>(cov.q()), 1.0 - alpha),
                 scale, alpha, J, J0, N, kappa_value};
  return cs;
}

inline EllipsoidCS asymptotic_cs(const SpdMat& estimate, const CovTensor& cov, int J, int J0, int N,
                                 double alpha) {
  return asymptotic_cs(estimate, mat_log(estimate), cov, J, J0, N, alpha, detail::cached_kappa(N));
}

// ---------------------------------------------------------------------------
// Monte Carlo volume in the cone coordinates (x, y, z) of [[x, z], [z, y]].

struct VolumeEstimate {
  double volume = 0.0;
  double std_error = 0.0;
  double box_volume = 0.0;
  std::size_t samples = 0;
  std::size_t hits = 0;
};

namespace detail {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Closed region { c + G u : |u| <= 1 } = { p : (p-c)^T M (p-c) <= r2 } in eta-log coordinates.
struct EtaEllipsoid {
  Vec3 center;
  Mat3 M;
  double r2;
  Mat3 G;
};

/// eta(log S) for S = [[x, z], [z, y]], or false when S is not SPD.
inline bool eta_log_2x2(double x, double y, double z, Vec3& out) {
  const double m = 0.5 * (x + y);
  const double h = 0.5 * (x - y);
  const double r = std::hypot(h, z);
  if (!(m - r > 0.0)) return false;
  const double l1 = m + r, l2 = m - r;
  const double a = 0.5 * (std::log(l1) + std::log(l2));
  const double c = r > 0.0 ? std::atanh(r / m) / r : 1.0 / m;
  out = {a + c * h, a - c * h, std::sqrt(2.0) * c * z};
  return true;
}

inline Vec3 exp_cone_2x2(const Vec3& eta) {
  const double upper[] = {eta[0], eta[2] / std::sqrt(2.0), eta[1]};
  const SpdMat s = mat_exp(SymMat::from_upper(2, upper));
  return {s(0, 0), s(1, 1), s(0, 1)};
}

inline Mat3 to_mat3(const Matrix& m) {
  Mat3 out{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) out[i][j] = m(i, j);
  return out;
}

inline Vec3 to_vec3(const SymMat& log_c) {
  const auto v = eta_vec(log_c).values;
  return {v[0], v[1], v[2]};
}

inline double quad3(const Mat3& M, const Vec3& v) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += v[i] * M[i][j] * v[j];
  return s;
}

inline void require_2x2(std::size_t d) {
  if (d != 2) throw InvalidArgument("cs_volume_mc: volumes are defined for d = 2 only");
}

inline EtaEllipsoid region_of(const BallCS& cs) {
  require_2x2(cs.center.dim());
  const double r = cs.radius;
  Mat3 I{}, G{};
  for (int i = 0; i < 3; ++i) {
    I[i][i] = 1.0;
    G[i][i] = r;
  }
  return {to_vec3(cs.center_log), I, r * r, G};
}

inline EtaEllipsoid region_of(const EllipsoidCS& cs) {
  require_2x2(cs.center.dim());
  const SymMat m = symmetric_from_matrix(cs.metric_matrix, "cs_volume_mc");
  const auto e = sym_eigen(m);
  if (!(e.values.back() > 0.0)) throw InvalidArgument("cs_volume_mc: metric is not positive definite");
  const double r = std::sqrt(cs.radius_sq);
  const Matrix g = spectral_map(e, [r](double l) { return r / std::sqrt(l); }).dense();
  return {to_vec3(cs.center_log), to_mat3(cs.metric_matrix), cs.radius_sq, to_mat3(g)};
}

inline constexpr int kMeshPolar = 32;
inline constexpr int kMeshAzimuth = 64;
inline constexpr double kBoxInflation = 0.05;

/// Axis-aligned box around exp of the region boundary, each side grown by 5%.
inline std::array<Vec3, 2> bounding_box(const EtaEllipsoid& e) {
  Vec3 lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  auto add = [&](const Vec3& u) {
    Vec3 p = e.center;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) p[i] += e.G[i][j] * u[j];
    const Vec3 c = exp_cone_2x2(p);
    for (int i = 0; i < 3; ++i) {
      lo[i] = std::min(lo[i], c[i]);
      hi[i] = std::max(hi[i], c[i]);
    }
  };
  for (int a = 0; a <= kMeshPolar; ++a) {
    const double th = std::numbers::pi * a / kMeshPolar;
    for (int b = 0; b < kMeshAzimuth; ++b) {
      const double ph = 2.0 * std::numbers::pi * b / kMeshAzimuth;
      add({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
    }
  }
  for (int i = 0; i < 3; ++i) {
    const double grow = kBoxInflation * (hi[i] - lo[i]);
    lo[i] -= grow;
    hi[i] += grow;
    if (!(hi[i] - lo[i] > 0.0) || !std::isfinite(hi[i] - lo[i]))
      throw InvalidArgument("cs_volume_mc: degenerate bounding box");
  }
  return {lo, hi};
}

template <class Rng>
VolumeEstimate volume_mc(const EtaEllipsoid& e, Rng& rng, std::size_t n) {
  if (n == 0) throw InvalidArgument("cs_volume_mc: need at least one sample");
  const auto [lo, hi] = bounding_box(e);
  const double box = (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
  std::size_t hits = 0;
  Vec3 eta;
  for (std::size_t s = 0; s < n; ++s) {
    const double x = lo[0] + (hi[0] - lo[0]) * rng.uniform();
    const double y = lo[1] + (hi[1] - lo[1]) * rng.uniform();
    const double z = lo[2] + (hi[2] - lo[2]) * rng.uniform();
    if (!eta_log_2x2(x, y, z, eta)) continue;
    const Vec3 dlt{eta[0] - e.center[0], eta[1] - e.center[1], eta[2] - e.center[2]};
    if (quad3(e.M, dlt) <= e.r2) ++hits;
  }
  const double f = static_cast<double>(hits) / static_cast<double>(n);
  return {box * f, box * std::sqrt(f * (1.0 - f) / static_cast<double>(n)), box, n, hits};
}

}  // namespace detail

/// Lebesgue volume of the set in cone coordinates by rejection sampling.
template <class Rng>
VolumeEstimate cs_volume_mc(const EllipsoidCS& cs, Rng& rng, std::size_t n_samples) {
  return detail::volume_mc(detail::region_of(cs), rng, n_samples);
}

template <class Rng>
VolumeEstimate cs_volume_mc(const BallCS& cs, Rng& rng, std::size_t n_samples) {
  return detail::volume_mc(detail::region_of(cs), rng, n_samples);
}

/// Volume of exp of the unit eta-ball around `center`, the scaling reference.
template <class Rng>
VolumeEstimate unit_ball_volume_mc(const SpdMat& center, const SymMat& center_log, Rng& rng,
                                   std::size_t n_samples) {
  return cs_volume_mc(BallCS(center, center_log, 1.0), rng, n_samples);
}

}  // namespace spdwave
