// Copyright 2026 The spdwave Authors.
// SPDX-License-Identifier: Apache-2.0

// Test curves, signal-plus-noise sampling and the Monte Carlo studies:
// coverage and volume of the asymptotic and bootstrap confidence sets, the
// covariance check of the estimator at a dyadic point, the bootstrap
// covariance check, and the mean squared error trend over J.
//
// Observations sit at interval midpoints t_k = (2k+1) / 2^{J+1} and are
// X_k = exp(log c(t_k) + xi_k). The studies work on log X_k directly.
//
// Coverage levels in this header follow the tables' convention: level 0.9
// means nominal coverage 0.9 (significance 0.1).
//
// RNG paths, all under the study seed:
//   (s, 0)        noise of Monte Carlo sample s
//   (s, 1, b)     bootstrap multipliers of replicate b of sample s
//   (s, 2, p, v)  volume estimate v at volume point p of sample s

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "spdwave/bootstrap.hpp"
#include "spdwave/detail/parallel.hpp"
#include "spdwave/errors.hpp"
#include "spdwave/inference.hpp"
#include "spdwave/pyramid.hpp"
#include "spdwave/refinement.hpp"
#include "spdwave/rng.hpp"
#include "spdwave/spd_core.hpp"

namespace spdwave {

// ---------------------------------------------------------------------------
// Curves and noise.

struct CurveSpec {
  std::string id;
  std::function<SpdMat(double)> eval;

  static SpdMat make2(double x, double z, double y) {
    const double upper[] = {x, z, y};
    return SpdMat(SymMat::from_upper(2, upper));
  }

  /// The square-root term uses |1 - (2t)^2| so the curve stays real for t > 1/2.
  static CurveSpec c1() {
    return {"c1", [](double t) {
              const double s = 2.0 * std::sin(17.0 * std::numbers::pi * t);
              return make2(50.0 * std::sqrt(std::abs(1.0 - 4.0 * t * t)) + 0.1, s, 50.0 * t + 1.0);
            }};
  }

  static CurveSpec c2() {
    return {"c2", [](double t) {
              const double th = 5.0 * std::numbers::pi * (t + 0.1) / 11.0;
              const double off = 50.0 * std::sqrt(std::sin(2.0 * th) / 2.0);
              return make2(55.0 * std::cos(th), off, 55.0 * std::sin(th));
            }};
  }

  /// Singular at t = 1/2, where det c3 = (5 - 10t)^2 vanishes.
  static CurveSpec c3() {
    return {"c3", [](double t) {
              const double u = 5.0 - 10.0 * t;
              return make2(2.0 * u * u, u, 1.0);
            }};
  }

  static CurveSpec constant(const SpdMat& s) {
    return {"constant", [s](double) { return s; }};
  }

  static CurveSpec custom(std::string name, std::function<SpdMat(double)> f) {
    return {std::move(name), std::move(f)};
  }

  static CurveSpec by_name(const std::string& name) {
    if (name == "c1") return c1();
    if (name == "c2") return c2();
    if (name == "c3") return c3();
    throw InvalidArgument("unknown curve '" + name + "' (expected c1, c2 or c3)");
  }
};

inline SpdMat curve_eval(const CurveSpec& spec, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("curve_eval: t must lie in [0, 1]");
  return spec.eval(t);
}

/// Standard deviations of the independent Gaussian entries of xi (d = 2).
struct NoiseSpec {
  double sigma_11 = 0.0;
  double sigma_22 = 0.0;
  double sigma_12 = 0.0;

  void validate() const {
    if (!(sigma_11 >= 0.0 && sigma_22 >= 0.0 && sigma_12 >= 0.0))
      throw InvalidArgument("NoiseSpec: standard deviations must be nonnegative");
  }

  CovTensor cov() const {
    validate();
    return CovTensor::independent_entries(sigma_11, sigma_22, sigma_12);
  }

  /// Draws xi; entries are taken in the order z11, z22, z12.
  SymMat draw(RngStream& rng) const {
    const double z11 = sigma_11 * rng.normal();
    const double z22 = sigma_22 * rng.normal();
    const double z12 = sigma_12 * rng.normal();
    const double upper[] = {z11, z12, z22};
    return SymMat::from_upper(2, upper);
  }

  /// Noise levels used with the built-in curves.
  static NoiseSpec for_curve(const std::string& id) {
    if (id == "c1") return {0.05, 0.1, 0.01};
    if (id == "c2") return {0.1, 0.05, 0.1};
    if (id == "c3") return {0.1, 0.1, 0.1};
    throw InvalidArgument("no default noise for curve '" + id + "'");
  }
};

inline double grid_point(int J, std::size_t k) {
  return (2.0 * static_cast<double>(k) + 1.0) / std::ldexp(1.0, J + 1);
}

/// Curve sampled on the midpoint grid of scale J, with logs.
struct CurveGrid {
  int J = 0;
  std::vector<double> t;
  std::vector<SpdMat> values;
  LogSequence logs;
};

inline CurveGrid make_grid(const CurveSpec& spec, int J) {
  if (J < 0 || J > 24) throw InvalidArgument("make_grid: J must lie in [0, 24]");
  CurveGrid g;
  g.J = J;
  const std::size_t n = std::size_t{1} << J;
  g.t.reserve(n);
  g.values.reserve(n);
  g.logs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    g.t.push_back(grid_point(J, k));
    try {
      g.values.push_back(curve_eval(spec, g.t.back()));
    } catch (const NotPositiveDefinite&) {
      throw NotPositiveDefinite("curve " + spec.id + " is not SPD at grid point t=" +
                                std::to_string(g.t.back()));
    }
    g.logs.push_back(mat_log(g.values.back()));
  }
  return g;
}

inline LogSequence sample_noisy_curve_log(const LogSequence& truth_logs, const NoiseSpec& noise,
                                          RngStream& rng) {
  noise.validate();
  LogSequence out;
  out.reserve(truth_logs.size());
  for (const auto& l : truth_logs) out.push_back(l + noise.draw(rng));
  return out;
}

/// Noise with a general constant covariance: eta(xi) = C~^{1/2} z.
inline LogSequence sample_noisy_curve_log(const LogSequence& truth_logs, const Matrix& cov_sqrt,
                                          RngStream& rng) {
  const std::size_t q = cov_sqrt.rows();
  std::vector<double> z(q);
  LogSequence out;
  out.reserve(truth_logs.size());
  for (const auto& l : truth_logs) {
    for (auto& v : z) v = rng.normal();
    out.push_back(l + eta_inv(cov_sqrt * std::span<const double>(z)));
  }
  return out;
}

inline std::vector<SpdMat> sample_noisy_curve(const CurveSpec& spec, const NoiseSpec& noise, int J,
                                              RngStream& rng) {
  return to_spd(sample_noisy_curve_log(make_grid(spec, J).logs, noise, rng));
}

// ---------------------------------------------------------------------------
// Coverage and volume study.

struct StudyConfig {
  CurveSpec curve = CurveSpec::c1();
  NoiseSpec noise = NoiseSpec::for_curve("c1");
  int J = 10;
  int J0 = 7;
  int J0_star = 7;
  int N = 5;
  int B = 100;
  int K = 100;
  std::vector<double> levels{0.9, 0.95, 0.975};
  int boundary_trim = 100;
  std::uint64_t seed = 1;
  std::size_t volume_samples = 20000;
  int volume_stride = 32;
  bool volumes = true;
  Multiplier multiplier = Multiplier::gaussian;
  unsigned threads = 0;

  /// Settings of the reference runs: J=10, N=5, B=100, K=100, trim 100 and
  /// J0 = J0* = 7, 5, 6 for c1, c2, c3.
  static StudyConfig reference(const std::string& curve_id, std::uint64_t seed) {
    StudyConfig c;
    c.curve = CurveSpec::by_name(curve_id);
    c.noise = NoiseSpec::for_curve(curve_id);
    c.J0 = c.J0_star = curve_id == "c1" ? 7 : curve_id == "c2" ? 5 : 6;
    c.seed = seed;
    return c;
  }

  void validate() const {
    noise.validate();
    if (J < 1 || J > 20) throw InvalidArgument("study: J must lie in [1, 20]");
    if (J0 < 0 || J0 > J || J0_star < 0 || J0_star > J)
      throw InvalidArgument("study: J0 and J0* must lie in [0, J]");
    if (N < 1 || N % 2 == 0) throw InvalidArgument("study: N must be a positive odd integer");
    if (B < 1 || K < 1) throw InvalidArgument("study: B and K must be positive");
    if (boundary_trim < 0 || 2 * static_cast<long long>(boundary_trim) >= (1LL << J))
      throw InvalidArgument("study: 2 * boundary_trim must be smaller than 2^J");
    if (levels.empty()) throw InvalidArgument("study: no coverage levels");
    for (double l : levels)
      if (!(l > 0.0 && l < 1.0)) throw InvalidArgument("study: coverage levels must lie in (0, 1)");
    if (volume_stride < 1) throw InvalidArgument("study: volume_stride must be positive");
    if (volumes && volume_samples == 0) throw InvalidArgument("study: volume_samples must be positive");
  }
};

enum class CsType { asymptotic, bootstrap };

inline const char* to_string(CsType t) { return t == CsType::asymptotic ? "asymptotic" : "bootstrap"; }

struct CsSummary {
  double level = 0.0;
  CsType type = CsType::asymptotic;
  double coverage = 0.0;
  double coverage_se = 0.0;
  double scaled_volume = std::numeric_limits<double>::quiet_NaN();
  double scaled_volume_se = std::numeric_limits<double>::quiet_NaN();
  double volume = std::numeric_limits<double>::quiet_NaN();
  double volume_se = std::numeric_limits<double>::quiet_NaN();
  std::size_t volume_count = 0;
};

struct StudyReport {
  StudyConfig config;
  std::string rng_algorithm = kRngAlgorithm;
  double kappa = 0.0;
  bool asymptotic_available = true;
  std::vector<CsSummary> rows;            // level-major, asymptotic then bootstrap
  std::vector<std::size_t> points;        // evaluated grid indices
  std::vector<double> point_t;
  std::vector<std::vector<double>> point_coverage;  // [row][point]

  const CsSummary& row(double level, CsType type) const {
    for (const auto& r : rows)
      if (r.type == type && std::abs(r.level - level) < 1e-12) return r;
    throw InvalidArgument("StudyReport: no row for the requested level");
  }
};

namespace detail {

struct SampleOutcome {
  std::vector<std::vector<std::uint8_t>> covered;  // [row][point]
  std::vector<std::vector<double>> scaled;         // [row][volume point]
  std::vector<std::vector<double>> raw;
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double se_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace detail

inline StudyReport coverage_study(const StudyConfig& cfg) {
  cfg.validate();
  const auto grid = make_grid(cfg.curve, cfg.J);
  const RefinementOrder order = RefinementOrder::from_N(cfg.N);
  const CovTensor cov = cfg.noise.cov();

  StudyReport rep;
  rep.config = cfg;
  rep.kappa = detail::cached_kappa(cfg.N);
  rep.asymptotic_available = !cov.singular();
  const std::size_t n = grid.logs.size();
  for (std::size_t k = static_cast<std::size_t>(cfg.boundary_trim); k + cfg.boundary_trim < n; ++k) {
    rep.points.push_back(k);
    rep.point_t.push_back(grid.t[k]);
  }
  std::vector<std::size_t> volume_points;
  for (std::size_t p = 0; p < rep.points.size(); p += static_cast<std::size_t>(cfg.volume_stride))
    volume_points.push_back(p);

  const std::size_t n_levels = cfg.levels.size();
  const std::size_t n_rows = 2 * n_levels;
  const Matrix cov_inv = rep.asymptotic_available ? cov.inverse() : Matrix();
  const double scale = std::ldexp(1.0, cfg.J - cfg.J0) / rep.kappa;
  std::vector<double> chi2(n_levels);
  for (std::size_t l = 0; l < n_levels; ++l) chi2[l] = chi2_quantile(static_cast<int>(cov.q()), cfg.levels[l]);

  std::vector<detail::SampleOutcome> outcomes(static_cast<std::size_t>(cfg.K));
  detail::parallel_for(outcomes.size(), cfg.threads, [&](std::size_t s) {
    auto& out = outcomes[s];
    out.covered.assign(n_rows, std::vector<std::uint8_t>(rep.points.size(), 0));
    out.scaled.assign(n_rows, {});
    out.raw.assign(n_rows, {});

    RngStream noise_rng(cfg.seed, {s, 0});
    const LogSequence data = sample_noisy_curve_log(grid.logs, cfg.noise, noise_rng);
    const LogSequence est = linear_estimate_log(data, cfg.J0, order);
    BootstrapConfig bc{cfg.J0_star, cfg.J0, order, cfg.B, cfg.multiplier, cfg.seed, {s, 1}, 1};
    const LogBootstrap boot = wild_bootstrap_log(data, bc);

    std::vector<double> dist(static_cast<std::size_t>(cfg.B));
    std::vector<double> radius(n_levels);
    std::size_t vp = 0;
    for (std::size_t p = 0; p < rep.points.size(); ++p) {
      const std::size_t k = rep.points[p];
      for (std::size_t b = 0; b < dist.size(); ++b)
        dist[b] = frobenius_norm(boot.replicates[b][k] - est[k]);
      for (std::size_t l = 0; l < n_levels; ++l) radius[l] = upper_order_statistic(dist, 1.0 - cfg.levels[l]);
      const double truth_dist = frobenius_norm(grid.logs[k] - est[k]);
      double stat = 0.0;
      if (rep.asymptotic_available) {
        const auto delta = eta_vec(est[k] - grid.logs[k]).values;
        stat = scale * dot(delta, cov_inv * std::span<const double>(delta));
      }
      for (std::size_t l = 0; l < n_levels; ++l) {
        out.covered[2 * l][p] = rep.asymptotic_available && stat <= chi2[l];
        out.covered[2 * l + 1][p] = truth_dist <= radius[l];
      }

      if (!cfg.volumes || vp >= volume_points.size() || volume_points[vp] != p) continue;
      const SpdMat center = mat_exp(est[k]);
      RngStream unit_rng(cfg.seed, {s, 2, vp, 0});
      const double unit = unit_ball_volume_mc(center, est[k], unit_rng, cfg.volume_samples).volume;
      for (std::size_t l = 0; l < n_levels; ++l) {
        if (rep.asymptotic_available) {
          const EllipsoidCS cs = asymptotic_cs(center, est[k], cov, cfg.J, cfg.J0, cfg.N,
                                               1.0 - cfg.levels[l], rep.kappa);
          RngStream rng(cfg.seed, {s, 2, vp, 1 + 2 * l});
          const double v = cs_volume_mc(cs, rng, cfg.volume_samples).volume;
          out.raw[2 * l].push_back(v);
          out.scaled[2 * l].push_back(v / unit);
        }
        if (radius[l] > 0.0) {
          const BallCS ball(center, est[k], radius[l]);
          RngStream rng(cfg.seed, {s, 2, vp, 2 + 2 * l});
          const double v = cs_volume_mc(ball, rng, cfg.volume_samples).volume;
          out.raw[2 * l + 1].push_back(v);
          out.scaled[2 * l + 1].push_back(v / unit);
        } else {
          out.raw[2 * l + 1].push_back(0.0);
          out.scaled[2 * l + 1].push_back(0.0);
        }
      }
      ++vp;
    }
  });

  rep.point_coverage.assign(n_rows, std::vector<double>(rep.points.size(), 0.0));
  for (std::size_t r = 0; r < n_rows; ++r) {
    CsSummary sum;
    sum.level = cfg.levels[r / 2];
    sum.type = r % 2 == 0 ? CsType::asymptotic : CsType::bootstrap;
    std::vector<double> per_sample;
    std::vector<double> scaled, raw;
    for (const auto& o : outcomes) {
      double c = 0.0;
      for (std::size_t p = 0; p < rep.points.size(); ++p) {
        c += o.covered[r][p];
        rep.point_coverage[r][p] += o.covered[r][p];
      }
      per_sample.push_back(c / static_cast<double>(rep.points.size()));
      scaled.insert(scaled.end(), o.scaled[r].begin(), o.scaled[r].end());
      raw.insert(raw.end(), o.raw[r].begin(), o.raw[r].end());
    }
    for (double& v : rep.point_coverage[r]) v /= static_cast<double>(cfg.K);
    if (sum.type == CsType::asymptotic && !rep.asymptotic_available) {
      sum.coverage = sum.coverage_se = std::numeric_limits<double>::quiet_NaN();
    } else {
      sum.coverage = detail::mean_of(per_sample);
      sum.coverage_se = detail::se_of(per_sample);
    }
    if (!scaled.empty()) {
      sum.scaled_volume = detail::mean_of(scaled);
      sum.scaled_volume_se = detail::se_of(scaled);
      sum.volume = detail::mean_of(raw);
      sum.volume_se = detail::se_of(raw);
      sum.volume_count = scaled.size();
    }
    rep.rows.push_back(sum);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Covariance of the estimator at a dyadic point.

namespace detail {

/// Fine index of x on scale J; x * 2^J must be an integer in [0, 2^J).
inline std::size_t dyadic_index(double x, int J) {
  const double k = std::ldexp(x, J);
  if (!(k >= 0.0 && k < std::ldexp(1.0, J)) || k != std::floor(k))
    throw InvalidArgument("x=" + std::to_string(x) + " is not a dyadic grid point of scale " +
                          std::to_string(J));
  return static_cast<std::size_t>(k);
}

/// Weights w_i with (linear estimate)_k = sum_i w_i data_i, per entry.
inline std::vector<double> estimator_weights(int J, int J0, const RefinementOrder& order, std::size_t k) {
  const std::size_t n = std::size_t{1} << J;
  std::vector<double> w(n), x, scratch;
  for (std::size_t i = 0; i < n; ++i) {
    x.assign(n, 0.0);
    x[i] = 1.0;
    smooth_channel(x, J, J0, order, scratch);
    w[i] = x[k];
  }
  return w;
}

/// Asymptotic Kolmogorov distribution tail with the Stephens correction.
inline double ks_pvalue(double D, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * D;
  if (lambda < 1e-3) return 1.0;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = 2.0 * ((j % 2) ? 1.0 : -1.0) * std::exp(-2.0 * j * j * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double relative_max_error(const Matrix& a, const Matrix& ref) {
  return max_abs_diff(a, ref) / ref.max_abs();
}

}  // namespace detail

/// Kolmogorov-Smirnov statistic of a sample against N(0, 1).
inline double ks_statistic_normal(std::vector<double> z) {
  if (z.empty()) throw InvalidArgument("ks_statistic_normal: empty sample");
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double D = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double F = detail::std_normal_cdf(z[i]);
    const double below = static_cast<double>(i);
    D = std::max({D, (below + 1.0) / n - F, F - below / n});
  }
  return D;
}

struct CltConfig {
  int J = 12;
  int J0 = 6;
  int N = 3;
  double x = 0.5 + 1.0 / 128.0;
  int R = 2000;
  CovTensor cov = CovTensor::independent_entries(0.1, 0.1, 0.1);
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct CltReport {
  std::size_t k = 0;
  int R = 0;
  double kappa = 0.0;
  double kappa_factor = 0.0;  // 2^{-(J-J0)} kappa_N
  double exact_factor = 0.0;  // sum_i w_i^2 of the estimator at k
  Matrix empirical;
  Matrix predicted;           // kappa_factor * C~
  double rel_error = 0.0;     // max |empirical - predicted| / max |predicted|
  double ks_statistic = 0.0;  // first eta component, standardized by its exact variance
  double ks_pvalue = 0.0;
};

namespace detail {

/// log M^_{J,k} over R independent data sets around the identity curve.
inline std::vector<SymMat> estimator_draws(int J, int J0, const RefinementOrder& order, std::size_t k,
                                           int R, const CovTensor& cov, std::uint64_t seed,
                                           std::uint64_t role, unsigned threads) {
  const LogSequence truth(std::size_t{1} << J, SymMat(cov.dim()));
  const Matrix root = cov.sqrt();
  std::vector<SymMat> draws(static_cast<std::size_t>(R));
  parallel_for(draws.size(), threads, [&](std::size_t r) {
    RngStream rng(seed, {role, r});
    const auto data = sample_noisy_curve_log(truth, root, rng);
    draws[r] = linear_estimate_log(data, J0, order)[k];
  });
  return draws;
}

}  // namespace detail

inline CltReport clt_check(const CltConfig& cfg) {
  if (cfg.R < 2) throw InvalidArgument("clt_check: need R >= 2");
  if (cfg.J0 < 0 || cfg.J0 > cfg.J) throw InvalidArgument("clt_check: need 0 <= J0 <= J");
  const auto order = RefinementOrder::from_N(cfg.N);
  CltReport rep;
  rep.k = detail::dyadic_index(cfg.x, cfg.J);
  rep.R = cfg.R;
  rep.kappa = detail::cached_kappa(cfg.N);
  rep.kappa_factor = std::ldexp(rep.kappa, cfg.J0 - cfg.J);
  for (double w : detail::estimator_weights(cfg.J, cfg.J0, order, rep.k)) rep.exact_factor += w * w;

  const auto draws = detail::estimator_draws(cfg.J, cfg.J0, order, rep.k, cfg.R, cfg.cov, cfg.seed, 0,
                                             cfg.threads);
  rep.empirical = empirical_covariance_eta(draws);
  rep.predicted = rep.kappa_factor * cfg.cov.eta_matrix();
  rep.rel_error = detail::relative_max_error(rep.empirical, rep.predicted);

  const double sd = std::sqrt(rep.exact_factor * cfg.cov.eta_matrix()(0, 0));
  std::vector<double> z;
  z.reserve(draws.size());
  for (const auto& d : draws) z.push_back(eta_vec(d).values[0] / sd);
  rep.ks_statistic = ks_statistic_normal(z);
  rep.ks_pvalue = detail::ks_pvalue(rep.ks_statistic, z.size());
  return rep;
}

// ---------------------------------------------------------------------------
// Bootstrap covariance against the sampling covariance.

struct BootstrapCheckConfig {
  int J = 12;
  int J0 = 6;
  int J0_star = 6;
  int N = 3;
  double x = 0.5 + 1.0 / 128.0;
  int R = 2000;
  int B = 2000;
  CovTensor cov = CovTensor::independent_entries(0.1, 0.1, 0.1);
  Multiplier multiplier = Multiplier::gaussian;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct BootstrapCheckReport {
  std::size_t k = 0;
  Matrix bootstrap_cov;  // conditional, over B replicates of one data set
  Matrix sampling_cov;   // over R fresh data sets
  double rel_error = 0.0;
};

inline BootstrapCheckReport bootstrap_check(const BootstrapCheckConfig& cfg) {
  if (cfg.R < 2 || cfg.B < 2) throw InvalidArgument("bootstrap_check: need R, B >= 2");
  const auto order = RefinementOrder::from_N(cfg.N);
  BootstrapCheckReport rep;
  rep.k = detail::dyadic_index(cfg.x, cfg.J);

  const LogSequence truth(std::size_t{1} << cfg.J, SymMat(cfg.cov.dim()));
  RngStream data_rng(cfg.seed, {1, 0});
  const auto data = sample_noisy_curve_log(truth, cfg.cov.sqrt(), data_rng);
  BootstrapConfig bc{cfg.J0_star, cfg.J0, order, cfg.B, cfg.multiplier, cfg.seed, {1, 1}, cfg.threads};
  const auto boot = wild_bootstrap_log(data, bc);
  std::vector<SymMat> at_k;
  at_k.reserve(boot.replicates.size());
  for (const auto& r : boot.replicates) at_k.push_back(r[rep.k]);
  rep.bootstrap_cov = empirical_covariance_eta(at_k);

  const auto draws = detail::estimator_draws(cfg.J, cfg.J0, order, rep.k, cfg.R, cfg.cov, cfg.seed, 2,
                                             cfg.threads);
  rep.sampling_cov = empirical_covariance_eta(draws);
  rep.rel_error = detail::relative_max_error(rep.bootstrap_cov, rep.sampling_cov);
  return rep;
}

// ---------------------------------------------------------------------------
// Mean squared error over increasing sample scale.

struct MseConfig {
  CurveSpec curve = CurveSpec::c3();
  NoiseSpec noise = NoiseSpec::for_curve("c3");
  std::vector<int> scales{8, 10, 12};
  int N = 3;
  int replicates = 50;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  /// floor(J / (2N + 1)) + 3.
  int J0_for(int J) const { return J / (2 * N + 1) + 3; }
};

struct MsePoint {
  int J = 0;
  int J0 = 0;
  double mse = 0.0;  // mean over grid points and replicates of d(M^, c)^2
  double se = 0.0;   // standard error over replicates
};

inline std::vector<MsePoint> mse_study(const MseConfig& cfg) {
  if (cfg.replicates < 1) throw InvalidArgument("mse_study: need at least one replicate");
  const auto order = RefinementOrder::from_N(cfg.N);
  std::vector<MsePoint> out;
  for (std::size_t si = 0; si < cfg.scales.size(); ++si) {
    const int J = cfg.scales[si];
    const int J0 = std::min(cfg.J0_for(J), J);
    const auto grid = make_grid(cfg.curve, J);
    std::vector<double> per(static_cast<std::size_t>(cfg.replicates));
    detail::parallel_for(per.size(), cfg.threads, [&](std::size_t r) {
      RngStream rng(cfg.seed, {static_cast<std::uint64_t>(J), r});
      const auto est = linear_estimate_log(sample_noisy_curve_log(grid.logs, cfg.noise, rng), J0, order);
      double s = 0.0;
      for (std::size_t k = 0; k < est.size(); ++k) {
        const double e = frobenius_norm(est[k] - grid.logs[k]);
        s += e * e;
      }
      per[r] = s / static_cast<double>(est.size());
    });
    out.push_back({J, J0, detail::mean_of(per), detail::se_of(per)});
  }
  return out;
}

}  // namespace spdwave
