// Copyright 2026 The spdwave Authors.
// SPDX-License-Identifier: Apache-2.0

// Wild bootstrap for the linear wavelet estimator.
//
//   pilot      = linear_estimate(data, J0*)
//   residual_k = log data_k - log pilot_k
//   boot_k     = exp(log pilot_k + V_k residual_k),  V_k iid, E V = 0, E V^2 = 1
//   replicate  = linear_estimate(boot, J0)
//
// One scalar multiplier scales the whole residual matrix at each k. Replicate
// b draws its multipliers from the substream (seed, path..., b), so results do
// not depend on the order in which replicates are computed.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spdwave/detail/parallel.hpp"
#include "spdwave/errors.hpp"
#include "spdwave/inference.hpp"
#include "spdwave/pyramid.hpp"
#include "spdwave/rng.hpp"
#include "spdwave/spd_core.hpp"

namespace spdwave {

enum class Multiplier { gaussian, two_point };

inline const char* to_string(Multiplier m) {
  return m == Multiplier::gaussian ? "gaussian" : "two_point";
}

inline Multiplier multiplier_from_string(const std::string& s) {
  if (s == "gaussian") return Multiplier::gaussian;
  if (s == "two_point" || s == "two-point") return Multiplier::two_point;
  throw InvalidArgument("unknown multiplier '" + s + "' (expected gaussian or two_point)");
}

namespace two_point {

inline const double kLow = -(std::sqrt(5.0) - 1.0) / 2.0;
inline const double kHigh = (std::sqrt(5.0) + 1.0) / 2.0;
inline const double kProbLow = (std::sqrt(5.0) + 1.0) / (2.0 * std::sqrt(5.0));

}  // namespace two_point

/// Mean zero, unit variance; the two-point law also has unit third moment.
inline double multiplier_sample(Multiplier kind, RngStream& rng) {
  switch (kind) {
    case Multiplier::gaussian: return rng.normal();
    case Multiplier::two_point: return rng.uniform() < two_point::kProbLow ? two_point::kLow : two_point::kHigh;
  }
  throw InvalidArgument("multiplier_sample: invalid kind");
}

struct BootstrapConfig {
  int J0_star = 0;
  int J0 = 0;
  RefinementOrder order;
  int B = 100;
  Multiplier multiplier = Multiplier::gaussian;
  std::uint64_t seed = 0;
  /// Prefix of the RNG path; replicate b uses (seed, stream_path..., b).
  std::vector<std::uint64_t> stream_path;
  unsigned threads = 1;

  void validate(int J) const {
    if (J0_star < 0 || J0_star > J)
      throw InvalidArgument("bootstrap: J0*=" + std::to_string(J0_star) + " outside [0, " + std::to_string(J) + "]");
    if (J0 < 0 || J0 > J)
      throw InvalidArgument("bootstrap: J0=" + std::to_string(J0) + " outside [0, " + std::to_string(J) + "]");
    if (B < 1) throw InvalidArgument("bootstrap: B must be at least 1");
  }

  RngStream replicate_stream(std::size_t b) const {
    auto p = stream_path;
    p.push_back(b);
    return RngStream(seed, std::move(p));
  }
};

struct LogBootstrap {
  LogSequence pilot;
  LogSequence residuals;
  std::vector<LogSequence> replicates;
};

/// Log-domain wild bootstrap with a caller-supplied multiplier draw
/// `double(RngStream&)`; the plain overloads use cfg.multiplier.
template <class Draw>
LogBootstrap wild_bootstrap_log(std::span<const SymMat> data, const BootstrapConfig& cfg, Draw&& draw) {
  const int J = dyadic_scale(data.size());
  cfg.validate(J);
  LogBootstrap out;
  out.pilot = linear_estimate_log(data, cfg.J0_star, cfg.order);
  out.residuals.reserve(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) out.residuals.push_back(data[k] - out.pilot[k]);

  out.replicates.resize(static_cast<std::size_t>(cfg.B));
  detail::parallel_for(out.replicates.size(), cfg.threads, [&](std::size_t b) {
    RngStream rng = cfg.replicate_stream(b);
    LogSequence boot;
    boot.reserve(data.size());
    for (std::size_t k = 0; k < data.size(); ++k) {
      SymMat x = out.pilot[k];
      x.axpy(draw(rng), out.residuals[k]);
      boot.push_back(std::move(x));
    }
    out.replicates[b] = linear_estimate_log(boot, cfg.J0, cfg.order);
  });
  return out;
}

inline LogBootstrap wild_bootstrap_log(std::span<const SymMat> data, const BootstrapConfig& cfg) {
  return wild_bootstrap_log(data, cfg, [kind = cfg.multiplier](RngStream& rng) {
    return multiplier_sample(kind, rng);
  });
}

inline std::vector<std::vector<SpdMat>> wild_bootstrap(std::span<const SpdMat> data,
                                                       const BootstrapConfig& cfg) {
  const auto logs = to_log(data);
  auto boot = wild_bootstrap_log(logs, cfg);
  std::vector<std::vector<SpdMat>> out;
  out.reserve(boot.replicates.size());
  for (const auto& r : boot.replicates) out.push_back(to_spd(r));
  return out;
}

/// The ceil(B (1 - alpha))-th smallest of the distances (1-based). The 1e-9
/// guard keeps B (1 - alpha) = 9.000000000000002 at 9.
inline double upper_order_statistic(std::vector<double> distances, double alpha) {
  if (distances.empty()) throw InvalidArgument("bootstrap quantile: no replicates");
  detail::check_alpha(alpha, "bootstrap quantile");
  const double B = static_cast<double>(distances.size());
  auto rank = static_cast<std::size_t>(std::ceil(B * (1.0 - alpha) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, distances.size());
  std::nth_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   distances.end());
  return distances[rank - 1];
}

inline BallCS bootstrap_ball_log(const SpdMat& estimate, const SymMat& estimate_log,
                                 std::span<const SymMat> replicate_logs, double alpha) {
  if (replicate_logs.empty()) throw InvalidArgument("bootstrap_ball: empty replicate set");
  std::vector<double> dist;
  dist.reserve(replicate_logs.size());
  for (const auto& r : replicate_logs) dist.push_back(frobenius_norm(r - estimate_log));
  return BallCS(estimate, estimate_log, upper_order_statistic(std::move(dist), alpha));
}

/// Log-Euclidean ball around the estimate whose radius is the bootstrap
/// (1 - alpha)-quantile of the replicate distances.
inline BallCS bootstrap_ball(const SpdMat& estimate, std::span<const SpdMat> replicates, double alpha) {
  if (replicates.empty()) throw InvalidArgument("bootstrap_ball: empty replicate set");
  return bootstrap_ball_log(estimate, mat_log(estimate), to_log(replicates), alpha);
}

}  // namespace spdwave
