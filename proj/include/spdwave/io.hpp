// Copyright 2026 The spdwave Authors.
// SPDX-License-Identifier: Apache-2.0

// JSON and CSV serialization.
//
//   matrix: {"dim": d, "upper": [row-major upper triangle incl. diagonal]}
//   curve:  {"J": J, "matrices": [matrix, ...]}   (2^J records)
//
// Reports are written as CSV with a header row, '.' decimals and ','
// separators, plus a JSON sidecar holding the full configuration.

#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "spdwave/errors.hpp"
#include "spdwave/harness.hpp"
#include "spdwave/inference.hpp"
#include "spdwave/linalg.hpp"
#include "spdwave/pyramid.hpp"
#include "spdwave/spd_core.hpp"

namespace spdwave {

using json = nlohmann::json;

inline json to_json(const SymMat& s) {
  return {{"dim", s.dim()}, {"upper", std::vector<double>(s.upper().begin(), s.upper().end())}};
}

inline json to_json(const SpdMat& s) { return to_json(s.sym()); }

inline json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i)
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  return rows;
}

inline SymMat sym_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("upper"))
    throw InvalidArgument("matrix record needs \"dim\" and \"upper\"");
  const auto d = j.at("dim").get<std::size_t>();
  const auto u = j.at("upper").get<std::vector<double>>();
  return SymMat::from_upper(d, u);
}

inline SpdMat spd_from_json(const json& j) { return SpdMat(sym_from_json(j)); }

inline json curve_to_json(std::span<const SpdMat> xs) {
  json arr = json::array();
  for (const auto& x : xs) arr.push_back(to_json(x));
  return {{"J", dyadic_scale(xs.size())}, {"matrices", arr}};
}

inline std::vector<SpdMat> curve_from_json(const json& j) {
  if (!j.is_object() || !j.contains("matrices"))
    throw InvalidArgument("curve file needs a \"matrices\" array");
  std::vector<SpdMat> out;
  for (const auto& rec : j.at("matrices")) out.push_back(spd_from_json(rec));
  const int J = dyadic_scale(out.size());
  if (j.contains("J") && j.at("J").get<int>() != J)
    throw InvalidArgument("curve file: \"J\" does not match the number of matrices");
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
  if (!out) throw InvalidArgument("error while writing " + path);
}

inline json to_json(const EllipsoidCS& cs) {
  return {{"type", "asymptotic"}, {"center", to_json(cs.center)},
          {"metric_matrix", to_json(cs.metric_matrix)}, {"radius_sq", cs.radius_sq},
          {"scale", cs.scale}, {"alpha", cs.alpha}, {"J", cs.J}, {"J0", cs.J0},
          {"N", cs.N}, {"kappa", cs.kappa}};
}

inline json to_json(const BallCS& cs, double alpha) {
  return {{"type", "bootstrap"}, {"center", to_json(cs.center)}, {"radius", cs.radius},
          {"alpha", alpha}};
}

namespace detail {

inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace detail

inline json config_to_json(const StudyConfig& c) {
  return {{"curve", c.curve.id},
          {"noise", {{"sigma_11", c.noise.sigma_11}, {"sigma_22", c.noise.sigma_22},
                     {"sigma_12", c.noise.sigma_12}}},
          {"J", c.J}, {"J0", c.J0}, {"J0_star", c.J0_star}, {"N", c.N}, {"B", c.B}, {"K", c.K},
          {"levels", c.levels}, {"boundary_trim", c.boundary_trim}, {"seed", c.seed},
          {"volume_samples", c.volume_samples}, {"volume_stride", c.volume_stride},
          {"volumes", c.volumes}, {"multiplier", to_string(c.multiplier)}};
}

/// Overlays the keys present in `j` (same names as config_to_json) onto `base`.
inline StudyConfig config_from_json(const json& j, StudyConfig base = {}) {
  if (!j.is_object()) throw InvalidArgument("study config: expected a JSON object");
  if (j.contains("curve")) {
    const auto id = j.at("curve").get<std::string>();
    base.curve = CurveSpec::by_name(id);
    base.noise = NoiseSpec::for_curve(id);
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    base.noise.sigma_11 = n.value("sigma_11", base.noise.sigma_11);
    base.noise.sigma_22 = n.value("sigma_22", base.noise.sigma_22);
    base.noise.sigma_12 = n.value("sigma_12", base.noise.sigma_12);
  }
  base.J = j.value("J", base.J);
  base.J0 = j.value("J0", base.J0);
  base.J0_star = j.value("J0_star", base.J0_star);
  base.N = j.value("N", base.N);
  base.B = j.value("B", base.B);
  base.K = j.value("K", base.K);
  base.levels = j.value("levels", base.levels);
  base.boundary_trim = j.value("boundary_trim", base.boundary_trim);
  base.seed = j.value("seed", base.seed);
  base.volume_samples = j.value("volume_samples", base.volume_samples);
  base.volume_stride = j.value("volume_stride", base.volume_stride);
  base.volumes = j.value("volumes", base.volumes);
  if (j.contains("multiplier")) base.multiplier = multiplier_from_string(j.at("multiplier").get<std::string>());
  base.validate();
  return base;
}

/// One row per level and set type.
inline std::string study_summary_csv(const StudyReport& r) {
  std::ostringstream s;
  s << "# rng=" << r.rng_algorithm << " seed=" << r.config.seed << "\n";
  s << "curve,level,cs_type,coverage,coverage_se,scaled_volume,scaled_volume_se,volume,volume_se,"
       "volume_count\n";
  for (const auto& row : r.rows)
    s << r.config.curve.id << ',' << detail::num(row.level) << ',' << to_string(row.type) << ','
      << detail::num(row.coverage) << ',' << detail::num(row.coverage_se) << ','
      << detail::num(row.scaled_volume) << ',' << detail::num(row.scaled_volume_se) << ','
      << detail::num(row.volume) << ',' << detail::num(row.volume_se) << ',' << row.volume_count
      << '\n';
  return s.str();
}

/// Per-point coverage over the K samples, one column per level and set type.
inline std::string study_points_csv(const StudyReport& r) {
  std::ostringstream s;
  s << "k,t";
  for (const auto& row : r.rows) s << ',' << to_string(row.type) << '_' << detail::num(row.level);
  s << '\n';
  for (std::size_t p = 0; p < r.points.size(); ++p) {
    s << r.points[p] << ',' << detail::num(r.point_t[p]);
    for (std::size_t row = 0; row < r.rows.size(); ++row) s << ',' << detail::num(r.point_coverage[row][p]);
    s << '\n';
  }
  return s.str();
}

inline json study_to_json(const StudyReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    auto nan_safe = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    rows.push_back({{"level", row.level}, {"cs_type", to_string(row.type)},
                    {"coverage", nan_safe(row.coverage)}, {"coverage_se", nan_safe(row.coverage_se)},
                    {"scaled_volume", nan_safe(row.scaled_volume)},
                    {"scaled_volume_se", nan_safe(row.scaled_volume_se)},
                    {"volume", nan_safe(row.volume)}, {"volume_se", nan_safe(row.volume_se)},
                    {"volume_count", row.volume_count}});
  }
  return {{"rng", r.rng_algorithm}, {"config", config_to_json(r.config)}, {"kappa", r.kappa},
          {"asymptotic_available", r.asymptotic_available}, {"summary", rows}};
}

inline std::string matrix_csv(const Matrix& m) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) s << (j ? "," : "") << m(i, j);
    s << '\n';
  }
  return s.str();
}

}  // namespace spdwave
