// spdwave command-line tool.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "spdwave/io.hpp"

namespace sw = spdwave;
using sw::json;

namespace {

struct NoiseFlags {
  std::optional<double> s11, s22, s12;

  void add(CLI::App* app) {
    app->add_option("--sigma11", s11, "sd of the (1,1) log-noise entry");
    app->add_option("--sigma22", s22, "sd of the (2,2) log-noise entry");
    app->add_option("--sigma12", s12, "sd of the (1,2) log-noise entry");
  }

  sw::NoiseSpec resolve(const std::string& curve) const {
    sw::NoiseSpec n = curve.empty() ? sw::NoiseSpec{} : sw::NoiseSpec::for_curve(curve);
    if (s11) n.sigma_11 = *s11;
    if (s22) n.sigma_22 = *s22;
    if (s12) n.sigma_12 = *s12;
    n.validate();
    return n;
  }

  bool complete() const { return s11 && s22 && s12; }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    sw::write_text_file(path, text);
}

std::vector<sw::SpdMat> read_curve(const std::string& path) {
  return sw::curve_from_json(sw::read_json_file(path));
}

std::string curve_csv(std::span<const sw::SpdMat> xs) {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(17);
  const int J = sw::dyadic_scale(xs.size());
  const std::size_t d = xs.front().dim();
  s << "k,t";
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) s << ",s" << i + 1 << j + 1;
  s << '\n';
  for (std::size_t k = 0; k < xs.size(); ++k) {
    s << k << ',' << sw::grid_point(J, k);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) s << ',' << xs[k](i, j);
    s << '\n';
  }
  return s.str();
}

/// Coverage level (e.g. 0.9) to significance alpha, rejecting values outside (0, 1).
double significance(double level) {
  if (!(level > 0.0 && level < 1.0)) throw sw::InvalidArgument("--alpha is a coverage level in (0, 1)");
  return 1.0 - level;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet denoising and confidence sets for curves of SPD matrices"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "sample a noisy test curve");
  std::string sim_curve = "c1", sim_out, sim_truth;
  int sim_J = 10;
  std::uint64_t sim_seed = 0;
  NoiseFlags sim_noise;
  sim->add_option("--curve", sim_curve, "c1, c2 or c3")->check(CLI::IsMember({"c1", "c2", "c3"}));
  sim->add_option("--J", sim_J, "log2 of the number of samples");
  sim->add_option("--seed", sim_seed, "RNG seed")->required();
  sim->add_option("--out", sim_out, "noisy curve JSON")->required();
  sim->add_option("--truth", sim_truth, "also write the noise-free curve");
  sim_noise.add(sim);

  // transform
  auto* tr = app.add_subcommand("transform", "wavelet transform, linear thresholding and reconstruction");
  std::string tr_in, tr_out, tr_coeffs;
  int tr_order = 5;
  std::optional<int> tr_j0;
  tr->add_option("--in", tr_in, "input curve JSON")->required();
  tr->add_option("--order", tr_order, "refinement order N (odd)");
  tr->add_option("--j0", tr_j0, "keep scales <= J0 (default: all)");
  tr->add_option("--out", tr_out, "reconstructed curve JSON")->required();
  tr->add_option("--coeffs", tr_coeffs, "CSV of coefficient norms (j,k,norm) before thresholding");

  // estimate
  auto* est = app.add_subcommand("estimate", "linear wavelet estimate");
  std::string est_in, est_out, est_csv;
  int est_order = 5, est_j0 = 7;
  est->add_option("--in", est_in, "input curve JSON")->required();
  est->add_option("--order", est_order, "refinement order N (odd)");
  est->add_option("--j0", est_j0, "threshold scale J0");
  est->add_option("--out", est_out, "estimate JSON");
  est->add_option("--csv", est_csv, "estimate as CSV (k,t,entries)");

  // bootstrap
  auto* bs = app.add_subcommand("bootstrap", "wild-bootstrap confidence balls at every grid point");
  std::string bs_in, bs_out;
  int bs_order = 5, bs_j0 = 7, bs_B = 100;
  std::optional<int> bs_j0star;
  double bs_level = 0.9;
  std::uint64_t bs_seed = 0;
  std::string bs_mult = "gaussian";
  bs->add_option("--in", bs_in, "input curve JSON")->required();
  bs->add_option("--j0", bs_j0, "threshold scale J0");
  bs->add_option("--j0star", bs_j0star, "pilot threshold scale J0* (default J0)");
  bs->add_option("--order", bs_order, "refinement order N (odd)");
  bs->add_option("--B", bs_B, "bootstrap replicates");
  bs->add_option("--alpha", bs_level, "coverage level, e.g. 0.9");
  bs->add_option("--multiplier", bs_mult, "gaussian or two_point")->check(CLI::IsMember({"gaussian", "two_point"}));
  bs->add_option("--seed", bs_seed, "RNG seed")->required();
  bs->add_option("--out", bs_out, "confidence sets JSON")->required();

  // cs
  auto* cs = app.add_subcommand("cs", "confidence set at one grid point");
  std::string cs_type, cs_in, cs_out, cs_cov;
  int cs_order = 5, cs_j0 = 7, cs_B = 100;
  std::optional<int> cs_j0star;
  std::size_t cs_index = 0;
  double cs_level = 0.9;
  std::optional<std::uint64_t> cs_seed;
  NoiseFlags cs_noise;
  cs->add_option("--type", cs_type, "asym or boot")->required()->check(CLI::IsMember({"asym", "boot"}));
  cs->add_option("--in", cs_in, "input curve JSON")->required();
  cs->add_option("--index", cs_index, "grid index k");
  cs->add_option("--j0", cs_j0, "threshold scale J0");
  cs->add_option("--j0star", cs_j0star, "pilot threshold scale J0* (boot)");
  cs->add_option("--order", cs_order, "refinement order N (odd)");
  cs->add_option("--alpha", cs_level, "coverage level, e.g. 0.9");
  cs->add_option("--B", cs_B, "bootstrap replicates (boot)");
  cs->add_option("--seed", cs_seed, "RNG seed (boot)");
  cs->add_option("--cov", cs_cov, "JSON array of rows: q x q eta-covariance (asym)");
  cs_noise.add(cs);
  cs->add_option("--out", cs_out, "output JSON (default stdout)");

  // coverage
  auto* cov = app.add_subcommand("coverage", "Monte Carlo coverage and volume study");
  std::string cov_config, cov_curve = "c1", cov_out, cov_json, cov_points, cov_mult;
  std::optional<int> cov_J, cov_j0, cov_j0star, cov_order, cov_B, cov_K, cov_trim, cov_stride;
  std::optional<std::size_t> cov_vsamples;
  std::vector<double> cov_levels;
  std::optional<std::uint64_t> cov_seed;
  bool cov_novol = false;
  NoiseFlags cov_noise;
  cov->add_option("--config", cov_config, "study config JSON (flags override it)");
  cov->add_option("--curve", cov_curve, "c1, c2 or c3 (reference settings)")->check(CLI::IsMember({"c1", "c2", "c3"}));
  cov->add_option("--J", cov_J, "log2 of the number of samples");
  cov->add_option("--j0", cov_j0, "threshold scale J0");
  cov->add_option("--j0star", cov_j0star, "pilot threshold scale J0*");
  cov->add_option("--order", cov_order, "refinement order N (odd)");
  cov->add_option("--B", cov_B, "bootstrap replicates");
  cov->add_option("--K", cov_K, "Monte Carlo samples");
  cov->add_option("--trim", cov_trim, "grid points dropped at each end");
  cov->add_option("--levels", cov_levels, "coverage levels");
  cov->add_option("--volume-samples", cov_vsamples, "MC draws per volume estimate");
  cov->add_option("--volume-stride", cov_stride, "volume at every n-th evaluated point");
  cov->add_flag("--no-volumes", cov_novol, "skip volume estimation");
  cov->add_option("--multiplier", cov_mult, "gaussian or two_point")->check(CLI::IsMember({"gaussian", "two_point"}));
  cov->add_option("--seed", cov_seed, "RNG seed");
  cov->add_option("--out", cov_out, "summary CSV (default stdout)");
  cov->add_option("--json", cov_json, "JSON sidecar with the full configuration");
  cov->add_option("--points", cov_points, "per-point coverage CSV");
  cov_noise.add(cov);

  // kappa
  auto* kap = app.add_subcommand("kappa", "variance constant and limiting transition matrix");
  int kap_order = 3;
  kap->add_option("--order", kap_order, "refinement order N (odd)")->required();

  // clt-check
  auto* clt = app.add_subcommand("clt-check", "Monte Carlo check of the estimator covariance");
  sw::CltConfig clt_cfg;
  NoiseFlags clt_noise;
  clt->add_option("--J", clt_cfg.J, "log2 of the number of samples");
  clt->add_option("--j0", clt_cfg.J0, "threshold scale J0");
  clt->add_option("--order", clt_cfg.N, "refinement order N (odd)");
  clt->add_option("--x", clt_cfg.x, "dyadic evaluation point");
  clt->add_option("--R", clt_cfg.R, "Monte Carlo replicates");
  clt->add_option("--seed", clt_cfg.seed, "RNG seed")->required();
  clt_noise.add(clt);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      sw::RngStream rng(sim_seed, {0});
      const auto spec = sw::CurveSpec::by_name(sim_curve);
      const auto grid = sw::make_grid(spec, sim_J);
      const auto data = sw::to_spd(sw::sample_noisy_curve_log(grid.logs, sim_noise.resolve(sim_curve), rng));
      auto j = sw::curve_to_json(data);
      j["curve"] = sim_curve;
      j["seed"] = sim_seed;
      j["rng"] = sw::kRngAlgorithm;
      sw::write_text_file(sim_out, j.dump(1) + "\n");
      if (!sim_truth.empty()) sw::write_text_file(sim_truth, sw::curve_to_json(grid.values).dump(1) + "\n");
    } else if (tr->parsed()) {
      const auto xs = read_curve(tr_in);
      const auto order = sw::RefinementOrder::from_N(tr_order);
      auto w = sw::forward_transform_log(sw::to_log(xs), order);
      if (!tr_coeffs.empty()) {
        std::ostringstream s;
        s << std::setprecision(17) << "j,k,norm\n";
        for (int j = 1; j <= w.J; ++j)
          for (std::size_t k = 0; k < w.scale(j).size(); ++k)
            s << j << ',' << k << ',' << sw::frobenius_norm(w.scale(j)[k]) << '\n';
        sw::write_text_file(tr_coeffs, s.str());
      }
      if (tr_j0) sw::threshold_above(w, *tr_j0);
      const auto back = sw::to_spd(sw::backward_transform_log(w, order));
      sw::write_text_file(tr_out, sw::curve_to_json(back).dump(1) + "\n");
    } else if (est->parsed()) {
      const auto xs = read_curve(est_in);
      const auto e = sw::linear_estimate(xs, est_j0, sw::RefinementOrder::from_N(est_order));
      if (!est_out.empty()) sw::write_text_file(est_out, sw::curve_to_json(e).dump(1) + "\n");
      if (!est_csv.empty() || est_out.empty()) emit(est_csv, curve_csv(e));
    } else if (bs->parsed()) {
      const auto logs = sw::to_log(read_curve(bs_in));
      const double alpha = significance(bs_level);
      sw::BootstrapConfig bc{bs_j0star.value_or(bs_j0), bs_j0, sw::RefinementOrder::from_N(bs_order), bs_B,
                             sw::multiplier_from_string(bs_mult), bs_seed, {1}, threads};
      const auto boot = sw::wild_bootstrap_log(logs, bc);
      const auto estimate = sw::linear_estimate_log(logs, bs_j0, bc.order);
      json sets = json::array();
      std::vector<sw::SymMat> at_k(boot.replicates.size());
      for (std::size_t k = 0; k < logs.size(); ++k) {
        for (std::size_t b = 0; b < at_k.size(); ++b) at_k[b] = boot.replicates[b][k];
        const auto ball = sw::bootstrap_ball_log(sw::mat_exp(estimate[k]), estimate[k], at_k, alpha);
        sets.push_back(sw::to_json(ball, alpha));
      }
      json out{{"level", bs_level}, {"alpha", alpha}, {"B", bs_B}, {"J0", bs_j0}, {"J0_star", bc.J0_star},
               {"N", bs_order}, {"multiplier", bs_mult}, {"seed", bs_seed}, {"rng", sw::kRngAlgorithm},
               {"sets", sets}};
      sw::write_text_file(bs_out, out.dump(1) + "\n");
    } else if (cs->parsed()) {
      const auto xs = read_curve(cs_in);
      if (cs_index >= xs.size()) throw sw::InvalidArgument("--index outside the grid");
      const auto logs = sw::to_log(xs);
      const auto order = sw::RefinementOrder::from_N(cs_order);
      const double alpha = significance(cs_level);
      const auto estimate = sw::linear_estimate_log(logs, cs_j0, order);
      const sw::SpdMat center = sw::mat_exp(estimate[cs_index]);
      json out;
      if (cs_type == "asym") {
        std::optional<sw::CovTensor> c;
        if (!cs_cov.empty()) {
          const auto rows = sw::read_json_file(cs_cov).get<std::vector<std::vector<double>>>();
          std::vector<double> flat;
          for (const auto& r : rows) {
            if (r.size() != rows.size()) throw sw::InvalidArgument("--cov must be a square array of rows");
            flat.insert(flat.end(), r.begin(), r.end());
          }
          c = sw::CovTensor::from_eta_matrix(sw::Matrix::from_rows(rows.size(), rows.size(), flat));
        } else if (cs_noise.complete()) {
          c = cs_noise.resolve("").cov();
        } else {
          throw sw::InvalidArgument("asym needs --cov or all of --sigma11/--sigma22/--sigma12");
        }
        const int J = sw::dyadic_scale(xs.size());
        out = sw::to_json(sw::asymptotic_cs(center, estimate[cs_index], *c, J, cs_j0, cs_order, alpha,
                                            sw::kappa(cs_order)));
      } else {
        if (!cs_seed) throw sw::InvalidArgument("boot needs --seed");
        sw::BootstrapConfig bc{cs_j0star.value_or(cs_j0), cs_j0, order, cs_B, sw::Multiplier::gaussian,
                               *cs_seed, {1}, threads};
        const auto boot = sw::wild_bootstrap_log(logs, bc);
        std::vector<sw::SymMat> at_k;
        for (const auto& r : boot.replicates) at_k.push_back(r[cs_index]);
        out = sw::to_json(sw::bootstrap_ball_log(center, estimate[cs_index], at_k, alpha), alpha);
      }
      out["index"] = cs_index;
      out["level"] = cs_level;
      emit(cs_out, out.dump(1) + "\n");
    } else if (cov->parsed()) {
      sw::StudyConfig c = sw::StudyConfig::reference(cov_curve, 0);
      bool seeded = false;
      if (!cov_config.empty()) {
        const auto j = sw::read_json_file(cov_config);
        seeded = j.contains("seed");
        c = sw::config_from_json(j, c);
      }
      if (cov_seed) {
        c.seed = *cov_seed;
        seeded = true;
      }
      if (!seeded) throw sw::InvalidArgument("coverage needs --seed (or a seed in --config)");
      if (cov_J) c.J = *cov_J;
      if (cov_j0) c.J0 = c.J0_star = *cov_j0;
      if (cov_j0star) c.J0_star = *cov_j0star;
      if (cov_order) c.N = *cov_order;
      if (cov_B) c.B = *cov_B;
      if (cov_K) c.K = *cov_K;
      if (cov_trim) c.boundary_trim = *cov_trim;
      if (!cov_levels.empty()) c.levels = cov_levels;
      if (cov_vsamples) c.volume_samples = *cov_vsamples;
      if (cov_stride) c.volume_stride = *cov_stride;
      if (cov_novol) c.volumes = false;
      if (!cov_mult.empty()) c.multiplier = sw::multiplier_from_string(cov_mult);
      c.noise = cov_noise.resolve(c.curve.id);
      c.threads = threads;
      const auto rep = sw::coverage_study(c);
      emit(cov_out, sw::study_summary_csv(rep));
      if (!cov_json.empty()) sw::write_text_file(cov_json, sw::study_to_json(rep).dump(1) + "\n");
      if (!cov_points.empty()) sw::write_text_file(cov_points, sw::study_points_csv(rep));
    } else if (kap->parsed()) {
      const auto t = sw::build_transition(sw::RefinementOrder::from_N(kap_order));
      std::printf("N,kappa\n%d,%.17g\n", kap_order, t.kappa);
      std::cout << sw::matrix_csv(t.E_inf);
    } else if (clt->parsed()) {
      if (clt_noise.complete()) clt_cfg.cov = clt_noise.resolve("").cov();
      clt_cfg.threads = threads;
      const auto r = sw::clt_check(clt_cfg);
      json out{{"k", r.k},
               {"R", r.R},
               {"kappa", r.kappa},
               {"kappa_factor", r.kappa_factor},
               {"exact_factor", r.exact_factor},
               {"rel_error", r.rel_error},
               {"ks_statistic", r.ks_statistic},
               {"ks_pvalue", r.ks_pvalue},
               {"empirical", sw::to_json(r.empirical)},
               {"predicted", sw::to_json(r.predicted)},
               {"seed", clt_cfg.seed},
               {"rng", sw::kRngAlgorithm}};
      std::cout << out.dump(1) << "\n";
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "spdwave: %s\n", e.what());
    return 1;
  }
  return 0;
}
