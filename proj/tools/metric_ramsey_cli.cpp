// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line surface: validation, instance generation, extraction,
// certificates and reproducible sweeps. Exit codes: 0 success, 1 domain
// error (message names the error enum), 2 usage error.

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <string>

#include "metric_ramsey/extract.hpp"
#include "metric_ramsey/instances.hpp"
#include "metric_ramsey/io.hpp"
#include "metric_ramsey/krawtchouk.hpp"
#include "metric_ramsey/markov.hpp"
#include "metric_ramsey/oracle.hpp"
#include "metric_ramsey/spectral.hpp"
#include "metric_ramsey/sweep.hpp"

namespace {

bool exact_mode_env() {
  const char* v = std::getenv("METRIC_RAMSEY_EXACT");
  return v != nullptr && std::string(v) == "1";
}

mr::FiniteMetric load_metric(const std::string& path, bool exact) {
  return mr::metric_from_json(mr::read_json_file(path), exact);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metric-ramsey: constructive metric Ramsey extraction and bound certificates"};
  app.require_subcommand(1);

  std::string in_path, out_path, config_path, family = "random_metric";
  double alpha = 4.0, epsilon = 0.5, k_target = 1.0, s_param = 2, min_dist = 2, p_param = 2;
  int n_param = 8, d_param = 3, g_param = 4, cap_n = 15;
  std::uint64_t seed = 0;
  bool exact = exact_mode_env();
  bool timing = false;

  auto add_io = [&](CLI::App* cmd, bool need_in = true) {
    if (need_in) cmd->add_option("--in", in_path, "input JSON")->required();
    cmd->add_option("--out", out_path, "output path");
    cmd->add_flag("--exact", exact, "exact-rational checking mode");
  };

  auto* validate = app.add_subcommand("validate", "validate a metric JSON file");
  validate->add_option("input", in_path, "metric JSON")->required();
  validate->add_flag("--exact", exact, "exact-rational checking mode");

  auto* gen = app.add_subcommand("gen", "generate a seeded instance (spec + data)");
  gen->add_option("--family", family,
                  "hypercube|random_regular|high_girth_dense|gv_code|cycle|path|complete|"
                  "equilateral|random_metric|composed");
  gen->add_option("--n", n_param, "point / vertex count");
  gen->add_option("--d", d_param, "degree or cube dimension");
  gen->add_option("--g", g_param, "girth target");
  gen->add_option("--min-dist", min_dist, "GV code minimum distance");
  gen->add_option("--seed", seed, "64-bit seed");
  gen->add_option("--out", out_path, "output JSON")->required();
  gen->add_flag("--exact", exact, "serialize distances as exact decimal strings");

  auto* extract = app.add_subcommand("extract", "extract a low-distortion ultrametric subset");
  add_io(extract);
  extract->add_option("--alpha", alpha, "target distortion")->required();

  auto* equilateral = app.add_subcommand("equilateral", "greedy equilateral net extraction");
  add_io(equilateral);
  equilateral->add_option("--alpha", alpha, "target distortion")->required();

  auto* smalla = app.add_subcommand("small-alpha", "2+eps extraction into a k-HST");
  add_io(smalla);
  smalla->add_option("--epsilon", epsilon, "eps in (0,1)")->required();
  smalla->add_option("--k", k_target, "target HST separation (>= 1)");
  double theta = 64.0;
  smalla->add_option("--theta", theta, "constant-extraction stage tunable");

  auto* embedl2 = app.add_subcommand("embed-l2", "isometric l2 coordinates of an HST");
  add_io(embedl2);

  auto* oracle = app.add_subcommand("oracle", "brute-force Ramsey oracle (small n)");
  add_io(oracle);
  oracle->add_option("--alpha", alpha, "target distortion")->required();
  std::string target = "um";
  oracle->add_option("--target", target, "um | eq");
  oracle->add_option("--cap-n", cap_n, "instance size cap");

  auto* bounds = app.add_subcommand("bounds", "spectral / mixing / drift certificates for a graph");
  add_io(bounds);
  bounds->add_option("--s", s_param, "markov drift steps");
  bounds->add_option("--p", p_param, "Poincare exponent");
  bounds->add_option("--seed", seed, "seed for the sampled certificates");

  auto* sweep = app.add_subcommand("sweep", "run a sweep config, emit CSV");
  sweep->add_option("--config", config_path, "sweep config JSON")->required();
  sweep->add_option("--out", out_path, "output CSV")->required();
  sweep->add_flag("--timing", timing, "record real runtimes (breaks byte determinism)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto emit = [&](const mr::Json& j) {
    if (out_path.empty())
      std::cout << j.dump(2) << "\n";
    else
      mr::write_json_file(out_path, j);
  };

  try {
    if (*validate) {
      mr::FiniteMetric m = load_metric(in_path, exact);
      std::cout << "valid metric: n=" << m.n() << " diam=" << mr::fmt17(m.diameter())
                << " aspect=" << mr::fmt17(mr::aspect_ratio(m)) << "\n";
    } else if (*gen) {
      mr::InstanceSpec spec;
      spec.family = family;
      spec.seed = seed;
      mr::Json j;
      if (family == "hypercube") {
        spec.params["d"] = d_param;
        auto inst = mr::gen_hypercube(d_param);
        j["graph"] = mr::graph_to_json(inst.graph);
        if (d_param <= 12) j["metric"] = mr::metric_to_json(inst.metric(), exact);
      } else if (family == "random_regular") {
        spec.params["n"] = n_param;
        spec.params["d"] = d_param;
        auto g = mr::gen_random_regular(n_param, d_param, seed);
        j["graph"] = mr::graph_to_json(g);
        j["metric"] = mr::metric_to_json(mr::shortest_path_metric(g), exact);
      } else if (family == "high_girth_dense") {
        spec.params["n"] = n_param;
        spec.params["g"] = g_param;
        auto g = mr::gen_high_girth_dense(n_param, g_param, seed);
        j["graph"] = mr::graph_to_json(g);
        j["girth"] = g.girth();
      } else if (family == "gv_code") {
        spec.params["d"] = d_param;
        spec.params["min_dist"] = min_dist;
        auto code = mr::gv_code(d_param, static_cast<int>(min_dist));
        j["code"] = code;
        j["metric"] = mr::metric_to_json(mr::hamming_metric(code, d_param), exact);
      } else {
        spec.params["n"] = n_param;
        mr::FiniteMetric m = mr::gen_misc(family, n_param, seed);
        if (exact) m = m.with_exact();
        j["metric"] = mr::metric_to_json(m, exact);
      }
      j["spec"] = mr::instance_spec_to_json(spec);
      emit(j);
    } else if (*extract) {
      mr::FiniteMetric X = load_metric(in_path, exact);
      auto r = mr::ramsey_extract(X, alpha);
      mr::Json j = mr::extraction_to_json(r);
      j["alpha"] = alpha;
      emit(j);
      if (!r.warning.empty()) std::cerr << "warning: " << r.warning << "\n";
    } else if (*equilateral) {
      mr::FiniteMetric X = load_metric(in_path, exact);
      auto s = mr::equilateral_extract(X, alpha);
      mr::Json j = mr::subset_to_json(s);
      j["alpha"] = alpha;
      j["aspect_ratio"] = mr::aspect_ratio(X.restrict(s.indices));
      emit(j);
    } else if (*smalla) {
      mr::FiniteMetric X = load_metric(in_path, exact);
      auto r = mr::small_alpha_extract(X, epsilon, k_target, theta);
      mr::Json j = mr::extraction_to_json(r);
      j["epsilon"] = epsilon;
      j["k"] = k_target;
      j["theta"] = theta;
      emit(j);
    } else if (*embedl2) {
      mr::HstTree t = mr::hst_from_json(mr::read_json_file(in_path));
      auto pts = mr::embed_l2(t);
      mr::FiniteMetric tm = t.metric();
      double worst = 0;
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t k = i + 1; k < pts.size(); ++k) {
          double got = mr::l2_dist(pts[i], pts[k]);
          double want = tm.d(static_cast<int>(i), static_cast<int>(k));
          worst = std::max(worst, std::abs(got - want) / want);
        }
      mr::Json j;
      j["coordinates"] = pts;
      j["max_relative_error"] = worst;
      emit(j);
    } else if (*oracle) {
      mr::FiniteMetric X = load_metric(in_path, exact);
      auto tgt = target == "eq" ? mr::RamseyTarget::EQ : mr::RamseyTarget::UM;
      auto s = mr::exact_ramsey_oracle(X, alpha, tgt, cap_n);
      mr::Json j = mr::subset_to_json(s);
      j["alpha"] = alpha;
      j["target"] = target;
      emit(j);
    } else if (*bounds) {
      mr::Graph g = mr::graph_from_json(mr::read_json_file(in_path));
      mr::Json j;
      auto prof = mr::spectral_profile(g);
      j["n"] = g.n();
      j["degree"] = prof.d;
      j["gamma"] = prof.gamma;
      j["gamma_plus"] = prof.gamma_plus;
      j["lambda_min"] = prof.lambda_min;
      j["girth"] = g.girth();
      if (g.connected()) {
        int diam = g.diameter();
        j["diameter"] = diam;
        if (prof.gamma_plus < 1) {
          double bound = std::log(g.n()) / std::log(1.0 / prof.gamma_plus) + 1;
          j["diameter_bound"] = bound;
          j["diameter_bound_holds"] = diam <= bound + 1e-9;
        }
        int s = std::min<int>(static_cast<int>(s_param), diam);
        j["markov_drift_s"] = s;
        j["markov_drift"] = mr::markov_drift(g, s);
        j["markov_drift_lower"] = s * (prof.d - 2.0) / prof.d;
      }
      j["self_mixing_spectral"] = mr::self_mixing(g, mr::SelfMixingMode::Spectral);
      if (g.n() <= 20) j["self_mixing_exact"] = mr::self_mixing(g, mr::SelfMixingMode::Exact);
      // sampled Poincare certificate at p
      std::vector<int> all(g.n());
      std::iota(all.begin(), all.end(), 0);
      mr::Rng rng(seed);
      std::vector<std::vector<double>> f(g.n(), std::vector<double>(8));
      for (auto& row : f)
        for (auto& x : row) x = rng.gaussian();
      auto cert = mr::poincare_check(g, all, f, p_param, /*enforce_precondition=*/false);
      j["poincare"] = {{"p", p_param},
                       {"C_size", static_cast<int>(cert.C.size())},
                       {"lhs", cert.lhs},
                       {"rhs", cert.rhs},
                       {"ratio", cert.ratio},
                       {"valid", cert.valid}};
      emit(j);
    } else if (*sweep) {
      auto cfg = mr::sweep_config_from_json(mr::read_json_file(config_path));
      if (timing) cfg.timing = true;
      mr::write_text_file(out_path, mr::run_sweep(cfg));
    }
  } catch (const mr::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
