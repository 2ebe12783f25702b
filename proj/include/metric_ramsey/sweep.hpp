// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "metric_ramsey/extract.hpp"
#include "metric_ramsey/instances.hpp"
#include "metric_ramsey/io.hpp"

namespace mr {

/// Sweep grid: instances x alphas x operations. `timing` opts into real
/// runtimes in the runtime_ms column; the default writes 0 there so the
/// artifact stays byte-identical across reruns.
struct SweepConfig {
  std::vector<InstanceSpec> instances;
  std::vector<double> alphas;
  std::vector<std::string> operations{"extract"};  // extract | equilateral | small-alpha | oracle
  bool exact_mode = false;
  bool timing = false;
};

struct SweepRecord {
  std::string family;
  int n = 0;
  double alpha = 0;
  int subset_size = 0;
  double distortion_verified = 0;
  double psi_claimed = 0;
  double exponent_measured = 0;
  std::uint64_t seed = 0;
  long runtime_ms = 0;
  std::string error;
};

/// Error text cleaned up for a CSV cell.
inline std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

inline SweepConfig sweep_config_from_json(const Json& j) {
  SweepConfig c;
  for (const auto& e : j.at("instances")) c.instances.push_back(instance_spec_from_json(e));
  c.alphas = j.at("alphas").get<std::vector<double>>();
  if (j.contains("operations")) c.operations = j["operations"].get<std::vector<std::string>>();
  c.exact_mode = j.value("exact", false);
  c.timing = j.value("timing", false);
  require(!c.instances.empty() && !c.alphas.empty() && !c.operations.empty(), Err::BadFormat,
          "sweep grid must be nonempty");
  return c;
}

inline Json sweep_config_to_json(const SweepConfig& c) {
  Json j;
  Json inst = Json::array();
  for (const auto& s : c.instances) inst.push_back(instance_spec_to_json(s));
  j["instances"] = std::move(inst);
  j["alphas"] = c.alphas;
  j["operations"] = c.operations;
  j["exact"] = c.exact_mode;
  j["timing"] = c.timing;
  return j;
}

inline FiniteMetric instantiate_metric(const InstanceSpec& spec) {
  auto geti = [&](const char* key, int dflt) {
    auto it = spec.params.find(key);
    return it == spec.params.end() ? dflt : static_cast<int>(it->second);
  };
  if (spec.family == "hypercube") return gen_hypercube(geti("d", 3)).metric();
  if (spec.family == "random_regular")
    return shortest_path_metric(gen_random_regular(geti("n", 16), geti("d", 3), spec.seed));
  if (spec.family == "high_girth_dense")
    return shortest_path_metric(gen_high_girth_dense(geti("n", 64), geti("g", 4), spec.seed));
  if (spec.family == "gv_code") {
    int d = geti("d", 8);
    return hamming_metric(gv_code(d, geti("min_dist", 2)), d);
  }
  return gen_misc(spec.family, geti("n", 8), spec.seed);
}

inline std::vector<SweepRecord> run_sweep_records(const SweepConfig& cfg) {
  std::vector<SweepRecord> rows;
  for (const auto& spec : cfg.instances) {
    FiniteMetric X;
    std::string gen_error;
    try {
      X = instantiate_metric(spec);
      if (cfg.exact_mode) X = X.with_exact();
    } catch (const std::exception& e) {
      gen_error = e.what();
    }
    for (double alpha : cfg.alphas) {
      for (const auto& op : cfg.operations) {
        SweepRecord r;
        r.family = spec.family;
        r.n = X.n();
        r.alpha = alpha;
        r.seed = spec.seed;
        if (!gen_error.empty()) {
          r.error = gen_error;
          rows.push_back(std::move(r));
          continue;
        }
        auto t0 = std::chrono::steady_clock::now();
        try {
          if (op == "extract") {
            auto res = ramsey_extract(X, alpha);
            r.subset_size = res.subset.size();
            r.distortion_verified = res.report.distortion;
            r.psi_claimed = res.psi;
            if (!res.warning.empty()) r.error = "warning:AlphaAtMostTwo";
          } else if (op == "equilateral") {
            PointSubset s = equilateral_extract(X, alpha);
            r.subset_size = s.size();
            FiniteMetric Xs = X.restrict(s.indices);
            r.distortion_verified = aspect_ratio(Xs);
            r.psi_claimed = 0;
          } else if (op == "small-alpha") {
            require(alpha > 2 && alpha < 3, Err::InvalidParameters,
                    "small-alpha op expects alpha in (2,3)");
            auto res = small_alpha_extract(X, alpha - 2);
            r.subset_size = res.subset.size();
            r.distortion_verified = res.report.distortion;
            r.psi_claimed = res.psi;
          } else if (op == "oracle") {
            PointSubset s = exact_ramsey_oracle(X, alpha, RamseyTarget::UM);
            r.subset_size = s.size();
            auto sub = subdominant_ultrametric(X.restrict(s.indices));
            r.distortion_verified = sub.c_um;
            r.psi_claimed = 0;
          } else {
            fail(Err::BadFormat, "unknown sweep operation: " + op);
          }
          r.exponent_measured =
              X.n() > 1 && r.subset_size > 0
                  ? std::log(static_cast<double>(r.subset_size)) / std::log(X.n())
                  : 1.0;
        } catch (const std::exception& e) {
          r.error = e.what();
        }
        if (cfg.timing)
          r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        rows.push_back(std::move(r));
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (a.family != b.family) return a.family < b.family;
    if (a.n != b.n) return a.n < b.n;
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    return a.seed < b.seed;
  });
  return rows;
}

/// CSV artifact with the fixed header; '#'-prefixed first line embeds the
/// full config. '.' decimal point, 17 significant digits.
inline std::string run_sweep(const SweepConfig& cfg) {
  std::ostringstream out;
  out << "# config " << sweep_config_to_json(cfg).dump() << "\n";
  out << "family,n,alpha,subset_size,distortion_verified,psi_claimed,exponent_measured,seed,"
         "runtime_ms,error\n";
  for (const auto& r : run_sweep_records(cfg)) {
    out << r.family << ',' << r.n << ',' << fmt17(r.alpha) << ',' << r.subset_size << ','
        << fmt17(r.distortion_verified) << ',' << fmt17(r.psi_claimed) << ','
        << fmt17(r.exponent_measured) << ',' << r.seed << ',' << r.runtime_ms << ',' << csv_safe(r.error) << "\n";
  }
  return out.str();
}

}  // namespace mr
