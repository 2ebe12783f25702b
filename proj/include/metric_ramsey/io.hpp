// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/extract.hpp"
#include "metric_ramsey/graph.hpp"
#include "metric_ramsey/hst.hpp"
#include "metric_ramsey/instances.hpp"
#include "metric_ramsey/metric.hpp"

namespace mr {

using Json = nlohmann::json;  // ordered by key: deterministic output

// --------------------------------------------------------------------
// exact decimal strings
// --------------------------------------------------------------------

/// Decimal digit string -> integer (cpp_int's own parser would read a
/// leading zero as an octal prefix).
inline BigInt bigint_from_decimal(const std::string& s) {
  BigInt v = 0;
  bool neg = false;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
  require(i < s.size(), Err::BadFormat, "empty integer: " + s);
  for (; i < s.size(); ++i) {
    require(s[i] >= '0' && s[i] <= '9', Err::BadFormat, "bad integer: " + s);
    v = v * 10 + (s[i] - '0');
  }
  return neg ? -v : v;
}

/// Parses a decimal string ("-12.5", "3", "1e-3") or a fraction ("p/q")
/// into an exact rational.
inline Rat rat_from_string(const std::string& s) {
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt num = bigint_from_decimal(s.substr(0, slash));
    BigInt den = bigint_from_decimal(s.substr(slash + 1));
    require(den != 0, Err::BadFormat, "zero denominator in " + s);
    return Rat(num) / Rat(den);
  }
  std::string t = s;
  bool neg = false;
  std::size_t pos = 0;
  if (pos < t.size() && (t[pos] == '+' || t[pos] == '-')) neg = t[pos++] == '-';
  std::string digits;
  long frac_digits = 0, exponent = 0;
  bool seen_dot = false;
  for (; pos < t.size(); ++pos) {
    char c = t[pos];
    if (c == '.') {
      require(!seen_dot, Err::BadFormat, "two dots in " + s);
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      exponent = std::stol(t.substr(pos + 1));
      break;
    } else if (c >= '0' && c <= '9') {
      digits += c;
      if (seen_dot) ++frac_digits;
    } else {
      fail(Err::BadFormat, "bad decimal: " + s);
    }
  }
  require(!digits.empty(), Err::BadFormat, "bad decimal: " + s);
  Rat r = Rat(bigint_from_decimal(digits));
  long shift = exponent - frac_digits;
  BigInt ten = 10;
  BigInt p = 1;
  for (long i = 0; i < std::abs(shift); ++i) p *= ten;
  if (shift >= 0)
    r *= Rat(p);
  else
    r /= Rat(p);
  return neg ? -r : r;
}

/// Exact rational to string: finite decimal when the denominator is
/// 2^a 5^b, otherwise "p/q".
inline std::string rat_to_string(const Rat& r) {
  BigInt num = numerator(r), den = denominator(r);
  BigInt d = den;
  long twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return num.str() + "/" + den.str();
  long k = std::max(twos, fives);
  BigInt scale = 1;
  for (long i = 0; i < k - twos; ++i) scale *= 2;
  for (long i = 0; i < k - fives; ++i) scale *= 5;
  BigInt mant = num * scale;  // value = mant / 10^k
  bool neg = mant < 0;
  if (neg) mant = -mant;
  std::string digits = mant.str();
  std::string out;
  if (k == 0) {
    out = digits;
  } else {
    while (static_cast<long>(digits.size()) <= k) digits.insert(digits.begin(), '0');
    out = digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  return neg ? "-" + out : out;
}

// --------------------------------------------------------------------
// metric / subset / graph
// --------------------------------------------------------------------

inline Json metric_to_json(const FiniteMetric& m, bool exact_strings = false) {
  Json j;
  j["n"] = m.n();
  j["labels"] = m.labels();
  Json rows = Json::array();
  for (int i = 0; i < m.n(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < m.n(); ++k) {
      if (exact_strings && m.has_exact())
        row.push_back(rat_to_string(m.dx(i, k)));
      else
        row.push_back(m.d(i, k));
    }
    rows.push_back(std::move(row));
  }
  j["d"] = std::move(rows);
  return j;
}

inline FiniteMetric metric_from_json(const Json& j, bool want_exact = false) {
  require(j.contains("d"), Err::BadFormat, "metric JSON needs a 'd' matrix");
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
  const auto& rows = j["d"];
  bool strings = !rows.empty() && !rows[0].empty() && rows[0][0].is_string();
  if (strings || want_exact) {
    std::vector<std::vector<Rat>> d;
    for (const auto& row : rows) {
      std::vector<Rat> r;
      for (const auto& v : row)
        r.push_back(v.is_string() ? rat_from_string(v.get<std::string>())
                                  : rat_of_double(v.get<double>()));
      d.push_back(std::move(r));
    }
    return FiniteMetric::build_exact(std::move(d), std::move(labels));
  }
  std::vector<std::vector<double>> d;
  for (const auto& row : rows) d.push_back(row.get<std::vector<double>>());
  return FiniteMetric::build(std::move(d), std::move(labels));
}

inline Json subset_to_json(const PointSubset& s) { return Json{{"indices", s.indices}}; }

inline Json graph_to_json(const Graph& g) {
  Json j;
  j["n"] = g.n();
  Json es = Json::array();
  for (auto [u, v] : g.edges()) es.push_back(Json::array({u, v}));
  j["edges"] = std::move(es);
  return j;
}

inline Graph graph_from_json(const Json& j) {
  require(j.contains("n") && j.contains("edges"), Err::BadFormat, "graph JSON needs n and edges");
  std::vector<std::pair<int, int>> es;
  for (const auto& e : j["edges"]) es.emplace_back(e[0].get<int>(), e[1].get<int>());
  return Graph(j["n"].get<int>(), std::move(es));
}

// --------------------------------------------------------------------
// HST trees
// --------------------------------------------------------------------

inline Json hst_node_to_json(const HstTree& t, int v) {
  const auto& nd = t.node(v);
  if (nd.is_leaf()) return Json{{"leaf", nd.leaf_id}};
  Json j;
  j["delta"] = nd.delta;
  Json kids = Json::array();
  for (int c : nd.children) kids.push_back(hst_node_to_json(t, c));
  j["children"] = std::move(kids);
  return j;
}

inline Json hst_to_json(const HstTree& t) {
  Json j;
  j["k"] = t.k();
  j["exact"] = t.exact();
  j["root"] = hst_node_to_json(t, t.root());
  return j;
}

inline int hst_node_from_json(const Json& j, HstTree& t) {
  if (j.contains("leaf")) return t.add_leaf(j["leaf"].get<int>());
  require(j.contains("delta") && j.contains("children"), Err::BadFormat,
          "HST node needs delta+children or leaf");
  std::vector<int> kids;
  for (const auto& c : j["children"]) kids.push_back(hst_node_from_json(c, t));
  return t.add_internal(j["delta"].get<double>(), std::move(kids));
}

inline HstTree hst_from_json(const Json& j) {
  HstTree t;
  int root = hst_node_from_json(j.at("root"), t);
  t.finalize(root, j.value("k", 1.0), j.value("exact", false));
  t.validate();
  return t;
}

// --------------------------------------------------------------------
// extraction results / instance specs
// --------------------------------------------------------------------

inline Json report_to_json(const EmbeddingReport& r) {
  Json j;
  j["expansion"] = r.expansion;
  j["contraction"] = r.contraction;
  j["distortion"] = r.distortion;
  j["expansion_witness"] = Json::array({r.expansion_witness.first, r.expansion_witness.second});
  j["contraction_witness"] =
      Json::array({r.contraction_witness.first, r.contraction_witness.second});
  if (r.exact()) {
    j["distortion_exact"] = rat_to_string(*r.distortion_exact);
    j["exact_verified"] = true;
  }
  return j;
}

inline Json extraction_to_json(const ExtractionResult& r) {
  Json j;
  j["subset"] = r.subset.indices;
  j["hst"] = hst_to_json(r.tree);
  j["distortion"] = report_to_json(r.report);
  j["psi"] = r.psi;
  j["weighted_lhs"] = r.weighted_lhs;
  j["weighted_rhs"] = r.weighted_rhs;
  Json trace = Json::array();
  for (const auto& s : r.trace) {
    Json e;
    e["op"] = s.op;
    e["alpha"] = s.alpha;
    e["psi"] = s.psi;
    e["in_size"] = s.in_size;
    e["out_size"] = s.out_size;
    e["distortion"] = s.distortion;
    if (!s.note.empty()) e["note"] = s.note;
    trace.push_back(std::move(e));
  }
  j["trace"] = std::move(trace);
  if (!r.warning.empty()) j["warning"] = r.warning;
  if (r.heuristic) j["heuristic_guarantee"] = true;
  return j;
}

inline Json instance_spec_to_json(const InstanceSpec& s) {
  Json j;
  j["family"] = s.family;
  j["params"] = s.params;
  j["seed"] = s.seed;
  j["generator"] = InstanceSpec::kGenerator;
  return j;
}

inline InstanceSpec instance_spec_from_json(const Json& j) {
  InstanceSpec s;
  s.family = j.at("family").get<std::string>();
  if (j.contains("params"))
    s.params = j["params"].get<std::map<std::string, double>>();
  s.seed = j.value("seed", 0ull);
  return s;
}

// --------------------------------------------------------------------
// files
// --------------------------------------------------------------------

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), Err::BadFormat, "cannot open " + path);
  Json j;
  in >> j;
  return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), Err::BadFormat, "cannot open " + path + " for writing");
  out << text;
}

inline void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace mr
