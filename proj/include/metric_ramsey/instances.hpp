// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "metric_ramsey/composition.hpp"
#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/graph.hpp"
#include "metric_ramsey/metric.hpp"
#include "metric_ramsey/numeric.hpp"

namespace mr {

/// Seeded generator description; equal specs generate identical instances.
struct InstanceSpec {
  std::string family;  // hypercube | random_regular | high_girth_dense | gv_code |
                       // cycle | path | complete | equilateral | random_metric | composed
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  static constexpr const char* kGenerator = "splitmix64";
};

/// Hamming cube graph on 2^d vertices. The shortest-path (= Hamming) metric
/// is materialized only for d <= 12; beyond that only the graph is usable.
struct HypercubeInstance {
  Graph graph;
  int d = 0;
  FiniteMetric metric() const {
    require(d <= 12, Err::InstanceTooLarge,
            "hypercube metric materialized only for d <= 12 (n^2 entries)");
    return shortest_path_metric(graph);
  }
};

inline HypercubeInstance gen_hypercube(int d) {
  require(d >= 1 && d <= 16, Err::DTooLarge, "need 1 <= d <= 16");
  const int n = 1 << d;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n) * d / 2);
  for (int v = 0; v < n; ++v)
    for (int b = 0; b < d; ++b) {
      int u = v ^ (1 << b);
      if (u > v) edges.emplace_back(v, u);
    }
  return {Graph(n, std::move(edges)), d};
}

/// Simple d-regular graph via the configuration model with rejection.
inline Graph gen_random_regular(int n, int d, std::uint64_t seed) {
  require(d >= 3, Err::InfeasibleDegree, "d must be >= 3");
  require(n > d, Err::InfeasibleDegree, "need n > d");
  require((static_cast<long>(n) * d) % 2 == 0, Err::InfeasibleDegree, "n*d must be even");
  const int attempts = 4000;
  for (int att = 0; att < attempts; ++att) {
    Rng rng(seed, static_cast<std::uint64_t>(att));
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * d);
    for (int v = 0; v < n; ++v)
      for (int i = 0; i < d; ++i) stubs.push_back(v);
    // Fisher-Yates pairing
    for (std::size_t i = stubs.size(); i > 1; --i)
      std::swap(stubs[i - 1], stubs[rng.below(i)]);
    std::vector<std::pair<int, int>> edges;
    bool ok = true;
    std::vector<std::vector<char>> seen(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i + 1 < stubs.size() && ok; i += 2) {
      int u = stubs[i], v = stubs[i + 1];
      if (u == v || seen[u][v]) ok = false;
      seen[u][v] = seen[v][u] = 1;
      edges.emplace_back(u, v);
    }
    if (ok) return Graph(n, std::move(edges));
  }
  fail(Err::RejectionLimit, "no simple pairing found after " + std::to_string(attempts) +
                                " attempts for n=" + std::to_string(n) +
                                " d=" + std::to_string(d));
}

/// Sparse random graph of girth >= g on at least N/2 vertices: sample
/// G(N, p) with p = 2 N^(-1 + 1/(2g)), then delete one vertex from each
/// short cycle. Retries with derived seeds when too many vertices fall.
inline Graph gen_high_girth_dense(int N, int g, std::uint64_t seed) {
  require(g >= 3, Err::InvalidParameters, "girth target must be >= 3");
  require(N >= 8, Err::InvalidParameters, "N too small");
  const double eta = 1.0 / (4.0 * g);
  const double p = 2.0 * std::pow(static_cast<double>(N), -1.0 + 2 * eta);
  // expected short-cycle count sum_i (pN)^i / (2i) must stay below N/4
  double expected = 0, pn = p * N;
  for (int i = 3; i < g; ++i) expected += std::pow(pn, i) / (2.0 * i);
  require(expected < N / 4.0, Err::InvalidParameters,
          "expected short-cycle count " + fmt17(expected) + " >= N/4; raise N");
  const int retries = 64;
  for (int att = 0; att < retries; ++att) {
    Rng rng(seed, 1000 + static_cast<std::uint64_t>(att));
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < N; ++u)
      for (int v = u + 1; v < N; ++v)
        if (rng.uniform() < p) edges.emplace_back(u, v);
    Graph G(N, std::move(edges));
    // break every cycle shorter than g
    int removed = 0;
    while (true) {
      std::vector<int> cycle;
      if (G.girth(&cycle) >= g) break;
      // drop the smallest-labelled vertex of the witness cycle
      int victim = *std::min_element(cycle.begin(), cycle.end());
      std::vector<int> keep;
      for (int i = 0; i < G.n(); ++i)
        if (i != victim) keep.push_back(i);
      G = G.induced(keep);
      if (++removed > N / 2) break;
    }
    if (removed <= N / 2 && G.girth() >= g) return G;
  }
  fail(Err::RetryLimitExceeded, "cycle breaking kept removing more than N/2 vertices");
}

/// Greedy lexicographic binary code of minimum Hamming distance min_dist on
/// the d-cube (the Gilbert-Varshamov construction).
inline std::vector<int> gv_code(int d, int min_dist) {
  require(d >= 1 && d <= 24, Err::DTooLarge, "need 1 <= d <= 24");
  require(min_dist >= 1 && min_dist <= d, Err::OutOfRange, "need 1 <= min_dist <= d");
  std::vector<int> code;
  const int n = 1 << d;
  for (int x = 0; x < n; ++x) {
    bool ok = true;
    for (int c : code)
      if (__builtin_popcount(static_cast<unsigned>(x ^ c)) < min_dist) {
        ok = false;
        break;
      }
    if (ok) code.push_back(x);
  }
  return code;
}

/// Hamming metric restricted to a set of cube points.
inline FiniteMetric hamming_metric(const std::vector<int>& words, int d) {
  const int n = static_cast<int>(words.size());
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) {
    std::string s;
    for (int b = d - 1; b >= 0; --b) s += ((words[i] >> b) & 1) ? '1' : '0';
    labels[i] = s;
    for (int j = i + 1; j < n; ++j)
      dist[i][j] = dist[j][i] =
          __builtin_popcount(static_cast<unsigned>(words[i] ^ words[j]));
  }
  return FiniteMetric::build(std::move(dist), std::move(labels), false);
}

/// Miscellaneous metric families (cycle / path / complete / equilateral /
/// random shortest-path closures / a two-level composed example).
inline FiniteMetric gen_misc(const std::string& family, int n, std::uint64_t seed) {
  require(n >= 1, Err::InvalidParameters, "n must be >= 1");
  if (family == "path" || family == "cycle") {
    std::vector<std::pair<int, int>> es;
    for (int i = 0; i + 1 < n; ++i) es.emplace_back(i, i + 1);
    if (family == "cycle" && n >= 3) es.emplace_back(n - 1, 0);
    return shortest_path_metric(Graph(n, std::move(es)));
  }
  if (family == "complete" || family == "equilateral") {
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 1.0));
    for (int i = 0; i < n; ++i) d[i][i] = 0;
    return FiniteMetric::build(std::move(d), {}, false);
  }
  if (family == "random_metric") {
    Rng rng(seed);
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) w[i][j] = w[j][i] = rng.uniform() + 1e-3;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) w[i][j] = std::min(w[i][j], w[i][k] + w[k][j]);
    for (int i = 0; i < n; ++i) w[i][i] = 0;
    return FiniteMetric::build(std::move(w), {}, false);
  }
  if (family == "composed") {
    // beta-composition of a random outer metric with random blocks
    require(n >= 3, Err::InvalidParameters, "composed family needs n >= 3");
    int m = std::max(2, n / 4);
    if (m >= n) m = n - 1;
    CompositionSpec spec;
    spec.outer = gen_misc("random_metric", m, Rng::mix(seed));
    spec.beta = 2.0;
    int base = n / m, extra = n % m;
    for (int z = 0; z < m; ++z) {
      int bn = base + (z < extra ? 1 : 0);
      spec.blocks.push_back(gen_misc("random_metric", bn, Rng::mix(seed + 17 * (z + 1))));
    }
    return metric_composition(spec);
  }
  fail(Err::BadFormat, "unknown metric family: " + family);
}

}  // namespace mr
