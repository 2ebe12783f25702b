// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/graph.hpp"
#include "metric_ramsey/numeric.hpp"

namespace mr {

enum class DriftMode { Exact, Sampled };

/// Expected graph distance E[d(Z_s, Z_0)] of the canonical random walk
/// started from the stationary distribution pi_v = deg(v) / (2|E|).
/// Exact mode evaluates the s-step distribution by repeated sparse
/// matrix-vector products per start vertex (O(n s |E|)); sampled mode is a
/// seeded Monte Carlo estimate.
inline double markov_drift(const Graph& g, int s, DriftMode mode = DriftMode::Exact,
                           long trials = 100000, std::uint64_t seed = 0) {
  require(s >= 1, Err::InvalidParameters, "s must be >= 1");
  require(g.connected(), Err::DisconnectedGraph, "walk needs a connected graph");
  const int n = g.n();
  const double m2 = 2.0 * g.m();
  if (mode == DriftMode::Exact) {
    require(static_cast<double>(n) * s * g.m() <= 2e9, Err::StateSpaceTooLarge,
            "n * s * |E| too large for the exact mode");
    double total = 0;
    std::vector<double> cur(n), nxt(n);
    for (int v = 0; v < n; ++v) {
      std::fill(cur.begin(), cur.end(), 0.0);
      cur[v] = 1.0;
      for (int step = 0; step < s; ++step) {
        std::fill(nxt.begin(), nxt.end(), 0.0);
        for (int u = 0; u < n; ++u) {
          if (cur[u] == 0) continue;
          double share = cur[u] / g.degree(u);
          for (int w : g.neighbors(u)) nxt[w] += share;
        }
        cur.swap(nxt);
      }
      auto dist = g.bfs(v);
      double ev = 0;
      for (int u = 0; u < n; ++u) ev += cur[u] * dist[u];
      total += (g.degree(v) / m2) * ev;
    }
    return total;
  }
  Rng rng(seed);
  // stationary start by degree weighting
  std::vector<double> acc(n);
  double run = 0;
  for (int v = 0; v < n; ++v) {
    run += g.degree(v) / m2;
    acc[v] = run;
  }
  double sum = 0;
  for (long t = 0; t < trials; ++t) {
    double r = rng.uniform();
    int v0 = static_cast<int>(std::lower_bound(acc.begin(), acc.end(), r) - acc.begin());
    if (v0 >= n) v0 = n - 1;
    int v = v0;
    for (int step = 0; step < s; ++step) {
      const auto& nb = g.neighbors(v);
      v = nb[rng.below(nb.size())];
    }
    sum += g.bfs(v0)[v];
  }
  return sum / trials;
}

}  // namespace mr
