// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/metric.hpp"

namespace mr {

/// Unweighted simple graph with cached adjacency lists. Immutable after
/// construction.
class Graph {
 public:
  Graph() = default;
  Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n), adj_(n) {
    for (auto& [u, v] : edges) {
      require(u >= 0 && u < n && v >= 0 && v < n, Err::OutOfRange, "edge endpoint out of range");
      require(u != v, Err::BadFormat, "loops not supported");
      if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    for (auto [u, v] : edges_) {
      adj_[u].push_back(v);
      adj_[v].push_back(u);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
  }

  int n() const { return n_; }
  int m() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }

  bool adjacent(int u, int v) const {
    const auto& a = adj_[u];
    return std::binary_search(a.begin(), a.end(), v);
  }

  /// Degree if regular, otherwise -1.
  int regular_degree() const {
    if (n_ == 0) return -1;
    int d = degree(0);
    for (int v = 1; v < n_; ++v)
      if (degree(v) != d) return -1;
    return d;
  }

  /// BFS distances from src; unreachable = -1.
  std::vector<int> bfs(int src) const {
    std::vector<int> dist(n_, -1);
    std::queue<int> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int w : adj_[u])
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          q.push(w);
        }
    }
    return dist;
  }

  bool connected() const {
    if (n_ == 0) return true;
    auto d = bfs(0);
    return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
  }

  int diameter() const {
    int best = 0;
    for (int v = 0; v < n_; ++v) {
      auto d = bfs(v);
      for (int x : d) {
        require(x >= 0, Err::DisconnectedGraph, "diameter of a disconnected graph");
        best = std::max(best, x);
      }
    }
    return best;
  }

  /// Girth (length of a shortest cycle); returns INT_MAX for forests.
  /// If `witness` is given, it receives the vertices of one shortest cycle.
  int girth(std::vector<int>* witness = nullptr) const {
    int best = std::numeric_limits<int>::max();
    std::vector<int> best_cycle;
    std::vector<int> dist(n_), parent(n_);
    for (int s = 0; s < n_; ++s) {
      std::fill(dist.begin(), dist.end(), -1);
      std::fill(parent.begin(), parent.end(), -1);
      std::queue<int> q;
      dist[s] = 0;
      q.push(s);
      while (!q.empty()) {
        int u = q.front();
        q.pop();
        if (2 * dist[u] >= best) break;
        for (int w : adj_[u]) {
          if (dist[w] < 0) {
            dist[w] = dist[u] + 1;
            parent[w] = u;
            q.push(w);
          } else if (parent[u] != w) {
            int len = dist[u] + dist[w] + 1;
            if (len < best) {
              best = len;
              if (witness) {
                std::vector<int> pu, pw;
                for (int x = u; x >= 0; x = parent[x]) pu.push_back(x);
                for (int x = w; x >= 0; x = parent[x]) pw.push_back(x);
                // strip the shared tail so both paths end at their junction
                while (pu.size() > 1 && pw.size() > 1 && pu[pu.size() - 1] == pw[pw.size() - 1] &&
                       pu[pu.size() - 2] == pw[pw.size() - 2]) {
                  pu.pop_back();
                  pw.pop_back();
                }
                best_cycle = pu;  // u .. junction
                for (std::size_t i = pw.size() - 1; i-- > 0;) best_cycle.push_back(pw[i]);
              }
            }
          }
        }
      }
    }
    if (witness) *witness = best_cycle;
    return best;
  }

  Graph induced(const std::vector<int>& keep) const {
    std::vector<int> newid(n_, -1);
    int k = 0;
    for (int v : keep) newid[v] = k++;
    std::vector<std::pair<int, int>> es;
    for (auto [u, v] : edges_)
      if (newid[u] >= 0 && newid[v] >= 0) es.emplace_back(newid[u], newid[v]);
    return Graph(k, std::move(es));
  }

 private:
  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
};

/// All-pairs shortest-path metric of a connected graph. Unit edge weights by
/// default; optional positive weights per edge (aligned with graph.edges()).
inline FiniteMetric shortest_path_metric(const Graph& g,
                                         const std::vector<double>* edge_weights = nullptr,
                                         std::vector<std::string> labels = {}) {
  const int n = g.n();
  require(n >= 1, Err::SizeMismatch, "empty graph");
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  if (!edge_weights) {
    for (int s = 0; s < n; ++s) {
      auto row = g.bfs(s);
      for (int v = 0; v < n; ++v) {
        require(row[v] >= 0, Err::DisconnectedGraph,
                "no path from " + std::to_string(s) + " to " + std::to_string(v));
        d[s][v] = row[v];
      }
    }
  } else {
    require(edge_weights->size() == static_cast<std::size_t>(g.m()), Err::SizeMismatch,
            "edge weight count != m");
    // Dijkstra per source (desk scale: dense priority queue is fine)
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (int e = 0; e < g.m(); ++e) {
      auto [u, v] = g.edges()[e];
      double w = (*edge_weights)[e];
      require(w > 0, Err::NegativeDistance, "edge weights must be positive");
      adj[u].emplace_back(v, w);
      adj[v].emplace_back(u, w);
    }
    for (int s = 0; s < n; ++s) {
      std::vector<double> dist(n, std::numeric_limits<double>::infinity());
      dist[s] = 0;
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
      pq.push({0.0, s});
      while (!pq.empty()) {
        auto [du, u] = pq.top();
        pq.pop();
        if (du > dist[u]) continue;
        for (auto [v, w] : adj[u])
          if (dist[u] + w < dist[v]) {
            dist[v] = dist[u] + w;
            pq.push({dist[v], v});
          }
      }
      for (int v = 0; v < n; ++v) {
        require(std::isfinite(dist[v]), Err::DisconnectedGraph,
                "no path from " + std::to_string(s) + " to " + std::to_string(v));
        d[s][v] = dist[v];
      }
    }
  }
  // shortest-path closure of a positive weighting is a metric by construction
  return FiniteMetric::build(std::move(d), std::move(labels), /*validate_triangle=*/false);
}

/// t-distance graph: edges exactly between vertex pairs at shortest-path
/// distance t. When girth(G) > 2t and G is d-regular the result is verified
/// d(d-1)^(t-1)-regular.
inline Graph distance_graph(const Graph& g, int t) {
  require(t >= 1, Err::TOutOfRange, "t must be >= 1");
  int diam = g.diameter();
  require(t <= diam, Err::TOutOfRange,
          "t = " + std::to_string(t) + " exceeds diameter " + std::to_string(diam));
  std::vector<std::pair<int, int>> es;
  for (int s = 0; s < g.n(); ++s) {
    auto row = g.bfs(s);
    for (int v = s + 1; v < g.n(); ++v)
      if (row[v] == t) es.emplace_back(s, v);
  }
  Graph gt(g.n(), std::move(es));
  int d = g.regular_degree();
  if (d >= 2 && g.girth() > 2 * t) {
    long expect = d;
    for (int i = 1; i < t; ++i) expect *= (d - 1);
    int rd = gt.regular_degree();
    require(rd == expect, Err::NotRegular,
            "distance graph expected " + std::to_string(expect) + "-regular, got " +
                std::to_string(rd));
  }
  return gt;
}

}  // namespace mr
