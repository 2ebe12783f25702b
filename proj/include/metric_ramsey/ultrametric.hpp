// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "metric_ramsey/hst.hpp"
#include "metric_ramsey/metric.hpp"

namespace mr {

/// Subdominant ultrametric of X: the pointwise-maximal ultrametric below d,
/// i.e. single-linkage merge heights. c_um = max d/u is the least distortion
/// of any bijection of X onto an ultrametric, which makes this the exact
/// oracle for distortion into the class UM.
struct SubdominantResult {
  FiniteMetric u;       // ultrametric matrix, same point order as the input
  HstTree tree;         // single-linkage dendrogram; leaf ids = point indices
  double c_um = 1.0;    // max over pairs of d/u
  std::optional<Rat> c_um_exact;
};

inline SubdominantResult subdominant_ultrametric(const FiniteMetric& X) {
  const int n = X.n();
  SubdominantResult out;
  if (n == 1) {
    HstTree t;
    int leaf = t.add_leaf(0);
    if (X.has_exact()) t.enable_exact_track();
    t.finalize(leaf);
    out.tree = std::move(t);
    out.u = X;
    if (X.has_exact()) out.c_um_exact = Rat(1);
    return out;
  }
  // pairs sorted ascending; exact track sorts by rationals to break float ties
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  if (X.has_exact())
    std::stable_sort(pairs.begin(), pairs.end(), [&](auto a, auto b) {
      return X.dx(a.first, a.second) < X.dx(b.first, b.second);
    });
  else
    std::stable_sort(pairs.begin(), pairs.end(), [&](auto a, auto b) {
      return X.d(a.first, a.second) < X.d(b.first, b.second);
    });

  HstTree t;
  if (X.has_exact()) t.enable_exact_track();
  std::vector<int> dsu(n), cluster_node(n);
  std::iota(dsu.begin(), dsu.end(), 0);
  for (int i = 0; i < n; ++i) cluster_node[i] = t.add_leaf(i);
  auto find = [&](int x) {
    while (dsu[x] != x) x = dsu[x] = dsu[dsu[x]];
    return x;
  };
  int merges = 0;
  for (auto [i, j] : pairs) {
    int a = find(i), b = find(j);
    if (a == b) continue;
    int nd = t.add_internal(X.d(i, j), {cluster_node[a], cluster_node[b]});
    if (X.has_exact()) t.set_exact_delta(nd, X.dx(i, j));
    dsu[b] = a;
    cluster_node[a] = nd;
    if (++merges == n - 1) break;
  }
  t.finalize(cluster_node[find(0)]);
  HstTree canon = t.canonical();
  canon.validate();
  out.u = canon.metric();  // leaf ids are point indices, so order matches X
  double c = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) c = std::max(c, X.d(i, j) / out.u.d(i, j));
  out.c_um = c;
  if (X.has_exact()) {
    Rat cx = 1;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) cx = std::max(cx, X.dx(i, j) / out.u.dx(i, j));
    out.c_um_exact = cx;
  }
  out.tree = std::move(canon);
  return out;
}

/// d(x,z) <= max(d(x,y), d(y,z)) for all triples, up to tolerance (exact
/// when the rational mirror is present).
inline bool is_ultrametric(const FiniteMetric& X) {
  for (int x = 0; x < X.n(); ++x)
    for (int y = 0; y < X.n(); ++y)
      for (int z = 0; z < X.n(); ++z) {
        if (x == y || y == z || x == z) continue;
        if (X.has_exact()) {
          if (X.dx(x, z) > std::max(X.dx(x, y), X.dx(y, z))) return false;
        } else if (!leq_tol(X.d(x, z), std::max(X.d(x, y), X.d(y, z)))) {
          return false;
        }
      }
  return true;
}

}  // namespace mr
