// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/metric.hpp"

namespace mr {

/// beta-composition input: an outer metric M, one inner space per point of
/// M, and beta >= 1/2. gamma = max block diameter / min outer distance is
/// derived; cross-block distances become beta * gamma * d_M.
struct CompositionSpec {
  FiniteMetric outer;
  std::vector<FiniteMetric> blocks;
  double beta = 1.0;
};

/// Def.: the composed metric on the disjoint union of the blocks, validated.
/// Throws InvalidBeta (beta < 1/2) and DegenerateComposition (all blocks
/// singletons, so gamma = 0).
inline FiniteMetric metric_composition(const CompositionSpec& spec) {
  require(spec.beta >= 0.5, Err::InvalidBeta, "beta must be >= 1/2, got " + fmt17(spec.beta));
  const int m = spec.outer.n();
  require(static_cast<int>(spec.blocks.size()) == m, Err::SizeMismatch,
          "need one block per outer point");
  require(m >= 2, Err::SizeMismatch, "outer metric needs >= 2 points");
  double max_diam = 0;
  bool exact = spec.outer.has_exact();
  for (const auto& b : spec.blocks) {
    max_diam = std::max(max_diam, b.diameter());
    exact = exact && b.has_exact();
  }
  require(max_diam > 0, Err::DegenerateComposition, "all blocks are singletons (gamma = 0)");
  const double gamma = max_diam / spec.outer.min_distance();
  const double factor = spec.beta * gamma;

  int n = 0;
  std::vector<int> offset(m);
  for (int z = 0; z < m; ++z) {
    offset[z] = n;
    n += spec.blocks[z].n();
  }
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  std::vector<std::string> labels(n);
  for (int z = 0; z < m; ++z) {
    const auto& B = spec.blocks[z];
    for (int a = 0; a < B.n(); ++a) {
      labels[offset[z] + a] = spec.outer.labels()[z] + "/" + B.labels()[a];
      for (int b = 0; b < B.n(); ++b) d[offset[z] + a][offset[z] + b] = B.d(a, b);
    }
    for (int y = z + 1; y < m; ++y) {
      double cross = factor * spec.outer.d(z, y);
      for (int a = 0; a < spec.blocks[z].n(); ++a)
        for (int b = 0; b < spec.blocks[y].n(); ++b)
          d[offset[z] + a][offset[y] + b] = d[offset[y] + b][offset[z] + a] = cross;
    }
  }
  if (exact) {
    Rat max_diam_x = 0, min_outer = spec.outer.dx(0, 1);
    for (const auto& b : spec.blocks)
      for (int i = 0; i < b.n(); ++i)
        for (int j = i + 1; j < b.n(); ++j) max_diam_x = std::max(max_diam_x, b.dx(i, j));
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) min_outer = std::min(min_outer, spec.outer.dx(i, j));
    Rat factor_x = rat_of_double(spec.beta) * max_diam_x / min_outer;
    std::vector<std::vector<Rat>> dxm(n, std::vector<Rat>(n, Rat(0)));
    for (int z = 0; z < m; ++z) {
      const auto& B = spec.blocks[z];
      for (int a = 0; a < B.n(); ++a)
        for (int b = 0; b < B.n(); ++b) dxm[offset[z] + a][offset[z] + b] = B.dx(a, b);
      for (int y = z + 1; y < m; ++y) {
        Rat cross = factor_x * spec.outer.dx(z, y);
        for (int a = 0; a < spec.blocks[z].n(); ++a)
          for (int b = 0; b < spec.blocks[y].n(); ++b)
            dxm[offset[z] + a][offset[y] + b] = dxm[offset[y] + b][offset[z] + a] = cross;
      }
    }
    return FiniteMetric::build_exact(std::move(dxm), std::move(labels), true);
  }
  return FiniteMetric::build(std::move(d), std::move(labels), /*validate_triangle=*/true);
}

/// Recursive composition structure produced by the k-HST -> composition
/// re-metrization and consumed by the composition lift. A node is either a
/// base space (no `comp`) or an outer metric whose points carry composed
/// blocks; cross-block distances in the realized metric equal the outer
/// distances directly (the dilation is normalized away, i.e. beta_eff *
/// gamma = 1).
struct ComposedMetric {
  FiniteMetric flat;        // realized metric over `points`
  std::vector<int> points;  // global point ids, aligned with flat's rows

  struct Node {
    FiniteMetric outer;                 // inter-block metric (max cross distance)
    double beta_eff = 0;                // 1/gamma; +inf when all blocks are singletons
    double outer_aspect = 1;            // Phi of the outer metric
    std::vector<ComposedMetric> blocks; // one per outer point
  };
  std::shared_ptr<Node> comp;  // null => base space

  bool composed() const { return comp != nullptr; }
  int n() const { return flat.n(); }

  /// Smallest effective separation over all composition nodes.
  double min_beta_eff() const {
    if (!comp) return std::numeric_limits<double>::infinity();
    double b = comp->beta_eff;
    for (const auto& blk : comp->blocks) b = std::min(b, blk.min_beta_eff());
    return b;
  }
};

}  // namespace mr
