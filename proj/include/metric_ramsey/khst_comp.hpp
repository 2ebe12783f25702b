// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "metric_ramsey/composition.hpp"
#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/hst.hpp"
#include "metric_ramsey/metric.hpp"

namespace mr {

struct KhstToCompositionResult {
  ComposedMetric z;        // structured re-metrization; z.points are X indices
  EmbeddingReport report;  // X -> Z, identity map; <= 1 + 2/beta
  double min_outer_aspect = 1, max_outer_aspect = 1;
};

namespace detail {

// Leaf point ids under tree vertex v.
inline void tree_points(const HstTree& t, int v, std::vector<int>& out) {
  const auto& nd = t.node(v);
  if (nd.is_leaf()) {
    out.push_back(nd.leaf_id);
    return;
  }
  for (int c : nd.children) tree_points(t, c, out);
}

inline ComposedMetric remetrize(const FiniteMetric& X, const HstTree& t, int v, double alpha,
                                double* min_phi, double* max_phi) {
  const auto& nd = t.node(v);
  if (nd.is_leaf()) {
    ComposedMetric leaf;
    leaf.points = {nd.leaf_id};
    leaf.flat = X.restrict(leaf.points);
    return leaf;
  }
  if (nd.children.size() == 1)  // cut through degenerate chains
    return remetrize(X, t, nd.children[0], alpha, min_phi, max_phi);

  auto node = std::make_shared<ComposedMetric::Node>();
  std::vector<std::vector<int>> cluster_pts(nd.children.size());
  for (std::size_t c = 0; c < nd.children.size(); ++c) {
    tree_points(t, nd.children[c], cluster_pts[c]);
    node->blocks.push_back(remetrize(X, t, nd.children[c], alpha, min_phi, max_phi));
  }
  const int m = static_cast<int>(nd.children.size());
  // outer metric: d_M(u,v) = max cross-cluster distance in X
  std::vector<std::vector<double>> dm(m, std::vector<double>(m, 0.0));
  std::vector<std::vector<Rat>> dmx;
  bool exact = X.has_exact();
  if (exact) dmx.assign(m, std::vector<Rat>(m, Rat(0)));
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      double mx = 0;
      for (int x : cluster_pts[a])
        for (int y : cluster_pts[b]) mx = std::max(mx, X.d(x, y));
      dm[a][b] = dm[b][a] = mx;
      if (exact) {
        Rat mxx = 0;
        for (int x : cluster_pts[a])
          for (int y : cluster_pts[b]) mxx = std::max(mxx, X.dx(x, y));
        dmx[a][b] = dmx[b][a] = mxx;
      }
    }
  node->outer = exact ? FiniteMetric::build_exact(std::move(dmx), {}, false)
                      : FiniteMetric::build(std::move(dm), {}, false);
  node->outer_aspect = aspect_ratio(node->outer);
  *min_phi = std::min(*min_phi, node->outer_aspect);
  *max_phi = std::max(*max_phi, node->outer_aspect);
  require(leq_tol(node->outer_aspect, alpha), Err::GuaranteeViolation,
          "outer aspect ratio " + fmt17(node->outer_aspect) + " exceeds alpha = " + fmt17(alpha));

  // effective separation 1/gamma (+inf when every block is a singleton)
  double max_block_diam = 0;
  for (const auto& b : node->blocks) max_block_diam = std::max(max_block_diam, b.flat.diameter());
  node->beta_eff = max_block_diam > 0 ? node->outer.min_distance() / max_block_diam
                                      : std::numeric_limits<double>::infinity();

  // realized metric: in-block recursive, cross-block = d_M directly
  ComposedMetric out;
  for (std::size_t c = 0; c < cluster_pts.size(); ++c)
    out.points.insert(out.points.end(), node->blocks[c].points.begin(),
                      node->blocks[c].points.end());
  const int n = static_cast<int>(out.points.size());
  std::vector<int> block_of;
  std::vector<int> inner_pos;
  for (std::size_t c = 0; c < cluster_pts.size(); ++c)
    for (std::size_t i = 0; i < node->blocks[c].points.size(); ++i) {
      block_of.push_back(static_cast<int>(c));
      inner_pos.push_back(static_cast<int>(i));
    }
  std::vector<std::vector<double>> dz(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<Rat>> dzx;
  if (exact) dzx.assign(n, std::vector<Rat>(n, Rat(0)));
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = X.labels()[out.points[i]];
    for (int j = i + 1; j < n; ++j) {
      double v2;
      if (block_of[i] == block_of[j])
        v2 = node->blocks[block_of[i]].flat.d(inner_pos[i], inner_pos[j]);
      else
        v2 = node->outer.d(block_of[i], block_of[j]);
      dz[i][j] = dz[j][i] = v2;
      if (exact) {
        Rat vx = block_of[i] == block_of[j]
                     ? node->blocks[block_of[i]].flat.dx(inner_pos[i], inner_pos[j])
                     : node->outer.dx(block_of[i], block_of[j]);
        dzx[i][j] = dzx[j][i] = vx;
      }
    }
  }
  out.flat = exact ? FiniteMetric::build_exact(std::move(dzx), std::move(labels), false)
                   : FiniteMetric::build(std::move(dz), std::move(labels), false);
  out.comp = std::move(node);
  return out;
}

}  // namespace detail

/// Re-metrizes X along the cluster structure of a k-HST it is
/// alpha-equivalent to (k >= alpha * beta): inter-cluster distances become
/// the max cross-cluster distance, recursively. The result lives in
/// comp_beta(alpha), i.e. every outer metric has aspect ratio <= alpha and
/// effective separation >= beta, and is (1 + 2/beta)-equivalent to X.
/// The tree's leaf ids must be exactly 0..n-1 (the bijection is checked).
inline KhstToCompositionResult khst_to_composition(const FiniteMetric& X, const HstTree& t,
                                                   double alpha, double beta) {
  require(beta >= 1.0, Err::InvalidBeta, "beta must be >= 1");
  auto ids = t.leaf_ids();
  require(static_cast<int>(ids.size()) == X.n(), Err::SizeMismatch, "leaf count != |X|");
  for (int i = 0; i < X.n(); ++i)
    require(ids[i] == i, Err::NotBijection, "tree leaves must be labelled 0..n-1");
  // precondition: X is alpha-equivalent to the HST and the tree is
  // (alpha*beta)-separated
  EmbeddingReport pre = distortion(X, t.metric(), identity_map(X.n()));
  require(pre.leq(alpha), Err::DistortionPreconditionFailed,
          "X->HST distortion " + fmt17(pre.distortion) + " > alpha = " + fmt17(alpha));
  require(std::log2(t.k()) >= std::min(std::log2(alpha) + std::log2(beta), 512.0) - 1e-9,
          Err::InvalidParameters,
          "tree separation k = " + fmt17(t.k()) + " below alpha*beta");

  KhstToCompositionResult res;
  res.min_outer_aspect = std::numeric_limits<double>::infinity();
  res.max_outer_aspect = 1.0;
  res.z = detail::remetrize(X, t, t.root(), alpha, &res.min_outer_aspect, &res.max_outer_aspect);
  if (!std::isfinite(res.min_outer_aspect)) res.min_outer_aspect = 1.0;
  // rows of z.flat are a permutation of X's points
  std::vector<int> row_of(X.n());
  for (int i = 0; i < X.n(); ++i) row_of[res.z.points[i]] = i;
  res.report = distortion(X, res.z.flat, row_of);
  require(res.report.noncontractive(), Err::GuaranteeViolation,
          "re-metrization must be noncontractive");
  require(res.report.leq(1.0 + 2.0 / beta), Err::GuaranteeViolation,
          "re-metrization distortion " + fmt17(res.report.distortion) + " > 1 + 2/beta");
  require(leq_tol(res.z.flat.diameter(), X.diameter()), Err::GuaranteeViolation,
          "re-metrization may not grow the diameter");
  // effective separation across all nodes must be >= beta
  require(geq_tol(res.z.min_beta_eff(), beta), Err::GuaranteeViolation,
          "effective separation " + fmt17(res.z.min_beta_eff()) + " < beta = " + fmt17(beta));
  return res;
}

}  // namespace mr
