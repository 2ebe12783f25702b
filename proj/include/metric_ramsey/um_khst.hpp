// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "metric_ramsey/certify.hpp"
#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/hst.hpp"
#include "metric_ramsey/metric.hpp"
#include "metric_ramsey/trees_sparse.hpp"

namespace mr {

struct UmToKhstResult {
  std::vector<int> kept_leaf_ids;  // sorted
  HstTree tree;                    // exact HST with separation >= requested k
  EmbeddingReport report;          // input-tree metric -> output metric, on kept leaves
  double psi = 0;                  // claimed weighted-guarantee exponent
  int h = 0;
  bool residue_route = false;      // true = single-branching-grid route (k >= alpha^2)
};

namespace detail {

// Collapses `t` onto the depth grid {d : d % h == r}: kept internal vertices
// keep their labels, everything between grid levels is cut through, leaves
// always survive. Returns the topmost kept nodes under the root.
inline std::vector<int> collapse_to_grid(const HstTree& t, int v, int h, int r, HstTree& out) {
  const auto& nd = t.node(v);
  if (nd.is_leaf()) return {out.add_leaf(nd.leaf_id)};
  std::vector<int> tops;
  std::vector<int> kids;
  for (int c : nd.children) {
    auto sub = collapse_to_grid(t, c, h, r, out);
    kids.insert(kids.end(), sub.begin(), sub.end());
  }
  if (nd.depth % h == r) {
    int id = out.add_internal(nd.delta, std::move(kids));
    if (t.has_exact_track()) out.set_exact_delta(id, t.delta_exact(v));
    return {id};
  }
  return kids;
}

}  // namespace detail

/// Extracts a leaf subset of an ultrametric tree that is alpha-equivalent
/// (noncontractive) to an exact HST with separation >= k, together with the
/// weighted-Ramsey exponent of the construction:
///  - for k < alpha^2 (h = ceil(log alpha / log(k/alpha)) >= 2): exact
///    k^(1/h)-HST + periodically sparse subtree + level collapse; exponent
///    1 - 1/h, Lipschitz bound k^((h-1)/h) <= alpha;
///  - for k >= alpha^2: exact alpha-HST + single-residue branching grid;
///    exponent 1/ceil(log_alpha k), distortion <= alpha, output exact
///    alpha^h-HST (separation alpha^h >= k).
/// k is passed as log2 so refinement-stage values far beyond double range
/// stay representable.
inline UmToKhstResult um_to_khst_log(const HstTree& t, const std::map<int, double>& leaf_weight,
                                     double log2_k, double alpha) {
  require(alpha > 1.0, Err::InvalidParameters, "alpha must be > 1");
  require(log2_k > std::log2(alpha) + kLogGuard, Err::InvalidParameters, "need k > alpha");
  t.validate();

  UmToKhstResult res;
  const double log2_alpha = std::log2(alpha);
  const long h15 = guarded_ceil(log2_alpha / (log2_k - log2_alpha));

  if (t.node(t.root()).is_leaf()) {  // single point: nothing to do
    HstTree out;
    int r = out.add_leaf(t.node(t.root()).leaf_id);
    if (t.has_exact_track()) out.enable_exact_track();
    out.finalize(r, std::exp2(std::min(log2_k, 512.0)), true);
    res.kept_leaf_ids = {t.node(t.root()).leaf_id};
    res.tree = std::move(out);
    res.psi = 1.0;
    res.h = 1;
    return res;
  }

  HstTree collapsed;
  double psi;
  long h;
  bool residue_route = h15 < 2;
  if (!residue_route) {
    // sparse route: s = k^(1/h), one residue class degenerate. s is
    // irrational, so this route carries no exact-rational track.
    h = h15;
    const double s = std::exp2(log2_k / static_cast<double>(h));
    auto exact_pair = exact_k_hst(t.stripped(), s);
    auto sparse = periodically_sparse_subtree(exact_pair.first, leaf_weight, static_cast<int>(h),
                                              SparseMode::DegenerateOneResidue);
    psi = sparse.exponent;  // (h-1)/h
    const int i = sparse.residue;
    const int r = (i + 1) % static_cast<int>(h);
    if (sparse.tree.has_exact_track()) collapsed.enable_exact_track();
    auto tops = detail::collapse_to_grid(sparse.tree, sparse.tree.root(), static_cast<int>(h), r,
                                         collapsed);
    int root;
    if (i == static_cast<int>(h) - 1) {
      // grid residue 0: the original root is on-grid and is the single top
      require(tops.size() == 1, Err::GuaranteeViolation, "root must be on-grid when i = h-1");
      root = tops[0];
    } else {
      // synthetic root at Delta0 * s^(h-1-i) restores exactness at the top edge
      double hat = sparse.tree.node(sparse.tree.root()).delta *
                   std::pow(s, static_cast<double>(h - 1 - i));
      root = collapsed.add_internal(hat, std::move(tops));
    }
    collapsed.finalize(root, std::exp2(std::min(log2_k, 512.0)), true);
  } else {
    // single-branching-grid route at s = alpha
    h = guarded_ceil(log2_k / log2_alpha);
    auto exact_pair = exact_k_hst(t, alpha);
    auto sparse = periodically_sparse_subtree(exact_pair.first, leaf_weight, static_cast<int>(h),
                                              SparseMode::BranchOneResidue);
    psi = sparse.exponent;  // 1/h
    if (sparse.tree.has_exact_track()) collapsed.enable_exact_track();
    auto tops = detail::collapse_to_grid(sparse.tree, sparse.tree.root(), static_cast<int>(h),
                                         sparse.residue, collapsed);
    // either the root is on-grid (residue 0) or the off-grid prefix is a
    // degenerate chain; both leave exactly one topmost node
    int root;
    if (tops.size() == 1) {
      root = tops[0];
    } else {
      double hat = sparse.tree.node(sparse.tree.root()).delta;
      root = collapsed.add_internal(hat, std::move(tops));
      if (sparse.tree.has_exact_track())
        collapsed.set_exact_delta(root, sparse.tree.delta_exact(sparse.tree.root()));
    }
    double kd = std::min(std::pow(alpha, static_cast<double>(h)), 0x1p512);
    collapsed.finalize(root, kd, true);
  }

  collapsed.validate();
  res.kept_leaf_ids = collapsed.leaf_ids();
  res.h = static_cast<int>(h);
  res.psi = psi;
  res.residue_route = residue_route;

  // re-verify: noncontractive and alpha-Lipschitz against the input metric
  FiniteMetric before = t.metric();
  std::vector<int> keep_pos;
  {
    auto ids = t.leaf_ids();
    std::map<int, int> pos;
    for (std::size_t p = 0; p < ids.size(); ++p) pos[ids[p]] = static_cast<int>(p);
    for (int id : res.kept_leaf_ids) keep_pos.push_back(pos.at(id));
  }
  FiniteMetric in_restricted = before.restrict(keep_pos);
  FiniteMetric after = collapsed.metric();
  res.report = distortion(in_restricted, after, identity_map(after.n()));
  require(res.report.noncontractive(), Err::GuaranteeViolation,
          "um->kHST must be noncontractive, contraction = " + fmt17(res.report.contraction));
  require(res.report.leq(alpha), Err::GuaranteeViolation,
          "um->kHST distortion " + fmt17(res.report.distortion) + " > alpha = " + fmt17(alpha));
  // certify the weighted guarantee of the chosen subtree at the claimed psi
  {
    std::vector<Rat> all, kept;
    for (const auto& [id, wv] : leaf_weight) all.push_back(rat_of_double(wv));
    for (int id : res.kept_leaf_ids) kept.push_back(rat_of_double(leaf_weight.at(id)));
    require(certify_weighted_guarantee(kept, all, res.psi), Err::GuaranteeViolation,
            "um->kHST weighted guarantee failed at psi = " + fmt17(res.psi));
  }
  res.tree = std::move(collapsed);
  return res;
}

/// Wrapper taking k directly (use the log form for very large k).
inline UmToKhstResult um_to_khst(const HstTree& t, const std::map<int, double>& leaf_weight,
                                 double k, double alpha) {
  require(k > alpha && alpha > 1.0, Err::InvalidParameters,
          "need k > alpha > 1, got k = " + fmt17(k) + ", alpha = " + fmt17(alpha));
  return um_to_khst_log(t, leaf_weight, std::log2(k), alpha);
}

}  // namespace mr
