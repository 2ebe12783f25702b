// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/hst.hpp"

namespace mr {

/// Which residue-class discipline the subtree obeys, relative to depth mod h:
///  - DegenerateOneResidue: vertices at depth == i (mod h) are degenerate
///    (the classic h-periodically-sparse subtree, exponent (h-1)/h);
///  - BranchOneResidue: vertices may branch only at depth == i (mod h)
///    (the single-grid variant used for ultrametric -> k-HST at k >= alpha^2,
///    exponent 1/h).
enum class SparseMode { DegenerateOneResidue, BranchOneResidue };

struct SparseSubtree {
  HstTree tree;     // subtree of the input, same labels, leaves kept
  int residue = 0;  // the chosen i
  double value = 0; // sum of w^exponent over kept leaves
  double exponent = 0;
};

/// Maximizes sum w(leaf)^e over subtrees obeying `mode` with period h, by
/// the product/Hoelder dynamic program, then returns the best residue class
/// (ties to the largest i, which aligns the collapse grid for trees that
/// are already exact). Weights are addressed by leaf id.
inline SparseSubtree periodically_sparse_subtree(const HstTree& t,
                                                 const std::map<int, double>& leaf_weight, int h,
                                                 SparseMode mode = SparseMode::DegenerateOneResidue) {
  require(h > 1 || mode == SparseMode::BranchOneResidue, Err::InvalidH, "h must be > 1");
  require(h >= 1, Err::InvalidH, "h must be >= 1");
  const double e = mode == SparseMode::DegenerateOneResidue
                       ? static_cast<double>(h - 1) / h
                       : 1.0 / static_cast<double>(h);

  // dp[v] = best value of the subtree hanging at v; choice[v] = kept child
  // when v is forced degenerate / non-branching (-1 = keep all children)
  const int n = t.size();
  std::vector<double> dp(n, 0.0);
  std::vector<int> choice(n, -1);

  SparseSubtree best;
  best.value = -1;
  for (int i = h - 1; i >= 0; --i) {
    // builders append children before their parent, so an ascending index
    // scan visits children first
    for (int v = 0; v < n; ++v) {
      const auto& nd = t.node(v);
      if (nd.is_leaf()) {
        auto it = leaf_weight.find(nd.leaf_id);
        require(it != leaf_weight.end(), Err::SizeMismatch,
                "missing weight for leaf " + std::to_string(nd.leaf_id));
        require(it->second > 0, Err::ZeroWeight, "leaf weights must be positive");
        dp[v] = std::pow(it->second, e);
        choice[v] = -1;
        continue;
      }
      bool may_branch = mode == SparseMode::DegenerateOneResidue ? (nd.depth % h) != i
                                                                 : (nd.depth % h) == i;
      if (may_branch && nd.children.size() >= 1) {
        double s = 0;
        for (int c : nd.children) s += dp[c];
        dp[v] = s;
        choice[v] = -1;
      } else {
        double m = -1;
        int pick = -1;
        for (int c : nd.children)
          if (dp[c] > m) {
            m = dp[c];
            pick = c;
          }
        dp[v] = m;
        choice[v] = pick;
      }
    }
    if (dp[t.root()] > best.value) {
      best.value = dp[t.root()];
      best.residue = i;
      // rebuild kept subtree for this residue
      HstTree sub;
      if (t.has_exact_track()) sub.enable_exact_track();
      std::function<int(int)> build = [&](int v) -> int {
        const auto& nd = t.node(v);
        if (nd.is_leaf()) return sub.add_leaf(nd.leaf_id);
        std::vector<int> kids;
        if (choice[v] >= 0) {
          kids.push_back(build(choice[v]));
        } else {
          for (int c : nd.children) kids.push_back(build(c));
        }
        int id = sub.add_internal(nd.delta, std::move(kids));
        if (t.has_exact_track()) sub.set_exact_delta(id, t.delta_exact(v));
        return id;
      };
      int r = build(t.root());
      sub.finalize(r, t.k(), t.exact());
      sub.permit_degenerate();
      best.tree = std::move(sub);
    }
  }
  best.exponent = e;
  return best;
}

/// Verifies the discipline: internal vertices at forbidden depths have
/// out-degree exactly 1 (DegenerateOneResidue) / branching happens only at
/// the allowed residue (BranchOneResidue). Leaves are exempt.
inline bool is_periodically_sparse(const HstTree& t, int h, int residue, SparseMode mode) {
  for (int v = 0; v < t.size(); ++v) {
    const auto& nd = t.node(v);
    if (nd.is_leaf()) continue;
    bool restricted = mode == SparseMode::DegenerateOneResidue ? (nd.depth % h) == residue
                                                               : (nd.depth % h) != residue;
    if (restricted && nd.children.size() != 1) return false;
  }
  return true;
}

}  // namespace mr
