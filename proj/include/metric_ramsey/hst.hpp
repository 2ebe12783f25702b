// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/metric.hpp"

namespace mr {

/// Rooted labelled tree defining an ultrametric / k-HST (leaf distance =
/// label of the least common ancestor). Internal vertices carry Delta > 0,
/// leaves carry a point id and Delta = 0. `k` is the separation claimed for
/// the tree: every internal parent/child label pair must satisfy
/// Delta(child) <= Delta(parent)/k. `exact` additionally claims the ratio is
/// the same on every internal edge (and permits degenerate vertices).
class HstTree {
 public:
  struct Node {
    double delta = 0.0;
    int leaf_id = -1;  // >= 0 iff leaf
    int parent = -1;
    int depth = 0;
    std::vector<int> children;
    bool is_leaf() const { return leaf_id >= 0; }
  };

  HstTree() = default;

  int add_leaf(int leaf_id) {
    Node nd;
    nd.leaf_id = leaf_id;
    nodes_.push_back(std::move(nd));
    if (exact_deltas_) exact_deltas_->push_back(Rat(0));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int add_internal(double delta, std::vector<int> children) {
    Node nd;
    nd.delta = delta;
    nd.children = std::move(children);
    nodes_.push_back(std::move(nd));
    if (exact_deltas_) exact_deltas_->push_back(rat_of_double(delta));
    return static_cast<int>(nodes_.size()) - 1;
  }

  void enable_exact_track() {
    if (exact_deltas_) return;
    exact_deltas_.emplace();
    for (const auto& nd : nodes_) exact_deltas_->push_back(rat_of_double(nd.delta));
  }

  void set_exact_delta(int v, const Rat& r) {
    if (!exact_deltas_) enable_exact_track();
    (*exact_deltas_)[v] = r;
    nodes_[v].delta = rat_to_double(r);
  }

  /// Fixes the root, wires parents/depths, and validates structure (labels
  /// are validated against k by validate()).
  void finalize(int root, double k = 1.0, bool exact = false) {
    root_ = root;
    k_ = k;
    exact_ = exact;
    for (auto& nd : nodes_) nd.parent = -1;
    // iterative DFS for depth/parent
    std::vector<int> stack{root_};
    nodes_[root_].depth = 0;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int c : nodes_[u].children) {
        nodes_[c].parent = u;
        nodes_[c].depth = nodes_[u].depth + 1;
        stack.push_back(c);
      }
    }
  }

  int root() const { return root_; }
  double k() const { return k_; }
  bool exact() const { return exact_; }
  /// Allow out-degree-1 internal vertices without claiming exactness
  /// (periodically sparse subtrees and padded chains need this).
  void permit_degenerate() { permit_degenerate_ = true; }
  bool degenerate_permitted() const { return exact_ || permit_degenerate_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int v) const { return nodes_[v]; }
  bool has_exact_track() const { return exact_deltas_.has_value(); }
  const Rat& delta_exact(int v) const { return (*exact_deltas_)[v]; }

  std::vector<int> leaves() const {
    std::vector<int> out;
    collect_leaves(root_, out);
    return out;
  }

  /// Sorted point ids carried by the leaves.
  std::vector<int> leaf_ids() const {
    std::vector<int> ids;
    for (int v : leaves()) ids.push_back(nodes_[v].leaf_id);
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  int leaf_count() const { return static_cast<int>(leaves().size()); }

  /// Checks labels against the declared k (LabelMonotonicityViolation with a
  /// witness edge), positivity, leaf/internal shape, and (when the exact
  /// flag is off) nondegeneracy (DegenerateVertex).
  void validate() const {
    require(root_ >= 0, Err::BadFormat, "tree has no root");
    std::optional<double> common_ratio;
    for (int v = 0; v < size(); ++v) {
      const Node& nd = nodes_[v];
      if (nd.is_leaf()) {
        require(nd.children.empty(), Err::BadFormat, "leaf with children");
        continue;
      }
      require(!nd.children.empty(), Err::BadFormat, "internal vertex without children");
      if (!degenerate_permitted())
        require(nd.children.size() >= 2 || size() == 1, Err::DegenerateVertex,
                "internal vertex " + std::to_string(v) + " has out-degree 1");
      require(nd.delta > 0, Err::LabelMonotonicityViolation,
              "internal label must be positive at vertex " + std::to_string(v));
      for (int c : nd.children) {
        const Node& ch = nodes_[c];
        if (ch.is_leaf()) continue;
        bool ok;
        if (has_exact_track()) {
          ok = delta_exact(c) * rat_of_double(k_) <= delta_exact(v);
        } else {
          ok = leq_tol(ch.delta * k_, nd.delta);
        }
        require(ok, Err::LabelMonotonicityViolation,
                "edge (" + std::to_string(v) + " -> " + std::to_string(c) + "): " +
                    fmt17(ch.delta) + " > " + fmt17(nd.delta) + " / k");
        if (exact_) {
          double ratio = nd.delta / ch.delta;
          if (!common_ratio)
            common_ratio = ratio;
          else
            require(eq_tol(ratio, *common_ratio, 1e-6), Err::LabelMonotonicityViolation,
                    "exact tree has uneven level ratios");
        }
      }
    }
  }

  /// The ultrametric induced on the leaves, rows ordered by ascending leaf
  /// id. Validates the tree first.
  FiniteMetric metric() const {
    validate();
    auto ids = leaf_ids();
    const int m = static_cast<int>(ids.size());
    std::map<int, int> pos;
    for (int i = 0; i < m; ++i) {
      require(!pos.count(ids[i]), Err::BadFormat, "duplicate leaf id " + std::to_string(ids[i]));
      pos[ids[i]] = i;
    }
    std::vector<std::vector<double>> d(m, std::vector<double>(m, 0.0));
    std::vector<std::vector<Rat>> dx;
    if (has_exact_track()) dx.assign(m, std::vector<Rat>(m, Rat(0)));
    // for every internal vertex, pairs of leaves in distinct child subtrees
    // meet exactly there
    for (int v = 0; v < size(); ++v) {
      const Node& nd = nodes_[v];
      if (nd.is_leaf() || nd.children.size() < 2) continue;
      std::vector<std::vector<int>> groups;
      for (int c : nd.children) {
        std::vector<int> g;
        collect_leaves(c, g);
        groups.push_back(std::move(g));
      }
      for (std::size_t a = 0; a < groups.size(); ++a)
        for (std::size_t b = a + 1; b < groups.size(); ++b)
          for (int x : groups[a])
            for (int y : groups[b]) {
              int i = pos.at(nodes_[x].leaf_id), j = pos.at(nodes_[y].leaf_id);
              d[i][j] = d[j][i] = nd.delta;
              if (has_exact_track()) dx[i][j] = dx[j][i] = delta_exact(v);
            }
    }
    std::vector<std::string> labels;
    labels.reserve(m);
    for (int id : ids) labels.push_back(std::to_string(id));
    if (has_exact_track()) return FiniteMetric::build_exact(std::move(dx), std::move(labels), false);
    return FiniteMetric::build(std::move(d), std::move(labels), /*validate_triangle=*/false);
  }

  /// Copy without the exact-rational track.
  HstTree stripped() const {
    HstTree out = *this;
    out.exact_deltas_.reset();
    return out;
  }

  /// Copy with every leaf id i replaced by newid(i).
  HstTree relabelled(const std::function<int(int)>& newid) const {
    HstTree out = *this;
    for (auto& nd : out.nodes_)
      if (nd.is_leaf()) nd.leaf_id = newid(nd.leaf_id);
    return out;
  }

  /// Copy with all labels dilated by f (exact track multiplied by fx when
  /// both are present).
  HstTree scaled(double f, const Rat* fx = nullptr) const {
    HstTree out = *this;
    for (int v = 0; v < out.size(); ++v) {
      if (out.nodes_[v].is_leaf()) continue;
      out.nodes_[v].delta *= f;
      if (out.exact_deltas_) {
        if (fx)
          (*out.exact_deltas_)[v] *= *fx;
        else
          (*out.exact_deltas_)[v] *= rat_of_double(f);
      }
    }
    return out;
  }

  /// Drops degenerate internal vertices and merges children whose label
  /// equals the parent's (valid for ultrametrics: neither changes leaf
  /// distances). Returns a fresh tree with k = 1, exact flag cleared.
  HstTree canonical() const {
    HstTree out;
    if (has_exact_track()) out.enable_exact_track();
    int r = copy_canonical(root_, out);
    out.finalize(r, 1.0, false);
    return out;
  }

  /// Subtree spanned by the given tree vertices (which must include the
  /// root-to-leaf closure of some leaf set): keeps a vertex iff marked.
  friend class TreeSurgery;

 private:
  void collect_leaves(int v, std::vector<int>& out) const {
    if (nodes_[v].is_leaf()) {
      out.push_back(v);
      return;
    }
    for (int c : nodes_[v].children) collect_leaves(c, out);
  }

  int copy_canonical(int v, HstTree& out) const {
    const Node& nd = nodes_[v];
    if (nd.is_leaf()) return out.add_leaf(nd.leaf_id);
    // gather descendants, flattening degenerate chains and equal labels
    std::vector<int> kids;
    gather_merged(v, nd.delta, has_exact_track() ? &delta_exact(v) : nullptr, kids, out);
    if (kids.size() == 1) return kids[0];
    int id = out.add_internal(nd.delta, std::move(kids));
    if (has_exact_track()) out.set_exact_delta(id, delta_exact(v));
    return id;
  }

  void gather_merged(int v, double delta, const Rat* delta_x, std::vector<int>& kids,
                     HstTree& out) const {
    for (int c : nodes_[v].children) {
      const Node& ch = nodes_[c];
      bool merge;
      if (ch.is_leaf())
        merge = false;
      else if (delta_x && has_exact_track())
        merge = delta_exact(c) == *delta_x;
      else
        merge = ch.delta == delta;
      if (merge)
        gather_merged(c, delta, delta_x, kids, out);
      else
        kids.push_back(copy_canonical(c, out));
    }
  }

  std::vector<Node> nodes_;
  int root_ = -1;
  double k_ = 1.0;
  bool exact_ = false;
  bool permit_degenerate_ = false;
  std::optional<std::vector<Rat>> exact_deltas_;
};

/// Leaf-pairwise ultrametric of a tree, validating the declared k.
inline FiniteMetric hst_metric(const HstTree& t) { return t.metric(); }

namespace detail {

struct ExactifyCtx {
  const HstTree* in;
  HstTree* out;
  double k;
  double log2k;
  bool use_exact;
  Rat k_rat;
};

// Appends the exactified copy of the subtree under (in-vertex v, whose final
// parent label is parent_delta) to `kids`; coalesces when the label ratio is
// below k and inserts chain vertices when it exceeds k^2.
inline void exactify_children(const ExactifyCtx& ctx, int v, double parent_delta,
                              const Rat* parent_delta_x, std::vector<int>& kids);

inline int exactify_node(const ExactifyCtx& ctx, int v, double new_delta, const Rat* new_delta_x) {
  std::vector<int> kids;
  exactify_children(ctx, v, new_delta, new_delta_x, kids);
  int id = ctx.out->add_internal(new_delta, std::move(kids));
  if (new_delta_x) ctx.out->set_exact_delta(id, *new_delta_x);
  return id;
}

inline void exactify_children(const ExactifyCtx& ctx, int v, double parent_delta,
                              const Rat* parent_delta_x, std::vector<int>& kids) {
  for (int c : ctx.in->node(v).children) {
    const auto& ch = ctx.in->node(c);
    if (ch.is_leaf()) {
      kids.push_back(ctx.out->add_leaf(ch.leaf_id));
      continue;
    }
    // find i with k^i <= parent_delta / delta(c) < k^(i+1)
    long i;
    Rat ratio_x;
    if (ctx.use_exact) {
      ratio_x = *parent_delta_x / ctx.in->delta_exact(c);
      i = 0;
      Rat p = 1;
      while (p * ctx.k_rat <= ratio_x) {
        p *= ctx.k_rat;
        ++i;
      }
    } else {
      double ratio = parent_delta / ch.delta;
      i = guarded_floor(std::log2(ratio) / ctx.log2k);
      if (i < 0) i = 0;  // label monotonicity guarantees ratio >= 1
    }
    if (i == 0) {
      // coalesce c into its parent
      exactify_children(ctx, c, parent_delta, parent_delta_x, kids);
      continue;
    }
    // chain of i-1 intermediate vertices, then c relabelled to parent/k^i
    double step = parent_delta;
    Rat step_x = parent_delta_x ? *parent_delta_x : Rat(0);
    std::vector<std::pair<double, Rat>> chain;
    for (long j = 1; j <= i; ++j) {
      step /= ctx.k;
      if (ctx.use_exact) step_x /= ctx.k_rat;
      chain.emplace_back(step, step_x);
    }
    int child_id = exactify_node(ctx, c, chain.back().first,
                                 ctx.use_exact ? &chain.back().second : nullptr);
    for (long j = i - 2; j >= 0; --j) {
      int mid = ctx.out->add_internal(chain[j].first, {child_id});
      if (ctx.use_exact) ctx.out->set_exact_delta(mid, chain[j].second);
      child_id = mid;
    }
    kids.push_back(child_id);
  }
}

}  // namespace detail

/// Any ultrametric is k-equivalent to an exact k-HST: coalesce levels whose
/// ratio falls below k and insert geometric chains where it exceeds k^2.
/// Returns the exact tree and the distortion report of the leaf-id-aligned
/// identity (noncontractive, <= k). k beyond 2^512 short-circuits to the
/// root star.
inline std::pair<HstTree, EmbeddingReport> exact_k_hst(const HstTree& t, double k) {
  require(k > 1.0, Err::InvalidK, "k must be > 1, got " + fmt17(k));
  t.validate();
  HstTree out;
  bool use_exact = t.has_exact_track() && std::isfinite(k) && k < 9e15;
  if (use_exact) out.enable_exact_track();
  const auto& rootnd = t.node(t.root());
  int new_root;
  if (rootnd.is_leaf()) {
    new_root = out.add_leaf(rootnd.leaf_id);
  } else if (!std::isfinite(k) || std::log2(k) > 512.0) {
    // every label ratio is below k: everything coalesces into the root
    std::vector<int> ids;
    for (int lv : t.leaves()) ids.push_back(t.node(lv).leaf_id);
    std::vector<int> kids;
    kids.reserve(ids.size());
    for (int id : ids) kids.push_back(out.add_leaf(id));
    new_root = out.add_internal(rootnd.delta, std::move(kids));
    if (t.has_exact_track()) {
      out.enable_exact_track();
      out.set_exact_delta(new_root, t.delta_exact(t.root()));
    }
  } else {
    detail::ExactifyCtx ctx{&t, &out, k, std::log2(k), use_exact,
                            use_exact ? rat_of_double(k) : Rat(0)};
    const Rat* rx = use_exact ? &t.delta_exact(t.root()) : nullptr;
    new_root = detail::exactify_node(ctx, t.root(), rootnd.delta, rx);
  }
  out.finalize(new_root, std::min(k, 0x1p512), /*exact=*/true);
  EmbeddingReport rep = distortion(t.metric(), out.metric(), identity_map(t.leaf_count()));
  return {std::move(out), rep};
}

/// Isometric embedding of an ultrametric tree into l2: one coordinate per
/// tree edge, value sqrt((Delta(parent)^2 - Delta(child)^2) / 2) on the
/// root-to-leaf path. Pairwise norms telescope to Delta(lca) exactly.
/// Rows are ordered like hst_metric's (ascending leaf id).
inline std::vector<std::vector<double>> embed_l2(const HstTree& t) {
  t.validate();
  auto leaves = t.leaves();
  std::vector<std::pair<int, int>> order;  // (leaf_id, vertex)
  for (int v : leaves) order.emplace_back(t.node(v).leaf_id, v);
  std::sort(order.begin(), order.end());
  // assign a dense coordinate to every (parent, child) edge
  std::vector<int> coord_of(t.size(), -1);
  int dim = 0;
  for (int v = 0; v < t.size(); ++v)
    if (v != t.root() && t.node(v).parent >= 0) coord_of[v] = dim++;
  std::vector<std::vector<double>> pts;
  pts.reserve(order.size());
  for (auto [id, v] : order) {
    std::vector<double> x(dim, 0.0);
    int cur = v;
    while (cur != t.root()) {
      int p = t.node(cur).parent;
      double dp = t.node(p).delta, dc = t.node(cur).delta;
      x[coord_of[cur]] = std::sqrt(std::max(0.0, (dp * dp - dc * dc) / 2.0));
      cur = p;
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

inline double l2_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Every n-point metric is n-equivalent to an ultrametric: split the
/// threshold graph into components, recurse, and join under the diameter.
/// The threshold prefers the diameter class itself (edges d < diam), which
/// is exact for ultrametric inputs; when that graph stays connected it
/// falls back to diam/n. Noncontractive, at most n-Lipschitz, diameter
/// preserving.
struct NaiveUltrametricResult {
  HstTree tree;           // leaf ids = point indices
  std::vector<int> map;   // identity: point i <-> leaf with id i
  EmbeddingReport report;
};

namespace detail {

inline int naive_um_build(const FiniteMetric& X, const std::vector<int>& S, HstTree& tree) {
  if (S.size() == 1) return tree.add_leaf(S[0]);
  int da = S[0], db = S[1];
  if (X.has_exact()) {
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = i + 1; j < S.size(); ++j)
        if (X.dx(S[i], S[j]) > X.dx(da, db)) {
          da = S[i];
          db = S[j];
        }
  } else {
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = i + 1; j < S.size(); ++j)
        if (X.d(S[i], S[j]) > X.d(da, db)) {
          da = S[i];
          db = S[j];
        }
  }
  const double diam = X.d(da, db);
  auto components = [&](double threshold) {
    std::vector<int> comp(S.size());
    std::iota(comp.begin(), comp.end(), 0);
    std::function<int(int)> find = [&](int x) {
      while (comp[x] != x) x = comp[x] = comp[comp[x]];
      return x;
    };
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = i + 1; j < S.size(); ++j)
        if (X.d(S[i], S[j]) < threshold) comp[find(static_cast<int>(i))] = find(static_cast<int>(j));
    std::map<int, std::vector<int>> groups;
    for (std::size_t i = 0; i < S.size(); ++i) groups[find(static_cast<int>(i))].push_back(S[i]);
    return groups;
  };
  auto groups = components(diam);  // split off the diameter class
  if (groups.size() < 2) groups = components(diam / static_cast<double>(S.size()));
  std::vector<int> kids;
  for (auto& [root, members] : groups) kids.push_back(naive_um_build(X, members, tree));
  int nd = tree.add_internal(diam, std::move(kids));
  if (X.has_exact()) tree.set_exact_delta(nd, X.dx(da, db));
  return nd;
}

}  // namespace detail

inline NaiveUltrametricResult naive_ultrametric(const FiniteMetric& X) {
  require(X.n() >= 1, Err::SizeMismatch, "empty metric");
  NaiveUltrametricResult out;
  HstTree tree;
  if (X.has_exact()) tree.enable_exact_track();
  std::vector<int> all(X.n());
  std::iota(all.begin(), all.end(), 0);
  tree.finalize(detail::naive_um_build(X, all, tree));
  out.tree = tree.canonical();
  out.tree.validate();
  out.map = identity_map(X.n());
  out.report = distortion(X, out.tree.metric(), out.map);
  require(out.report.noncontractive(), Err::GuaranteeViolation,
          "threshold construction must be noncontractive");
  require(out.report.leq(static_cast<double>(X.n())), Err::GuaranteeViolation,
          "threshold construction must be n-Lipschitz");
  return out;
}

}  // namespace mr
