// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// The constructive Ramsey extraction pipeline: the shell decomposition for
// q-decomposable weights, its aspect-ratio driver, composition lifting,
// distortion refinement, the near-2 pipeline, and the best-of driver that
// ties them together. Every operation re-verifies its distortion claim from
// scratch and certifies the weighted guarantee sum_Y w^psi >= (sum_X w)^psi
// with interval arithmetic before returning.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metric_ramsey/certify.hpp"
#include "metric_ramsey/composition.hpp"
#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/hst.hpp"
#include "metric_ramsey/khst_comp.hpp"
#include "metric_ramsey/metric.hpp"
#include "metric_ramsey/oracle.hpp"
#include "metric_ramsey/sequences.hpp"
#include "metric_ramsey/ultrametric.hpp"
#include "metric_ramsey/um_khst.hpp"

namespace mr {

struct StageRecord {
  std::string op;
  double alpha = 0;
  double psi = 1;
  int in_size = 0;
  int out_size = 0;
  double distortion = 1;
  std::string note;
};

struct ExtractionResult {
  PointSubset subset;   // indices into the original space
  HstTree tree;         // leaf ids = original indices
  std::vector<int> map; // position in subset -> leaf position (sorted ids)
  EmbeddingReport report;
  double psi = 1.0;
  double weighted_lhs = 0.0;
  double weighted_rhs = 0.0;
  std::vector<StageRecord> trace;
  bool heuristic = false;
  std::string warning;
};

/// Counts verified lemma invocations, for the acceptance suite.
struct GuaranteeCounters {
  long core = 0;
  long phi = 0;
};
inline GuaranteeCounters& guarantee_counters() {
  static thread_local GuaranteeCounters c;
  return c;
}

namespace detail {

inline std::vector<Rat> rats_of(const std::vector<double>& v) {
  std::vector<Rat> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(rat_of_double(x));
  return out;
}

inline std::vector<double> pow_weights(const std::vector<double>& v, double e) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(std::pow(x, e));
  return out;
}

/// Recomputes the distortion report of `r` against X (noncontractive,
/// <= bound) and certifies the weighted guarantee at the claimed psi.
inline void verify_extraction(const FiniteMetric& X, const std::vector<double>& w,
                              ExtractionResult& r, double bound, const IReal* psi_iv = nullptr,
                              bool need_noncontractive = true) {
  FiniteMetric sub = X.restrict(r.subset.indices);
  FiniteMetric tm = r.tree.metric();
  require(tm.n() == sub.n(), Err::SizeMismatch, "tree leaves != subset");
  r.map = identity_map(sub.n());
  r.report = distortion(sub, tm, r.map);
  require(r.report.leq(bound), Err::GuaranteeViolation,
          "verified distortion " + fmt17(r.report.distortion) + " exceeds bound " + fmt17(bound));
  if (need_noncontractive)
    require(r.report.noncontractive(), Err::GuaranteeViolation,
            "embedding must be noncontractive (contraction " + fmt17(r.report.contraction) + ")");
  std::vector<Rat> all = rats_of(w);
  std::vector<Rat> kept;
  kept.reserve(r.subset.indices.size());
  for (int i : r.subset.indices) kept.push_back(all[i]);
  bool ok = psi_iv ? certify_weighted_guarantee(kept, all, *psi_iv, &r.weighted_lhs,
                                                &r.weighted_rhs)
                   : certify_weighted_guarantee(kept, all, r.psi, &r.weighted_lhs,
                                                &r.weighted_rhs);
  require(ok, Err::GuaranteeViolation,
          "weighted guarantee failed: lhs " + fmt17(r.weighted_lhs) + " < rhs " +
              fmt17(r.weighted_rhs) + " at psi = " + fmt17(r.psi));
}

// ---------------------------------------------------------------------
// Shell decomposition (the q-decomposable-weight extraction)
// ---------------------------------------------------------------------

struct ShellCtx {
  const FiniteMetric* X;
  const std::vector<double>* w;
  long t;
  double q;
  double omega;     // common light level (0 when every point is heavy)
  bool small_t_ok;
};

struct PairStat {
  double diam = 0;
  int a = -1, b = -1;
};

inline PairStat diam_pair(const FiniteMetric& X, const std::vector<int>& S) {
  PairStat p;
  if (X.has_exact()) {
    Rat best = -1;
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = i + 1; j < S.size(); ++j)
        if (X.dx(S[i], S[j]) > best) {
          best = X.dx(S[i], S[j]);
          p.a = S[i];
          p.b = S[j];
        }
  } else {
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = i + 1; j < S.size(); ++j)
        if (X.d(S[i], S[j]) > p.diam) {
          p.diam = X.d(S[i], S[j]);
          p.a = S[i];
          p.b = S[j];
        }
  }
  if (p.a >= 0) p.diam = X.d(p.a, p.b);
  return p;
}

inline double min_pair_distance(const FiniteMetric& X, const std::vector<int>& S) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = i + 1; j < S.size(); ++j) m = std::min(m, X.d(S[i], S[j]));
  return m;
}

// Builds the shell tree over index set S; returns the tree vertex id.
inline int shell_build(const ShellCtx& ctx, const std::vector<int>& S, HstTree& tree,
                       std::vector<int>& kept) {
  const FiniteMetric& X = *ctx.X;
  const std::vector<double>& w = *ctx.w;
  if (S.size() == 1) {
    kept.push_back(S[0]);
    return tree.add_leaf(S[0]);
  }
  PairStat dp = diam_pair(X, S);
  auto make_label = [&](int node) {
    if (X.has_exact()) tree.set_exact_delta(node, X.dx(dp.a, dp.b));
  };
  if (S.size() == 2) {
    kept.push_back(S[0]);
    kept.push_back(S[1]);
    int l0 = tree.add_leaf(S[0]), l1 = tree.add_leaf(S[1]);
    int nd = tree.add_internal(dp.diam, {l0, l1});
    make_label(nd);
    return nd;
  }

  const double t = static_cast<double>(ctx.t);
  const double W = std::accumulate(S.begin(), S.end(), 0.0,
                                   [&](double acc, int i) { return acc + w[i]; });
  const double diam = dp.diam;
  const double phi = diam / min_pair_distance(X, S);
  const double b_phi = std::pow(t * std::log2(4 * ctx.q * phi), -2.0 / t);
  const double b_half = std::pow(t * std::log2(2 * ctx.q * phi), -2.0 / t);

  std::vector<int> heavy;
  for (int i : S)
    if (w[i] >= W / ctx.q) heavy.push_back(i);

  auto ball_weight = [&](int c, double radius) {
    double s = w[c];
    for (int i : S)
      if (i != c && X.d(c, i) < radius) s += w[i];
    return s;
  };

  int x0 = -1;
  long pick_i = -1;
  PairStat hdp = diam_pair(X, heavy);
  bool case1 = heavy.size() >= 2 && hdp.diam > diam / 2;
  if (case1) {
    // far-apart heavy pair; center with the lighter quarter-ball
    int c0 = hdp.a, c1 = hdp.b;
    double w0 = ball_weight(c0, diam / 4), w1 = ball_weight(c1, diam / 4);
    x0 = (w0 <= w1) ? c0 : c1;
    const double ex = std::pow(std::log2(ctx.q), -1.0 / (t - 1));
    double best_slack = -std::numeric_limits<double>::infinity();
    long best_i = 1;
    for (long i = 1; i <= ctx.t; ++i) {
      double wa = w[x0];
      for (int v : S)
        if (v != x0 && X.d(x0, v) < (i - 1) * diam / (4 * t)) wa += w[v];
      double wball = ball_weight(x0, i * diam / (4 * t));
      double lhs = std::pow(wa / W, ex), rhs = wball / W;
      if (lhs >= rhs) {
        pick_i = i;
        break;
      }
      if (lhs - rhs > best_slack) {
        best_slack = lhs - rhs;
        best_i = i;
      }
    }
    if (pick_i < 0) {
      require(ctx.small_t_ok, Err::GuaranteeViolation, "no qualifying shell index in case 1");
      pick_i = best_i;
    }
  } else {
    // light-point case: start from the point farthest from the heavy set
    double best_d = -1;
    for (int v : S) {
      double dv = std::numeric_limits<double>::infinity();
      for (int hh : heavy) dv = std::min(dv, X.d(v, hh));
      if (heavy.empty()) dv = 0;
      if (dv > best_d) {
        best_d = dv;
        x0 = v;
      }
    }
    long m = 0;
    for (int v : S)
      if (w[v] < W / ctx.q) ++m;
    require(m > 0, Err::GuaranteeViolation, "case 2 requires light points");
    auto eps = [&](long i) {
      long cnt = 0;
      for (int v : S)
        if (w[v] < W / ctx.q && (v == x0 || X.d(x0, v) < i * diam / (4 * t))) ++cnt;
      return static_cast<double>(cnt) / static_cast<double>(m);
    };
    double best_slack = -std::numeric_limits<double>::infinity();
    long best_i = 1;
    for (long i = 1; i <= ctx.t; ++i) {
      double lhs = std::pow(eps(i - 1), b_half) *
                   std::pow(static_cast<double>(m), b_half - b_phi);
      double rhs = eps(i);
      if (lhs >= rhs) {
        pick_i = i;
        break;
      }
      if (lhs - rhs > best_slack) {
        best_slack = lhs - rhs;
        best_i = i;
      }
    }
    if (pick_i < 0) {
      require(ctx.small_t_ok, Err::GuaranteeViolation, "no qualifying shell index in case 2");
      pick_i = best_i;
    }
  }

  std::vector<int> A, B;
  for (int v : S) {
    if (v == x0 || X.d(x0, v) < (pick_i - 1) * diam / (4 * t))
      A.push_back(v);
    else if (!(X.d(x0, v) < pick_i * diam / (4 * t)))
      B.push_back(v);
  }
  require(!A.empty() && !B.empty(), Err::GuaranteeViolation, "shell split degenerated");

  int na = shell_build(ctx, A, tree, kept);
  int nb = shell_build(ctx, B, tree, kept);
  int nd = tree.add_internal(diam, {na, nb});
  make_label(nd);
  return nd;
}

}  // namespace detail

/// Shell-decomposition extraction for q-decomposable weights: returns a
/// subset 4t-equivalent (noncontractive) to an ultrametric of the same
/// diameter, satisfying the weighted guarantee with
/// psi = [t log2(4 q Phi)]^(-2/t). Throws NotDecomposable / TTooSmall.
inline ExtractionResult ramsey_core(const WeightedMetric& WM, long t, double q,
                                    bool allow_small_t = false) {
  require(t >= (allow_small_t ? 2 : 8), Err::TTooSmall,
          "t = " + std::to_string(t) + (allow_small_t ? " < 2" : " < 8"));
  require(q >= 2, Err::QTooSmall, "q must be >= 2");
  auto level = decomposable_level(WM.w, q);
  require(level.has_value(), Err::NotDecomposable,
          "weights are not q-decomposable for q = " + fmt17(q));

  const FiniteMetric& X = WM.base;
  ExtractionResult res;
  const double phi = aspect_ratio(X);
  res.psi = std::pow(static_cast<double>(t) * std::log2(4 * q * phi), -2.0 / t);
  res.heuristic = t < 8;

  detail::ShellCtx ctx{&X, &WM.w, t, q, level.value_or(0.0), allow_small_t};
  HstTree tree;
  if (X.has_exact()) tree.enable_exact_track();
  std::vector<int> kept;
  std::vector<int> all(X.n());
  std::iota(all.begin(), all.end(), 0);
  int root = detail::shell_build(ctx, all, tree, kept);
  tree.finalize(root);
  HstTree canon = tree.canonical();
  canon.validate();
  res.subset = PointSubset(X, std::move(kept));
  res.tree = std::move(canon);
  res.trace.push_back({"ramsey_core", 4.0 * t, res.psi, X.n(),
                       res.subset.size(), 0.0, "q=" + fmt17(q)});

  IReal psi_iv = shell_exponent(t, rat_of_double(q),
                                X.has_exact() ? aspect_ratio_exact(X) : rat_of_double(phi));
  detail::verify_extraction(X, WM.w, res, 4.0 * t, &psi_iv);
  res.trace.back().distortion = res.report.distortion;
  ++guarantee_counters().core;
  return res;
}

/// Aspect-ratio extraction for arbitrary weights (alpha > 8): truncate the
/// weights to a q-decomposable power (q = max(2^t, 16), t = floor(alpha/4),
/// p = 1 - log2 log2 q / log2 q), drop zeroed points, run the shell
/// extraction on w^p, and report the composite exponent p * beta. The
/// guarantee is heuristic for t < 8 (8 < alpha < 32).
inline ExtractionResult ramsey_phi(const WeightedMetric& WM, double alpha) {
  require(alpha > 8, Err::AlphaTooSmall,
          "alpha must be > 8 (got " + fmt17(alpha) + "); use the 2+eps pipeline below that");
  const FiniteMetric& X = WM.base;
  const long t = guarded_floor(alpha / 4);
  const double q = std::max(std::exp2(static_cast<double>(t)), 16.0);
  const double p = 1.0 - std::log2(std::log2(q)) / std::log2(q);
  const double phi = aspect_ratio(X);
  const double beta = std::pow(t * std::log2(4 * q * phi), -2.0 / t);

  ExtractionResult res;
  res.psi = p * beta;
  res.heuristic = t < 8;

  Rat phi_rat = X.has_exact() ? aspect_ratio_exact(X) : rat_of_double(phi);
  IReal beta_iv = shell_exponent(t, rat_of_double(q), phi_rat);
  // p as an interval: 1 - log2(log2 q)/log2 q with q an exact dyadic double
  IReal lq = IReal::from_rat(rat_of_double(q), 256).log2();
  IReal p_iv = IReal::from_long(1, 256) - lq.log2().mul_nonneg(lq.inv_pos());
  IReal psi_iv = p_iv.mul_nonneg(beta_iv);

  auto sub = subdominant_ultrametric(X);
  bool um_input = sub.c_um_exact ? (*sub.c_um_exact == 1) : eq_tol(sub.c_um, 1.0);
  if (um_input) {
    // already an ultrametric: the full space qualifies at distortion 1
    std::vector<int> all(X.n());
    std::iota(all.begin(), all.end(), 0);
    res.subset = PointSubset(X, std::move(all));
    res.tree = std::move(sub.tree);
    res.trace.push_back({"ramsey_phi", alpha, res.psi, X.n(), X.n(), 1.0, "ultrametric input"});
    detail::verify_extraction(X, WM.w, res, alpha, &psi_iv);
    ++guarantee_counters().phi;
    return res;
  }

  auto dec = decompose_sequence(WM.w, q);
  std::vector<int> positive;
  for (int i = 0; i < X.n(); ++i)
    if (dec.y[i] > 0) positive.push_back(i);
  FiniteMetric Xp = X.restrict(positive);
  std::vector<double> wpp;
  wpp.reserve(positive.size());
  for (int i : positive) wpp.push_back(std::pow(dec.y[i], p));
  ExtractionResult core = ramsey_core(WeightedMetric(Xp, wpp), t, q, /*allow_small_t=*/t < 8);

  res.subset = PointSubset(
      X, [&] {
        std::vector<int> s;
        for (int i : core.subset.indices) s.push_back(positive[i]);
        return s;
      }());
  res.tree = core.tree.relabelled([&](int id) { return positive[id]; });
  res.trace = core.trace;
  res.trace.push_back({"ramsey_phi", alpha, res.psi, X.n(), res.subset.size(), 0.0,
                       "t=" + std::to_string(t) + " q=" + fmt17(q)});
  detail::verify_extraction(X, WM.w, res, std::min(4.0 * t, alpha), &psi_iv);
  res.trace.back().distortion = res.report.distortion;
  res.heuristic = res.heuristic || core.heuristic;
  ++guarantee_counters().phi;
  return res;
}

// ---------------------------------------------------------------------
// Equilateral extraction (nets) and its weighted version
// ---------------------------------------------------------------------

/// Greedy net extraction: a subset with aspect ratio <= alpha (hence
/// alpha-equivalent to an equilateral space) of size >= (n/2)^(1/t),
/// t = ceil(log_{alpha/2} Phi).
inline PointSubset equilateral_extract(const FiniteMetric& X, double alpha) {
  require(alpha > 2, Err::AlphaTooSmall, "equilateral extraction needs alpha > 2");
  const int n = X.n();
  if (n <= 2) {
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    return PointSubset(X, std::move(all));
  }
  double phi = aspect_ratio(X);
  std::vector<int> cur(n);
  std::iota(cur.begin(), cur.end(), 0);
  if (phi <= 1 + kRelTol) return PointSubset(X, std::move(cur));

  long tmax = guarded_ceil(std::log(phi) / std::log(alpha / 2));
  std::vector<int> best;
  for (long level = 0; level < std::max<long>(tmax, 1) && cur.size() > 1; ++level) {
    auto dp = detail::diam_pair(X, cur);
    double radius = dp.diam / alpha;
    // maximal separated set, greedy in index order
    std::vector<int> net;
    for (int v : cur) {
      bool far = true;
      for (int c : net)
        if (X.has_exact() ? X.dx(c, v) * rat_of_double(alpha) < rat_of_double(dp.diam)
                          : X.d(c, v) < radius) {
          far = false;
          break;
        }
      if (far) net.push_back(v);
    }
    if (net.size() > best.size()) best = net;
    // descend into the heaviest ball
    std::vector<int> next_best;
    for (int c : net) {
      std::vector<int> ball;
      for (int v : cur)
        if (X.d(c, v) < radius) ball.push_back(v);
      if (ball.size() > next_best.size()) next_best = std::move(ball);
    }
    cur = std::move(next_best);
  }
  return PointSubset(X, std::move(best));
}

/// Weighted equilateral extraction (binary balancing + nets): a subset
/// alpha-equivalent to an equilateral space satisfying the weighted
/// guarantee with psi = 1/4 * ceil(log_{alpha/2} Phi)^(-1).
inline ExtractionResult weighted_equilateral_extract(const FiniteMetric& X,
                                                     const std::vector<double>& w, double alpha,
                                                     double phi_class) {
  require(alpha > 2, Err::AlphaTooSmall, "needs alpha > 2");
  const int n = X.n();
  double phi = std::max(phi_class, aspect_ratio(X));
  long tlev = std::max<long>(1, guarded_ceil(std::log(phi) / std::log(alpha / 2)));
  ExtractionResult res;
  res.psi = 0.25 / static_cast<double>(tlev);

  std::vector<int> chosen;
  if (n == 1) {
    chosen = {0};
  } else {
    std::vector<double> y = balance_binary(w);
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
      if (y[i] > 0) support.push_back(i);
    FiniteMetric Xn = X.restrict(support);
    if (support.size() >= 2 && leq_tol(aspect_ratio(Xn), alpha)) {
      // the whole support already fits the distortion budget; it contains
      // the guaranteed two-point witness, so the weighted bound only gains
      chosen = support;
    } else if (support.size() <= 4) {
      // two heaviest support points form an (exactly) equilateral pair
      std::stable_sort(support.begin(), support.end(),
                       [&](int a, int b) { return w[a] > w[b]; });
      chosen.assign(support.begin(), support.begin() + std::min<std::size_t>(2, support.size()));
      std::sort(chosen.begin(), chosen.end());
    } else {
      PointSubset net = equilateral_extract(Xn, alpha);
      for (int i : net.indices) chosen.push_back(support[i]);
    }
  }
  res.subset = PointSubset(X, std::move(chosen));
  // a level-one star realizes an equilateral-ish subset as an HST
  HstTree star;
  if (X.has_exact()) star.enable_exact_track();
  if (res.subset.size() == 1) {
    int leaf = star.add_leaf(res.subset.indices[0]);
    star.finalize(leaf);
  } else {
    auto dp = detail::diam_pair(X, res.subset.indices);
    std::vector<int> kids;
    for (int i : res.subset.indices) kids.push_back(star.add_leaf(i));
    int r = star.add_internal(dp.diam, std::move(kids));
    if (X.has_exact()) star.set_exact_delta(r, X.dx(dp.a, dp.b));
    star.finalize(r);
  }
  res.tree = std::move(star);
  res.trace.push_back({"weighted_equilateral", alpha, res.psi, n, res.subset.size(), 0.0, ""});
  detail::verify_extraction(X, w, res, alpha);
  res.trace.back().distortion = res.report.distortion;
  return res;
}

// ---------------------------------------------------------------------
// Composition lift
// ---------------------------------------------------------------------

using Extractor = std::function<ExtractionResult(const FiniteMetric&, const std::vector<double>&)>;

struct LiftResult {
  std::vector<int> subset;  // global point ids
  HstTree tree;             // leaf ids = global point ids
  double psi = 1.0;
};

namespace detail {

inline int graft(const HstTree& src, int v, HstTree& dst,
                 const std::function<int(int)>& leaf_handler) {
  const auto& nd = src.node(v);
  if (nd.is_leaf()) return leaf_handler(nd.leaf_id);
  std::vector<int> kids;
  for (int c : nd.children) kids.push_back(graft(src, c, dst, leaf_handler));
  int id = dst.add_internal(nd.delta, std::move(kids));
  if (dst.has_exact_track() && src.has_exact_track()) dst.set_exact_delta(id, src.delta_exact(v));
  return id;
}

}  // namespace detail

/// Lifts an extractor through a composition structure: blocks are lifted
/// recursively, the outer metric is extracted with the blocks' total
/// weights, and the trees are glued (outer labels already carry the
/// composed scale). The glued tree is validated as a k_target-HST; the
/// exponent is the minimum over all extractor invocations.
inline LiftResult composition_lift(const Extractor& ex, double extractor_alpha, double k_target,
                                   const ComposedMetric& Z, const std::vector<double>& w_rows) {
  require(geq_tol(Z.min_beta_eff(), extractor_alpha * k_target), Err::SeparationTooSmall,
          "separation " + fmt17(Z.min_beta_eff()) + " below alpha*k = " +
              fmt17(extractor_alpha * k_target));

  // recursive worker building into one tree arena
  HstTree arena;
  bool exact = Z.flat.has_exact();
  if (exact) arena.enable_exact_track();
  double psi_min = 1.0;

  std::function<std::pair<std::vector<int>, int>(const ComposedMetric&, const std::vector<double>&)>
      work = [&](const ComposedMetric& node,
                 const std::vector<double>& wr) -> std::pair<std::vector<int>, int> {
    if (!node.composed()) {
      if (node.n() == 1) return {{node.points[0]}, arena.add_leaf(node.points[0])};
      ExtractionResult r = ex(node.flat, wr);
      psi_min = std::min(psi_min, r.psi);
      std::vector<int> global;
      for (int i : r.subset.indices) global.push_back(node.points[i]);
      // graft r.tree, relabelling leaves to global ids
      int id = detail::graft(r.tree, r.tree.root(), arena,
                             [&](int lid) { return arena.add_leaf(node.points[lid]); });
      return {global, id};
    }
    const auto& nd = *node.comp;
    const int m = nd.outer.n();
    if (m == 1) return work(nd.blocks[0], wr);

    // outer extraction with the blocks' total weights, then lift only the
    // selected blocks
    std::vector<double> w_outer(m, 0.0);
    std::vector<int> offset(m, 0);
    int off = 0;
    for (int z = 0; z < m; ++z) {
      offset[z] = off;
      int bn = nd.blocks[z].n();
      for (int i = 0; i < bn; ++i) w_outer[z] += wr[off + i];
      off += bn;
    }
    ExtractionResult rm = ex(nd.outer, w_outer);
    psi_min = std::min(psi_min, rm.psi);
    std::map<int, std::pair<std::vector<int>, int>> lifted;
    for (int z : rm.subset.indices) {
      int bn = nd.blocks[z].n();
      std::vector<double> wb(wr.begin() + offset[z], wr.begin() + offset[z] + bn);
      lifted[z] = work(nd.blocks[z], wb);
    }
    std::vector<int> global;
    for (auto& [z, pr] : lifted) global.insert(global.end(), pr.first.begin(), pr.first.end());
    int id = detail::graft(rm.tree, rm.tree.root(), arena,
                           [&](int z) { return lifted.at(z).second; });
    return {global, id};
  };

  auto [subset, root] = work(Z, w_rows);
  arena.finalize(root, k_target, false);
  arena.permit_degenerate();
  arena.validate();

  LiftResult out;
  out.subset = std::move(subset);
  std::sort(out.subset.begin(), out.subset.end());
  out.tree = std::move(arena);
  out.psi = psi_min;
  return out;
}

// ---------------------------------------------------------------------
// Refinement, the 2+eps pipeline, and the extraction driver
// ---------------------------------------------------------------------

namespace detail {

/// Full-space result through the subdominant ultrametric, dilated by c_um
/// so the embedding is noncontractive (u <= d <= c_um * u). psi = 1.
inline ExtractionResult subdominant_result(const FiniteMetric& X, const std::vector<double>& w) {
  auto sub = subdominant_ultrametric(X);
  ExtractionResult res;
  std::vector<int> all(X.n());
  std::iota(all.begin(), all.end(), 0);
  res.subset = PointSubset(X, std::move(all));
  res.tree = sub.c_um_exact ? sub.tree.scaled(sub.c_um, &*sub.c_um_exact)
                            : sub.tree.scaled(sub.c_um);
  res.psi = 1.0;
  res.trace.push_back({"subdominant", sub.c_um, 1.0, X.n(), X.n(), sub.c_um, ""});
  verify_extraction(X, w, res, sub.c_um * (1 + 1e-12));
  return res;
}

/// Subset result through the dilated subdominant ultrametric of X|_S.
inline ExtractionResult subdominant_subset_result(const FiniteMetric& X,
                                                  const std::vector<double>& w, PointSubset s,
                                                  double bound, const char* op) {
  FiniteMetric Xs = X.restrict(s.indices);
  auto sub = subdominant_ultrametric(Xs);
  ExtractionResult r;
  HstTree dil = sub.c_um_exact ? sub.tree.scaled(sub.c_um, &*sub.c_um_exact)
                               : sub.tree.scaled(sub.c_um);
  r.tree = dil.relabelled([&](int i) { return s.indices[i]; });
  r.subset = std::move(s);
  r.psi = 0.0;
  r.trace.push_back({op, bound, 0.0, X.n(), r.subset.size(), sub.c_um, ""});
  verify_extraction(X, w, r, bound);
  r.trace.back().distortion = r.report.distortion;
  return r;
}

/// Greedy subset growth certified by the subdominant ultrametric: scan the
/// points in index order and keep each one whose addition leaves the
/// single-linkage distortion within alpha. The subdominant (minimax-path)
/// matrix is maintained incrementally: a path into the new point x ends
/// with one hop from some c in S, so
///   u'(a,x) = min(d(a,x), min_c max(u(a,c), d(c,x)))
///   u'(a,b) = min(u(a,b), max(u'(a,x), u'(x,b))).
inline ExtractionResult greedy_cum_result(const FiniteMetric& X, const std::vector<double>& w,
                                          double alpha) {
  const int n = X.n();
  std::vector<int> S;
  std::vector<std::vector<double>> u;  // subdominant over S
  for (int x = 0; x < n; ++x) {
    const int s = static_cast<int>(S.size());
    std::vector<double> ux(s, 0.0);
    for (int a = 0; a < s; ++a) {
      double best = X.d(S[a], x);
      for (int c = 0; c < s; ++c) best = std::min(best, std::max(u[a][c], X.d(S[c], x)));
      ux[a] = best;
    }
    // accept with a margin strictly inside alpha so the exact-rational
    // recheck cannot flip a boundary case
    const double cap = alpha * (1 - 1e-9);
    bool ok = true;
    for (int a = 0; a < s && ok; ++a) {
      if (X.d(S[a], x) > cap * ux[a]) ok = false;
      for (int c = a + 1; c < s && ok; ++c) {
        double u2 = std::min(u[a][c], std::max(ux[a], ux[c]));
        if (X.d(S[a], S[c]) > cap * u2) ok = false;
      }
    }
    if (!ok) continue;
    for (int a = 0; a < s; ++a) {
      for (int c = 0; c < s; ++c) u[a][c] = std::min(u[a][c], std::max(ux[a], ux[c]));
      u[a].push_back(ux[a]);
    }
    u.emplace_back(ux);
    u.back().push_back(0.0);
    S.push_back(x);
  }
  return subdominant_subset_result(X, w, PointSubset(X, std::move(S)), alpha,
                                   "greedy_subdominant");
}

/// Star wrap of an equilateral-ish subset.
inline ExtractionResult star_result(const FiniteMetric& X, const std::vector<double>& w,
                                    PointSubset subset, double alpha, const char* op) {
  ExtractionResult res;
  res.subset = std::move(subset);
  HstTree star;
  if (X.has_exact()) star.enable_exact_track();
  if (res.subset.size() == 1) {
    int leaf = star.add_leaf(res.subset.indices[0]);
    star.finalize(leaf);
  } else {
    auto dp = diam_pair(X, res.subset.indices);
    std::vector<int> kids;
    for (int i : res.subset.indices) kids.push_back(star.add_leaf(i));
    int r = star.add_internal(dp.diam, std::move(kids));
    if (X.has_exact()) star.set_exact_delta(r, X.dx(dp.a, dp.b));
    star.finalize(r);
  }
  res.tree = std::move(star);
  res.psi = 0.0;
  res.trace.push_back({op, alpha, 0.0, X.n(), res.subset.size(), 0.0, ""});
  verify_extraction(X, w, res, alpha);
  res.trace.back().distortion = res.report.distortion;
  return res;
}

}  // namespace detail

/// One distortion-halving step (alpha > 8): pass the current ultrametric
/// through the k-HST / composition / composition-lift pipeline with
/// beta = alpha/2 - 2, Phi = 2^(2 alpha) and k = alpha * alpha' * beta
/// carried in log space. Weights `v` live on X and are the caller's current
/// stage weights; the result's psi is the product of the stage exponents.
inline ExtractionResult refine(const FiniteMetric& X, const std::vector<double>& v,
                               const ExtractionResult& R, double alpha);

/// 2+eps extraction pipeline (the distortions-close-to-2 theorem): constant
/// extraction at theta/2, ultrametric -> k'-HST at alpha = 2, composition
/// re-metrization at beta = 8 k / eps, and a weighted-equilateral lift at
/// 2 + eps/4. Internal entry point: eps up to 3 is still sound at k = 1.
inline ExtractionResult small_alpha_pipeline(const FiniteMetric& X, const std::vector<double>& w,
                                             double eps, double k_target, double theta);

/// Public 2+eps extraction with the documented eps domain.
inline ExtractionResult small_alpha_extract(const FiniteMetric& X, double eps, double k_target = 1,
                                            double theta = 64) {
  require(eps > 0 && eps < 1, Err::InvalidParameters, "eps must be in (0,1)");
  require(k_target >= 1, Err::InvalidParameters, "k must be >= 1");
  return small_alpha_pipeline(X, std::vector<double>(X.n(), 1.0), eps, k_target, theta);
}

/// The extraction driver: returns a subset alpha-equivalent (verified) to
/// the returned ultrametric, taking the best over the refinement pipeline
/// and the certified constructive candidates. alpha <= 2 falls back to the
/// oracle / scale-class search with a warning (only log-size guarantees
/// exist below the phase transition). Expensive candidate families are
/// evaluated on a fixed alpha grid (floored), which makes the subset size
/// nondecreasing in alpha by construction.
inline ExtractionResult ramsey_extract(const FiniteMetric& X, double alpha,
                                       std::vector<double> w = {});

namespace detail {

inline const std::vector<double>& alpha_grid() {
  static const std::vector<double> g = [] {
    std::vector<double> v{2.0625, 2.125, 2.25, 2.5, 3, 4, 5, 6, 8};
    for (double x = 12; x <= 0x1p40; x *= 2) {
      v.push_back(x);          // 12, 24, 48, ...
      v.push_back(x * 4 / 3);  // 16, 32, 64, ...
    }
    std::sort(v.begin(), v.end());
    return v;
  }();
  return g;
}

inline double grid_floor(double alpha) {
  const auto& g = alpha_grid();
  double best = g.front();
  for (double x : g)
    if (x <= alpha * (1 + kRelTol)) best = x;
  return std::min(best, alpha);
}

/// Largest canonical eps <= alpha - 2 (keeps the 2+eps candidates nested
/// across alphas; within 2^-20 of the transition the raw value is used).
inline double eps_floor(double alpha) {
  double d = alpha - 2;
  if (d >= 2.9) return 2.9;
  if (d >= 0.95) return 0.95;
  for (int k = 1; k <= 20; ++k) {
    double e = std::ldexp(1.0, -k);
    if (d >= e) return e;
  }
  return d;
}

/// Large-alpha pipeline: start from the subdominant ultrametric at
/// alpha0 = 2^ceil(log2 min(Phi, n)) and halve by refinement until the
/// target is reached.
inline ExtractionResult large_alpha_pipeline(const FiniteMetric& X, const std::vector<double>& w,
                                             double alpha) {
  ExtractionResult R = subdominant_result(X, w);
  double alpha0 = std::exp2(guarded_ceil(std::log2(
      std::max(2.0, std::min(aspect_ratio(X), static_cast<double>(X.n()))))));
  double cum_psi = 1.0;
  std::vector<double> v = w;
  double cur = std::max(alpha0, 8.0);
  std::vector<StageRecord> trace = R.trace;
  while (cur > alpha * (1 + kRelTol)) {
    ExtractionResult next = refine(X, v, R, cur);
    cum_psi *= next.psi;
    cur = cur / 2;
    for (const auto& s : next.trace) trace.push_back(s);
    R = std::move(next);
    v = pow_weights(w, cum_psi);
  }
  R.psi = cum_psi;
  R.trace = std::move(trace);
  verify_extraction(X, w, R, alpha);
  return R;
}

/// alpha <= 2 fallback: exact oracle when small, otherwise a scale-class
/// greedy for a subset of aspect ratio <= alpha.
inline ExtractionResult low_alpha_fallback(const FiniteMetric& X, const std::vector<double>& w,
                                           double alpha);

/// Extractor used inside refinement at target distortion `target`.
inline ExtractionResult inner_extract(const FiniteMetric& M, const std::vector<double>& wm,
                                      double target, double theta) {
  if (M.n() <= 2 || is_ultrametric(M)) return subdominant_result(M, wm);
  if (target > 8) return ramsey_phi(WeightedMetric(M, wm), target);
  return small_alpha_pipeline(M, wm, std::min(target - 2, 2.9), 1.0, theta);
}

}  // namespace detail

inline ExtractionResult refine(const FiniteMetric& X, const std::vector<double>& v,
                               const ExtractionResult& R, double alpha) {
  require(alpha > 8, Err::AlphaTooSmall, "refinement needs alpha > 8, got " + fmt17(alpha));
  const double beta = alpha / 2 - 2;
  const double log2_alpha1 = 2 * alpha - std::log2(alpha);      // alpha' = 2^(2 alpha)/alpha
  const double alpha1 = std::exp2(std::min(log2_alpha1, 996.0));  // clamped for checks only
  const double log2_k = std::log2(alpha) + log2_alpha1 + std::log2(beta);

  // stage 1: ultrametric -> k-HST on the current tree
  std::map<int, double> leafw;
  for (int i : R.subset.indices) leafw[i] = v[i];
  UmToKhstResult st1 = um_to_khst_log(R.tree, leafw, log2_k, alpha1);
  const std::vector<int>& Sa = st1.kept_leaf_ids;

  // stage 2: re-metrize against the selected points of X
  FiniteMetric Xa = X.restrict(Sa);
  std::map<int, int> rank;
  for (std::size_t i = 0; i < Sa.size(); ++i) rank[Sa[i]] = static_cast<int>(i);
  HstTree W = st1.tree.relabelled([&](int id) { return rank.at(id); });
  const double phi1 = std::min(alpha * alpha1, 1e300);
  KhstToCompositionResult st2 = khst_to_composition(Xa, W, phi1, beta);

  // stage 3: extract at beta inside the composition and lift
  std::vector<double> va;
  va.reserve(Sa.size());
  for (int i : Sa) va.push_back(std::pow(v[i], st1.psi));
  std::vector<double> w_rows(Sa.size());
  for (std::size_t r = 0; r < st2.z.points.size(); ++r) w_rows[r] = va[st2.z.points[r]];
  const double theta = 64;
  Extractor ex = [&](const FiniteMetric& M, const std::vector<double>& wm) {
    return detail::inner_extract(M, wm, beta, theta);
  };
  LiftResult st3 = composition_lift(ex, beta, 1.0, st2.z, w_rows);

  // st3 ids are indices into Xa (= positions in the sorted Sa)
  ExtractionResult out;
  std::vector<int> chosen;
  for (int xa : st3.subset) chosen.push_back(Sa[xa]);
  std::sort(chosen.begin(), chosen.end());
  out.subset = PointSubset(X, std::move(chosen));
  out.tree = st3.tree.relabelled([&](int xa) { return Sa[xa]; });
  out.psi = st1.psi * st3.psi;
  out.trace.push_back({"refine", alpha, out.psi, R.subset.size(), out.subset.size(), 0.0,
                       "beta=" + fmt17(beta)});
  // the weighted guarantee is relative to the refined space (R.subset
  // with the stage weights v)
  {
    std::vector<Rat> all, kept;
    for (int i : R.subset.indices) all.push_back(rat_of_double(v[i]));
    for (int i : out.subset.indices) kept.push_back(rat_of_double(v[i]));
    double lhs, rhs;
    require(certify_weighted_guarantee(kept, all, out.psi, &lhs, &rhs), Err::GuaranteeViolation,
            "refinement weighted guarantee failed");
    out.weighted_lhs = lhs;
    out.weighted_rhs = rhs;
  }
  // distortion: verified against X at alpha/2
  FiniteMetric sub = X.restrict(out.subset.indices);
  out.map = identity_map(sub.n());
  out.report = distortion(sub, out.tree.metric(), out.map);
  require(out.report.leq(alpha / 2), Err::GuaranteeViolation,
          "refinement distortion " + fmt17(out.report.distortion) + " > alpha/2");
  require(out.report.noncontractive(), Err::GuaranteeViolation,
          "refinement must be noncontractive");
  out.trace.back().distortion = out.report.distortion;
  return out;
}

inline ExtractionResult small_alpha_pipeline(const FiniteMetric& X, const std::vector<double>& w,
                                             double eps, double k_target, double theta) {
  // the lift needs beta = 8k/eps >= (2 + eps/4) k, i.e. eps(2 + eps/4) <= 8
  require(eps > 0 && eps <= 2.9, Err::InvalidParameters, "eps must be in (0, 2.9]");
  require(k_target >= 1, Err::InvalidParameters, "k must be >= 1");
  require(theta > 16, Err::InvalidParameters, "theta must exceed 16");
  const double bound = 2 + eps;

  // ultrametric inputs pass through at distortion <= 2 (k-HST conversion
  // only when a separated tree is demanded)
  if (is_ultrametric(X) && k_target <= 1) {
    ExtractionResult r = detail::subdominant_result(X, w);
    r.trace.push_back({"small_alpha", bound, r.psi, X.n(), X.n(), r.report.distortion,
                       "ultrametric input"});
    return r;
  }

  // stage 1: constant-distortion extraction at theta/2
  ExtractionResult R1 = is_ultrametric(X) ? detail::subdominant_result(X, w)
                                          : detail::large_alpha_pipeline(X, w, theta / 2);

  // stage 2: ultrametric -> k'-HST at alpha = 2
  const double beta = 8.0 * k_target / eps;
  const double kprime = theta * beta;
  std::vector<double> v1 = detail::pow_weights(w, R1.psi);
  std::map<int, double> leafw;
  for (int i : R1.subset.indices) leafw[i] = v1[i];
  UmToKhstResult st2 = um_to_khst_log(R1.tree, leafw, std::log2(kprime), 2.0);
  const std::vector<int>& S2 = st2.kept_leaf_ids;

  // stage 3: re-metrize into comp_beta(theta)
  FiniteMetric X2 = X.restrict(S2);
  std::map<int, int> rank;
  for (std::size_t i = 0; i < S2.size(); ++i) rank[S2[i]] = static_cast<int>(i);
  HstTree W = st2.tree.relabelled([&](int id) { return rank.at(id); });
  KhstToCompositionResult st3 = khst_to_composition(X2, W, theta, beta);

  // stage 4: weighted equilateral extraction lifted through the composition
  const double alpha_eq = 2 + eps / 4;
  std::vector<double> v2;
  v2.reserve(S2.size());
  for (int i : S2) v2.push_back(std::pow(v1[i], st2.psi));
  std::vector<double> w_rows(S2.size());
  for (std::size_t r = 0; r < st3.z.points.size(); ++r) w_rows[r] = v2[st3.z.points[r]];
  Extractor ex = [&](const FiniteMetric& M, const std::vector<double>& wm) {
    return weighted_equilateral_extract(M, wm, alpha_eq, theta);
  };
  LiftResult st4 = composition_lift(ex, alpha_eq, k_target, st3.z, w_rows);

  // st4 ids are indices into X2 (= positions in the sorted S2)
  ExtractionResult out;
  std::vector<int> chosen;
  for (int x2 : st4.subset) chosen.push_back(S2[x2]);
  std::sort(chosen.begin(), chosen.end());
  out.subset = PointSubset(X, std::move(chosen));
  out.tree = st4.tree.relabelled([&](int x2) { return S2[x2]; });
  out.psi = R1.psi * st2.psi * st4.psi;
  out.heuristic = R1.heuristic;
  out.trace = R1.trace;
  out.trace.push_back({"small_alpha", bound, out.psi, X.n(), out.subset.size(), 0.0,
                       "eps=" + fmt17(eps) + " k=" + fmt17(k_target) + " theta=" + fmt17(theta)});
  detail::verify_extraction(X, w, out, bound);
  out.trace.back().distortion = out.report.distortion;
  return out;
}

namespace detail {

inline ExtractionResult low_alpha_fallback(const FiniteMetric& X, const std::vector<double>& w,
                                           double alpha) {
  const int n = X.n();
  std::vector<ExtractionResult> cand;
  if (n <= 15) {
    PointSubset s = exact_ramsey_oracle(X, alpha, RamseyTarget::UM);
    cand.push_back(subdominant_subset_result(X, w, std::move(s), alpha, "oracle_fallback"));
  } else {
    // scale classes: for a deterministic sample of scales r, greedily keep
    // points with pairwise distances in [r, alpha*r]
    std::vector<double> scales;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) scales.push_back(X.d(i, j));
    std::sort(scales.begin(), scales.end());
    std::size_t step = std::max<std::size_t>(1, scales.size() / 128);
    std::vector<int> best;
    for (std::size_t si = 0; si < scales.size(); si += step) {
      double r = scales[si];
      std::vector<int> S;
      for (int v = 0; v < n; ++v) {
        bool ok = true;
        for (int u : S)
          if (X.d(u, v) < r || X.d(u, v) > alpha * r * (1 + kRelTol)) {
            ok = false;
            break;
          }
        if (ok) S.push_back(v);
      }
      if (S.size() > best.size()) best = std::move(S);
    }
    cand.push_back(star_result(X, w, PointSubset(X, std::move(best)), alpha, "scale_class"));
  }
  ExtractionResult r = std::move(cand.front());
  r.warning = "AlphaAtMostTwo: below the phase transition only logarithmic "
              "size guarantees exist; returning the certified fallback";
  r.heuristic = true;
  return r;
}

}  // namespace detail

inline ExtractionResult ramsey_extract(const FiniteMetric& X, double alpha,
                                       std::vector<double> w) {
  if (w.empty()) w.assign(X.n(), 1.0);
  require(static_cast<int>(w.size()) == X.n(), Err::SizeMismatch, "weight count != n");
  require(alpha >= 1, Err::InvalidParameters, "alpha must be >= 1");
  if (X.n() == 1) {
    ExtractionResult r = detail::subdominant_result(X, w);
    return r;
  }
  if (alpha <= 2) return detail::low_alpha_fallback(X, w, alpha);

  std::vector<ExtractionResult> cand;
  std::vector<StageRecord> skipped;
  auto consider = [&](std::function<ExtractionResult()> f, const char* what) {
    try {
      cand.push_back(f());
    } catch (const Error& e) {
      StageRecord sr;
      sr.op = what;
      sr.note = std::string("skipped: ") + e.what();
      skipped.push_back(std::move(sr));
    }
  };

  // exact-at-alpha candidates whose size is monotone in alpha by nature
  auto sub = subdominant_ultrametric(X);
  bool cum_ok = sub.c_um_exact ? (*sub.c_um_exact <= rat_of_double(alpha))
                               : leq_tol(sub.c_um, alpha);
  if (cum_ok) {
    ExtractionResult full = detail::subdominant_result(X, w);
    full.trace.back().alpha = alpha;
    return full;  // the whole space embeds at distortion <= alpha: optimal
  }
  if (X.n() <= 12)
    consider([&] {
      PointSubset s = exact_ramsey_oracle(X, alpha, RamseyTarget::UM);
      return detail::subdominant_subset_result(X, w, std::move(s), alpha, "oracle");
    }, "oracle");

  // grid-floored candidate families (keeps size monotone in alpha)
  for (double g : detail::alpha_grid()) {
    if (g > alpha * (1 + kRelTol)) break;
    consider([&] { return detail::greedy_cum_result(X, w, g); }, "greedy_subdominant");
    if (g > 2)
      consider([&] {
        return detail::star_result(X, w, equilateral_extract(X, g), g, "equilateral");
      }, "equilateral");
  }
  const double g = detail::grid_floor(alpha);
  if (g > 8) {
    consider([&] { return detail::large_alpha_pipeline(X, w, g); }, "refinement_pipeline");
    consider([&] { return ramsey_phi(WeightedMetric(X, w), g); }, "ramsey_phi");
  } else {
    const double e1 = detail::eps_floor(alpha), e2 = std::min(e1, 0.95);
    consider([&] { return small_alpha_pipeline(X, w, e1, 1.0, 64.0); }, "small_alpha");
    if (e2 < e1)
      consider([&] { return small_alpha_pipeline(X, w, e2, 1.0, 64.0); }, "small_alpha");
  }

  require(!cand.empty(), Err::GuaranteeViolation, "no extraction candidate succeeded");
  // best-of: subset size, then kept weight, then lexicographic indices
  std::size_t best = 0;
  auto kept_weight = [&](const ExtractionResult& r) {
    double s = 0;
    for (int i : r.subset.indices) s += w[i];
    return s;
  };
  for (std::size_t i = 1; i < cand.size(); ++i) {
    const auto& a = cand[i];
    const auto& b = cand[best];
    if (a.subset.size() != b.subset.size()) {
      if (a.subset.size() > b.subset.size()) best = i;
    } else if (kept_weight(a) != kept_weight(b)) {
      if (kept_weight(a) > kept_weight(b)) best = i;
    } else if (std::lexicographical_compare(a.subset.indices.begin(), a.subset.indices.end(),
                                            b.subset.indices.begin(), b.subset.indices.end())) {
      best = i;
    }
  }
  ExtractionResult out = std::move(cand[best]);
  for (auto& s : skipped) out.trace.push_back(std::move(s));
  return out;
}

}  // namespace mr
