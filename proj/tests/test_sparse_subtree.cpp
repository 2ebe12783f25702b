#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <functional>
#include <map>

#include "metric_ramsey/numeric.hpp"
#include "metric_ramsey/trees_sparse.hpp"

using namespace mr;

namespace {

HstTree star(int m, double delta = 2.0) {
  HstTree t;
  std::vector<int> kids;
  for (int i = 0; i < m; ++i) kids.push_back(t.add_leaf(i));
  t.finalize(t.add_internal(delta, kids));
  return t;
}

HstTree complete_binary_depth2() {
  HstTree t;
  int a = t.add_leaf(0), b = t.add_leaf(1), c = t.add_leaf(2), d = t.add_leaf(3);
  int l = t.add_internal(1.0, {a, b});
  int r = t.add_internal(1.0, {c, d});
  t.finalize(t.add_internal(4.0, {l, r}));
  return t;
}

// brute force: maximize sum w^e over leaf subsets whose induced subtree is
// (i,h)-periodically sparse for some i
double brute_force_sparse(const HstTree& t, const std::map<int, double>& w, int h,
                          SparseMode mode) {
  auto leaves = t.leaves();
  int m = static_cast<int>(leaves.size());
  double e = mode == SparseMode::DegenerateOneResidue ? (h - 1.0) / h : 1.0 / h;
  double best = 0;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    // induced subtree: count children kept per internal vertex
    std::vector<char> kept(t.size(), 0);
    for (int i = 0; i < m; ++i)
      if (mask >> i & 1) {
        int v = leaves[i];
        while (v >= 0 && !kept[v]) {
          kept[v] = 1;
          v = t.node(v).parent;
        }
      }
    auto branching = [&](int v) {
      int cnt = 0;
      for (int c : t.node(v).children) cnt += kept[c];
      return cnt;
    };
    bool some_residue_ok = false;
    for (int i = 0; i < h && !some_residue_ok; ++i) {
      bool ok = true;
      for (int v = 0; v < t.size() && ok; ++v) {
        if (!kept[v] || t.node(v).is_leaf()) continue;
        bool restricted = mode == SparseMode::DegenerateOneResidue
                              ? (t.node(v).depth % h) == i
                              : (t.node(v).depth % h) != i;
        if (restricted && branching(v) != 1) ok = false;
      }
      some_residue_ok = ok;
    }
    if (!some_residue_ok) continue;
    double val = 0;
    for (int i = 0; i < m; ++i)
      if (mask >> i & 1) val += std::pow(w.at(t.node(leaves[i]).leaf_id), e);
    best = std::max(best, val);
  }
  return best;
}

}  // namespace

TEST_CASE("sparse subtree basics") {
  // single leaf: itself
  HstTree one;
  one.finalize(one.add_leaf(0));
  std::map<int, double> w1{{0, 3.0}};
  auto r1 = periodically_sparse_subtree(one, w1, 2);
  CHECK(r1.tree.leaf_ids() == std::vector<int>{0});
  CHECK(r1.value == Catch::Approx(std::sqrt(3.0)));

  CHECK_THROWS_AS(periodically_sparse_subtree(star(3), {{0, 1}, {1, 1}, {2, 1}}, 1), Error);

  // depth-1 star, h = 2, uniform: keeping all leaves (i = 1) beats keeping
  // one (i = 0): m sqrt(w) vs sqrt(w), computed by hand for m = 3
  std::map<int, double> w{{0, 1.0}, {1, 1.0}, {2, 1.0}};
  auto r = periodically_sparse_subtree(star(3), w, 2);
  CHECK(r.residue == 1);
  CHECK(r.tree.leaf_count() == 3);
  CHECK(r.value == Catch::Approx(3.0));
  CHECK(r.value >= std::sqrt(3.0));  // the lemma's guarantee (sum w)^(1/2)
}

TEST_CASE("sparse subtree equals brute force") {
  // complete binary tree depth 2, h = 2, uniform
  std::map<int, double> w{{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}};
  auto dp = periodically_sparse_subtree(complete_binary_depth2(), w, 2);
  double bf = brute_force_sparse(complete_binary_depth2(), w, 2, SparseMode::DegenerateOneResidue);
  CHECK(dp.value == Catch::Approx(bf));
  CHECK(is_periodically_sparse(dp.tree, 2, dp.residue, SparseMode::DegenerateOneResidue));

  // random trees up to 12 leaves, both modes, random weights
  Rng rng(5);
  for (int it = 0; it < 30; ++it) {
    HstTree t;
    int next = 0;
    std::function<int(double, int)> grow = [&](double delta, int depth) -> int {
      if (depth >= 4 || next >= 10 || rng.uniform() < 0.3) return t.add_leaf(next++);
      std::vector<int> kids;
      int deg = 2 + static_cast<int>(rng.below(2));
      for (int i = 0; i < deg && next < 10; ++i)
        kids.push_back(grow(delta * (0.3 + 0.3 * rng.uniform()), depth + 1));
      if (kids.size() < 2) return kids.empty() ? t.add_leaf(next++) : kids[0];
      return t.add_internal(delta, kids);
    };
    int root = grow(16.0, 0);
    if (t.node(root).is_leaf()) root = t.add_internal(16.0, {root, t.add_leaf(next++)});
    t.finalize(root);
    std::map<int, double> wr;
    for (int id : t.leaf_ids()) wr[id] = 0.1 + rng.uniform();
    for (int h : {2, 3}) {
      for (auto mode : {SparseMode::DegenerateOneResidue, SparseMode::BranchOneResidue}) {
        auto dpres = periodically_sparse_subtree(t, wr, h, mode);
        double bfres = brute_force_sparse(t, wr, h, mode);
        CHECK(dpres.value == Catch::Approx(bfres).epsilon(1e-9));
        CHECK(is_periodically_sparse(dpres.tree, h, dpres.residue, mode));
        // weighted guarantee of the lemma
        double tot = 0;
        for (auto& [id, ww] : wr) tot += ww;
        CHECK(dpres.value >= std::pow(tot, dpres.exponent) * (1 - 1e-9));
      }
    }
  }
}
