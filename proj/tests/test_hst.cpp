#include <catch2/catch_amalgamated.hpp>

#include "metric_ramsey/hst.hpp"
#include "metric_ramsey/numeric.hpp"
#include "metric_ramsey/ultrametric.hpp"

using namespace mr;

namespace {

// root Delta=4 over {leaf a; internal Delta=2 over leaves b,c}
HstTree nested_tree() {
  HstTree t;
  int a = t.add_leaf(0);
  int b = t.add_leaf(1);
  int c = t.add_leaf(2);
  int inner = t.add_internal(2.0, {b, c});
  int root = t.add_internal(4.0, {a, inner});
  t.finalize(root);
  return t;
}

HstTree random_hst(int max_leaves, std::uint64_t seed) {
  Rng rng(seed);
  HstTree t;
  int next_id = 0;
  // grow recursively: each internal vertex gets 2-4 children, label decays
  std::function<int(double, int)> grow = [&](double delta, int depth) -> int {
    if (depth >= 5 || next_id >= max_leaves || rng.uniform() < 0.25) return t.add_leaf(next_id++);
    int deg = 2 + static_cast<int>(rng.below(3));
    std::vector<int> kids;
    for (int i = 0; i < deg && next_id < max_leaves; ++i)
      kids.push_back(grow(delta * (0.2 + 0.55 * rng.uniform()), depth + 1));
    if (kids.size() < 2) return kids.empty() ? t.add_leaf(next_id++) : kids[0];
    return t.add_internal(delta, std::move(kids));
  };
  int root = grow(100.0, 0);
  if (t.node(root).is_leaf()) {
    int other = t.add_leaf(next_id++);
    root = t.add_internal(100.0, {root, other});
  }
  t.finalize(root);
  return t;
}

}  // namespace

TEST_CASE("hst_metric") {
  // two leaves under Delta=2
  HstTree t2;
  int l0 = t2.add_leaf(0), l1 = t2.add_leaf(1);
  t2.finalize(t2.add_internal(2.0, {l0, l1}));
  FiniteMetric m2 = hst_metric(t2);
  CHECK(m2.d(0, 1) == 2.0);

  // nested tree: lca walk gives d(a,b) = d(a,c) = 4, d(b,c) = 2
  FiniteMetric m = hst_metric(nested_tree());
  CHECK(m.d(0, 1) == 4.0);
  CHECK(m.d(0, 2) == 4.0);
  CHECK(m.d(1, 2) == 2.0);

  // declared k = 3 fails: 2 > 4/3
  HstTree bad = nested_tree();
  bad.finalize(bad.root(), 3.0, false);
  CHECK_THROWS_AS(hst_metric(bad), Error);

  // degenerate vertex rejected when not flagged
  HstTree dg;
  int leaf = dg.add_leaf(0);
  int mid = dg.add_internal(1.0, {leaf});
  int lf2 = dg.add_leaf(1);
  dg.finalize(dg.add_internal(2.0, {mid, lf2}));
  CHECK_THROWS_AS(dg.validate(), Error);
  dg.permit_degenerate();
  CHECK_NOTHROW(dg.validate());
}

TEST_CASE("hst metric is an ultrametric") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    FiniteMetric m = hst_metric(random_hst(20, seed));
    CHECK(is_ultrametric(m));
    // and it passes full metric validation, triangle pass included
    std::vector<std::vector<double>> rows(m.n(), std::vector<double>(m.n()));
    for (int i = 0; i < m.n(); ++i)
      for (int j = 0; j < m.n(); ++j) rows[i][j] = m.d(i, j);
    CHECK_NOTHROW(FiniteMetric::build(std::move(rows)));
    for (int i = 0; i < m.n(); ++i)
      for (int j = 0; j < m.n(); ++j)
        for (int k = 0; k < m.n(); ++k)
          if (i != j && j != k && i != k)
            CHECK(leq_tol(m.d(i, k), std::max(m.d(i, j), m.d(j, k))));
  }
}

TEST_CASE("exact_k_hst") {
  CHECK_THROWS_AS(exact_k_hst(nested_tree(), 1.0), Error);  // InvalidK

  // already exact input: identity, distortion 1
  HstTree ex;
  {
    int a = ex.add_leaf(0), b = ex.add_leaf(1), c = ex.add_leaf(2);
    int inner = ex.add_internal(2.0, {b, c});
    ex.finalize(ex.add_internal(4.0, {a, inner}));
  }
  auto [t1, r1] = exact_k_hst(ex, 2.0);
  CHECK(r1.distortion == 1.0);
  CHECK(t1.exact());

  // root 8 / child 3 at k = 2: i = 1, child relabels to 4, distortion 4/3
  HstTree t;
  {
    int a = t.add_leaf(0), b = t.add_leaf(1), c = t.add_leaf(2);
    int inner = t.add_internal(3.0, {b, c});
    t.finalize(t.add_internal(8.0, {a, inner}));
  }
  auto [t2, r2] = exact_k_hst(t, 2.0);
  FiniteMetric m2 = hst_metric(t2);
  CHECK(m2.d(1, 2) == 4.0);
  CHECK(r2.distortion == Catch::Approx(4.0 / 3.0));
  CHECK(r2.noncontractive());

  // root 8 / child 1 at k = 2: i = 3, chain 4, 2 inserted, distances kept
  HstTree t3;
  {
    int a = t3.add_leaf(0), b = t3.add_leaf(1), c = t3.add_leaf(2);
    int inner = t3.add_internal(1.0, {b, c});
    t3.finalize(t3.add_internal(8.0, {a, inner}));
  }
  auto [t4, r4] = exact_k_hst(t3, 2.0);
  CHECK(hst_metric(t4).d(1, 2) == 1.0);
  CHECK(r4.distortion == 1.0);
  t4.validate();

  // random trees: output validates as exact k-HST, distortion <= k,
  // leaf partition preserved at surviving levels (lca structure)
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    HstTree rt = random_hst(16, seed);
    double k = 1.5 + 0.5 * (seed % 4);
    auto [out, rep] = exact_k_hst(rt, k);
    CHECK(out.exact());
    CHECK_NOTHROW(out.validate());
    CHECK(rep.leq(k));
    CHECK(rep.noncontractive());
    // lca structure: the new metric's level sets refine consistently --
    // equal old distances map to equal new distances
    FiniteMetric before = hst_metric(rt), after = hst_metric(out);
    for (int i = 0; i < before.n(); ++i)
      for (int j = i + 1; j < before.n(); ++j)
        for (int a = 0; a < before.n(); ++a)
          for (int b = a + 1; b < before.n(); ++b)
            if (before.d(i, j) == before.d(a, b))
              CHECK(after.d(i, j) == Catch::Approx(after.d(a, b)));
  }
}

TEST_CASE("embed_l2 exact distances") {
  // two leaves at Delta = D
  HstTree t2;
  int l0 = t2.add_leaf(0), l1 = t2.add_leaf(1);
  t2.finalize(t2.add_internal(5.0, {l0, l1}));
  auto pts = embed_l2(t2);
  CHECK(l2_dist(pts[0], pts[1]) == Catch::Approx(5.0).epsilon(1e-12));

  // 3-leaf star at Delta = 2: regular triangle
  HstTree st;
  {
    std::vector<int> kids{st.add_leaf(0), st.add_leaf(1), st.add_leaf(2)};
    st.finalize(st.add_internal(2.0, kids));
  }
  auto p3 = embed_l2(st);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      CHECK(l2_dist(p3[i], p3[j]) == Catch::Approx(2.0).epsilon(1e-12));

  // the nested {4,4,2} tree: verify all three norms numerically
  auto pn = embed_l2(nested_tree());
  CHECK(l2_dist(pn[0], pn[1]) == Catch::Approx(4.0).epsilon(1e-12));
  CHECK(l2_dist(pn[0], pn[2]) == Catch::Approx(4.0).epsilon(1e-12));
  CHECK(l2_dist(pn[1], pn[2]) == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("naive ultrametric") {
  // equilateral input: star, distortion 1
  FiniteMetric eq = FiniteMetric::build({{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  auto req = naive_ultrametric(eq);
  CHECK(req.report.distortion == 1.0);
  CHECK(req.tree.leaf_count() == 3);

  // line {0,1,2}: both thresholds isolate everything, star at Delta = 2,
  // the unit pairs stretch to 2
  FiniteMetric line = FiniteMetric::build({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  auto rl = naive_ultrametric(line);
  CHECK(rl.report.distortion == Catch::Approx(2.0));
  CHECK(rl.tree.metric().d(0, 1) == 2.0);

  // ultrametric inputs reproduce themselves (diameter-class split)
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    FiniteMetric um = hst_metric(random_hst(14, seed));
    auto r = naive_ultrametric(um);
    CHECK(r.report.distortion == Catch::Approx(1.0));
    CHECK(r.report.noncontractive());
  }

  // general guarantee: noncontractive, <= n-Lipschitz, diameter preserved
  FiniteMetric p5 = FiniteMetric::build({{0, 1, 2, 3, 4},
                                         {1, 0, 1, 2, 3},
                                         {2, 1, 0, 1, 2},
                                         {3, 2, 1, 0, 1},
                                         {4, 3, 2, 1, 0}});
  auto rp = naive_ultrametric(p5);
  CHECK(rp.report.leq(5.0));
  CHECK(rp.report.noncontractive());
  CHECK(rp.tree.metric().diameter() == p5.diameter());
}

TEST_CASE("canonical trees") {
  // chained equal labels merge to a star
  HstTree t;
  int a = t.add_leaf(0);
  int b = t.add_leaf(1);
  int c = t.add_leaf(2);
  int inner = t.add_internal(2.0, {b, c});
  t.finalize(t.add_internal(2.0, {a, inner}));
  HstTree canon = t.canonical();
  CHECK(canon.size() == 4);  // one internal + three leaves
  FiniteMetric m = hst_metric(canon);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) CHECK(m.d(i, j) == 2.0);
}
