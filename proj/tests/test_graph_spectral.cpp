#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numeric>

#include "metric_ramsey/instances.hpp"
#include "metric_ramsey/spectral.hpp"

using namespace mr;

namespace {

Graph petersen() {
  // outer 5-cycle, inner pentagram, spokes
  std::vector<std::pair<int, int>> es;
  for (int i = 0; i < 5; ++i) {
    es.emplace_back(i, (i + 1) % 5);
    es.emplace_back(5 + i, 5 + (i + 2) % 5);
    es.emplace_back(i, 5 + i);
  }
  return Graph(10, std::move(es));
}

Graph cycle(int n) {
  std::vector<std::pair<int, int>> es;
  for (int i = 0; i < n; ++i) es.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(es));
}

Graph complete(int n) {
  std::vector<std::pair<int, int>> es;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) es.emplace_back(i, j);
  return Graph(n, std::move(es));
}

// exact self-mixing by independent enumeration (duplicated on purpose: the
// acceptance suite relies on two independent computations agreeing)
double mu_oracle(const Graph& g) {
  int d = g.regular_degree();
  double best = -1e300;
  for (unsigned mask = 1; mask < (1u << g.n()); ++mask) {
    int size = __builtin_popcount(mask);
    long es = 0;
    for (auto [u, v] : g.edges())
      if ((mask >> u & 1) && (mask >> v & 1)) ++es;
    best = std::max(best, static_cast<double>(size) / g.n() -
                              2.0 * es / (static_cast<double>(d) * size));
  }
  return best;
}

}  // namespace

TEST_CASE("graph basics") {
  Graph p = petersen();
  CHECK(p.regular_degree() == 3);
  CHECK(p.girth() == 5);
  CHECK(p.diameter() == 2);
  CHECK(p.connected());
  CHECK(cycle(6).girth() == 6);
}

TEST_CASE("spectral profile") {
  // K4: eigenvalues {3, -1, -1, -1}; gamma_+ = 1/3
  auto pk4 = spectral_profile(complete(4));
  CHECK(pk4.eigenvalues[0] == Catch::Approx(3.0));
  for (int i = 1; i < 4; ++i) CHECK(pk4.eigenvalues[i] == Catch::Approx(-1.0));
  CHECK(pk4.gamma_plus == Catch::Approx(1.0 / 3.0));

  // 6-cycle: lambda_2 = 2 cos(2 pi / 6) = 1, gamma = 1/2
  auto pc6 = spectral_profile(cycle(6));
  CHECK(pc6.eigenvalues[1] == Catch::Approx(1.0));
  CHECK(pc6.gamma == Catch::Approx(0.5));

  // Petersen: spectrum {3, 1 x5, -2 x4}, gamma_+ = 2/3
  auto pp = spectral_profile(petersen());
  CHECK(pp.eigenvalues[0] == Catch::Approx(3.0));
  for (int i = 1; i <= 5; ++i) CHECK(pp.eigenvalues[i] == Catch::Approx(1.0));
  for (int i = 6; i <= 9; ++i) CHECK(pp.eigenvalues[i] == Catch::Approx(-2.0));
  CHECK(pp.gamma_plus == Catch::Approx(2.0 / 3.0));

  // spectrum sums: trace 0 and sum of squares = d n for regular simple G
  for (std::uint64_t seed : {1, 2, 3}) {
    Graph g = gen_random_regular(16, 3, seed);
    auto prof = spectral_profile(g);
    double s1 = std::accumulate(prof.eigenvalues.begin(), prof.eigenvalues.end(), 0.0);
    double s2 = 0;
    for (double x : prof.eigenvalues) s2 += x * x;
    CHECK(std::abs(s1) < 1e-6);
    CHECK(s2 == Catch::Approx(3.0 * 16).margin(1e-6));
    CHECK(prof.gamma_plus >= 1.0 / 3 - 1e-12);  // standard estimate
  }

  CHECK_THROWS_AS(spectral_profile(Graph(3, {{0, 1}})), Error);  // NotRegular
}

TEST_CASE("self mixing") {
  // K4 by enumeration of all 15 subsets: singleton gives 1/4
  CHECK(self_mixing(complete(4), SelfMixingMode::Exact) == Catch::Approx(0.25));

  // Petersen: exact (2^10 subsets) <= spectral bound 2/3, computed twice
  Graph p = petersen();
  double exact = self_mixing(p, SelfMixingMode::Exact);
  CHECK(exact == Catch::Approx(mu_oracle(p)));
  CHECK(exact <= self_mixing(p, SelfMixingMode::Spectral) + 1e-12);
  CHECK(self_mixing(p, SelfMixingMode::Spectral) == Catch::Approx(2.0 / 3.0));

  // exact <= spectral always
  for (std::uint64_t seed : {4, 5}) {
    Graph g = gen_random_regular(12, 3, seed);
    CHECK(self_mixing(g, SelfMixingMode::Exact) <=
          self_mixing(g, SelfMixingMode::Spectral) + 1e-12);
  }

  CHECK_THROWS_AS(self_mixing(gen_random_regular(24, 3, 1), SelfMixingMode::Exact), Error);
}

TEST_CASE("expander mixing lemma") {
  Graph g = gen_random_regular(64, 3, 7);
  std::vector<int> V(64);
  std::iota(V.begin(), V.end(), 0);
  CHECK(expander_mixing_check(g, V, V));
  CHECK(expander_mixing_check(g, {0}, {0}));
  Rng rng(3);
  auto prof = spectral_profile(g);
  for (int it = 0; it < 200; ++it) {
    std::vector<int> S, T;
    for (int v = 0; v < 64; ++v) {
      if (rng.uniform() < 0.4) S.push_back(v);
      if (rng.uniform() < 0.4) T.push_back(v);
    }
    if (S.empty() || T.empty()) continue;
    CHECK(expander_mixing_check(g, S, T, prof.gamma_plus));
  }
}

TEST_CASE("subset pruning and Poincare") {
  // B = V on K_n: degrees already inside the band, C = V
  Graph kn = complete(12);
  std::vector<int> V(12);
  std::iota(V.begin(), V.end(), 0);
  auto C = expander_subset_prune(kn, V);
  CHECK(C.size() == 12);

  // precondition enforcement: any 3-regular graph has gamma_+ >= 1/3, so
  // B = V always fails the spectral threshold
  Graph g = gen_random_regular(64, 3, 11);
  CHECK_THROWS_AS(expander_subset_prune(g, V), Error);  // SubsetTooSmall (|B|=12 < n)
  std::vector<int> V64(64);
  std::iota(V64.begin(), V64.end(), 0);
  CHECK_THROWS_AS(expander_subset_prune(g, V64), Error);

  // without enforcement the conclusions still hold on these instances
  auto C64 = expander_subset_prune(g, V64, false);
  CHECK(static_cast<int>(C64.size()) >= 64 / 3);
  // degree band
  std::vector<char> in(64, 0);
  for (int v : C64) in[v] = 1;
  for (int v : C64) {
    int deg = 0;
    for (int u : g.neighbors(v)) deg += in[u];
    CHECK(deg >= 3.0 * 64 / (8 * 64) - 1e-12);
    CHECK(deg <= 4.0 * 3 * 64 / 64 + 1e-12);
  }

  // constant f: both sides zero, trivially valid
  std::vector<std::vector<double>> fc(64, std::vector<double>(4, 1.0));
  auto cert0 = poincare_check(g, V64, fc, 2.0, false);
  CHECK(cert0.valid);
  CHECK(cert0.lhs == 0.0);

  // random gaussian f at p in {1, 2}
  Rng rng(9);
  for (double p : {1.0, 2.0}) {
    for (int it = 0; it < 20; ++it) {
      std::vector<std::vector<double>> f(64, std::vector<double>(8));
      for (auto& row : f)
        for (auto& x : row) x = rng.gaussian();
      auto cert = poincare_check(g, V64, f, p, false);
      CHECK(cert.valid);
      CHECK(cert.ratio <= 1.0 + 1e-9);
    }
  }

  // coordinate projection at p = 1
  std::vector<std::vector<double>> fproj(64, std::vector<double>(1));
  for (int v = 0; v < 64; ++v) fproj[v][0] = v % 7;
  CHECK(poincare_check(g, V64, fproj, 1.0, false).valid);
}

TEST_CASE("distance graph") {
  Graph c6 = cycle(6);
  // t = 1: the graph itself
  Graph d1 = distance_graph(c6, 1);
  CHECK(d1.edges() == c6.edges());
  // 6-cycle at t = 3: perfect matching of antipodal pairs
  Graph d3 = distance_graph(c6, 3);
  CHECK(d3.m() == 3);
  CHECK(d3.regular_degree() == 1);
  // Petersen (g = 5, d = 3) at t = 2: 6-regular, verified internally
  Graph p2 = distance_graph(petersen(), 2);
  CHECK(p2.regular_degree() == 6);
  CHECK_THROWS_AS(distance_graph(c6, 9), Error);  // TOutOfRange

  // metric coherence: d_{G^(t)}(u,v) = d_G(u,v)/t below girth/2t, and the
  // distance graph inherits girth >= g/t
  Graph hg = gen_high_girth_dense(256, 6, 3);
  if (hg.connected() && hg.diameter() >= 2) {
    Graph h2 = distance_graph(hg, 2);
    CHECK(h2.girth() * 2 >= hg.girth());
    int g2 = hg.girth();
    for (int u = 0; u < std::min(hg.n(), 24); ++u) {
      auto dg = hg.bfs(u);
      auto dt = h2.bfs(u);
      for (int v = 0; v < hg.n(); ++v)
        if (dt[v] >= 0 && dt[v] < g2 / 4.0) CHECK(2 * dt[v] == dg[v]);
    }
  }
}

TEST_CASE("expander net and diameter bound") {
  for (std::uint64_t seed : {1, 2, 3}) {
    Graph g = gen_random_regular(48, 3, seed);
    auto prof = spectral_profile(g);
    if (prof.gamma_plus < 1) {
      // diameter bound log_{1/gamma} n + 1
      double bound = std::log(g.n()) / std::log(1.0 / prof.gamma_plus) + 1;
      CHECK(g.diameter() <= bound + 1e-9);
    }
    for (double alpha : {2.5, 4.0}) {
      auto net = expander_net(g, alpha);
      double r = g.diameter() / alpha;
      double bound = g.n() / (3.0 * std::pow(2.0, r + 1));  // (d-1)^(r+1), d = 3
      CHECK(static_cast<double>(net.size()) >= bound - 1e-9);
      // aspect ratio of the net within alpha
      FiniteMetric gm = shortest_path_metric(g);
      CHECK(leq_tol(aspect_ratio(gm.restrict(net)), alpha));
    }
  }
}
