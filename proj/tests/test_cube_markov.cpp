#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>

#include "metric_ramsey/instances.hpp"
#include "metric_ramsey/krawtchouk.hpp"
#include "metric_ramsey/markov.hpp"
#include "metric_ramsey/metric.hpp"
#include "metric_ramsey/spectral.hpp"

using namespace mr;

namespace {

Graph petersen() {
  std::vector<std::pair<int, int>> es;
  for (int i = 0; i < 5; ++i) {
    es.emplace_back(i, (i + 1) % 5);
    es.emplace_back(5 + i, 5 + (i + 2) % 5);
    es.emplace_back(i, 5 + i);
  }
  return Graph(10, std::move(es));
}

}  // namespace

TEST_CASE("krawtchouk values") {
  // K_k(0) = C(d, k): only j = 0 survives
  for (long d : {4, 8, 12})
    for (long k = 0; k <= d; ++k)
      CHECK(krawtchouk(d, k, 0) == static_cast<long long>(binomial(d, k)));
  // K_1(x) = d - 2x
  for (long d : {5, 9})
    for (long x = 0; x <= d; ++x) CHECK(krawtchouk(d, 1, x) == d - 2 * x);
  // K_2^(4)(2) = 1 - 4 + 1 = -2
  CHECK(krawtchouk(4, 2, 2) == -2);
  CHECK_THROWS_AS(krawtchouk(4, 5, 0), Error);
  CHECK_THROWS_AS(krawtchouk(4, 2, 5), Error);
}

TEST_CASE("krawtchouk minimum bound (exact integers)") {
  for (long d = 2; d <= 24; ++d)
    for (long k = 2; 2 * k <= d; k += 2) CHECK(krawtchouk_min_bound_holds(d, k));
}

TEST_CASE("hypercube distance-graph spectra match Krawtchouk multisets") {
  for (int d = 1; d <= 6; ++d) {
    auto cube = gen_hypercube(d);
    for (int t = 1; t <= d; ++t) {
      Graph gt = distance_graph(cube.graph, t);
      auto spec = adjacency_spectrum(gt);
      std::vector<double> expect;
      for (long i = 0; i <= d; ++i) {
        long long val = krawtchouk(d, t, i);
        long long mult = static_cast<long long>(binomial(d, i));
        for (long long m = 0; m < mult; ++m) expect.push_back(static_cast<double>(val));
      }
      std::sort(expect.begin(), expect.end(), std::greater<double>());
      REQUIRE(expect.size() == spec.size());
      for (std::size_t i = 0; i < spec.size(); ++i)
        CHECK(spec[i] == Catch::Approx(expect[i]).margin(1e-8));
    }
  }
}

TEST_CASE("cube self-mixing bound via Krawtchouk") {
  // mu(Omega_d^(t)) <= (64 t / d)^(t/2) for even t < d/2, checked against
  // the spectral value -lambda_n / deg
  for (int d : {5, 6}) {
    auto cube = gen_hypercube(d);
    for (int t = 2; 2 * t < d; t += 2) {
      Graph gt = distance_graph(cube.graph, t);
      double mu = self_mixing(gt, SelfMixingMode::Spectral);
      CHECK(mu <= std::pow(64.0 * t / d, t / 2.0) + 1e-9);
    }
  }
}

TEST_CASE("markov drift") {
  Graph p = petersen();
  // s = 1 on any connected graph: exactly one edge is crossed
  CHECK(markov_drift(p, 1) == Catch::Approx(1.0));

  // Petersen s = 2 exact: back-track with prob 1/3, otherwise distance 2
  double d2 = markov_drift(p, 2);
  CHECK(d2 == Catch::Approx(4.0 / 3.0));
  CHECK(d2 >= 2.0 / 3.0);  // the drift lower bound s (d-2)/d

  // absurd step counts trip the state-space guard
  CHECK_THROWS_AS(markov_drift(p, 100000000), Error);

  // sampled mode agrees loosely and is seed-deterministic
  double s1 = markov_drift(p, 2, DriftMode::Sampled, 20000, 42);
  double s2 = markov_drift(p, 2, DriftMode::Sampled, 20000, 42);
  CHECK(s1 == s2);
  CHECK(std::abs(s1 - d2) < 0.05);

  // high-girth 3-regular instances: drift >= s(d-2)/d = s/3 for s < g/2
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Graph g = gen_random_regular(64, 3, seed);
    if (g.girth() < 6 || !g.connected()) continue;
    for (int s = 1; 2 * s < g.girth(); ++s)
      CHECK(markov_drift(g, s) >= s / 3.0 - 1e-9);
    break;  // one good instance suffices here
  }
}

TEST_CASE("gv code") {
  // min_dist = 1: the whole cube
  CHECK(gv_code(3, 1).size() == 8);
  // min_dist = d: the two constant words
  auto c = gv_code(5, 5);
  REQUIRE(c.size() == 2);
  CHECK(c[0] == 0);
  CHECK(c[1] == 31);

  // d = 12, min_dist = 3: the Gilbert-Varshamov count
  // 2^12 / (C(12,0)+C(12,1)+C(12,2)+C(12,3)) = 4096 / 299 -> >= 14
  auto code = gv_code(12, 3);
  long long denom = 1 + 12 + 66 + 220;
  REQUIRE(denom == 299);
  CHECK(static_cast<long long>(code.size()) * denom >= 4096);

  // sqrt(Hamming) embedding: distortion sqrt(d / min_dist) via metric-core
  FiniteMetric H = hamming_metric(code, 12);
  int n = H.n();
  std::vector<std::vector<double>> e(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e[i][j] = std::sqrt(H.d(i, j));
  FiniteMetric E = FiniteMetric::build(std::move(e), {}, false);
  auto rep = distortion(H, E, identity_map(n));
  CHECK(rep.distortion <= std::sqrt(12.0 / 3.0) * (1 + 1e-12));
}
