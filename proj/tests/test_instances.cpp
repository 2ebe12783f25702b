#include <catch2/catch_amalgamated.hpp>

#include "metric_ramsey/instances.hpp"
#include "metric_ramsey/ultrametric.hpp"

using namespace mr;

TEST_CASE("hypercube") {
  auto c1 = gen_hypercube(1);
  CHECK(c1.graph.n() == 2);
  CHECK(c1.graph.m() == 1);

  auto c3 = gen_hypercube(3);
  CHECK(c3.graph.n() == 8);
  CHECK(c3.graph.regular_degree() == 3);
  CHECK(c3.graph.diameter() == 3);
  FiniteMetric m3 = c3.metric();
  CHECK(m3.d(0, 7) == 3.0);  // Hamming distance of 000 and 111

  CHECK(gen_hypercube(4).graph.girth() == 4);
  CHECK_THROWS_AS(gen_hypercube(0), Error);
  CHECK_THROWS_AS(gen_hypercube(17), Error);
}

TEST_CASE("random regular") {
  // n = 4, d = 3: the only simple 3-regular graph is K4
  Graph k4 = gen_random_regular(4, 3, 0);
  CHECK(k4.m() == 6);

  // determinism per seed
  Graph a = gen_random_regular(10, 3, 123);
  Graph b = gen_random_regular(10, 3, 123);
  CHECK(a.edges() == b.edges());
  Graph c = gen_random_regular(10, 3, 124);
  CHECK(a.edges() != c.edges());

  CHECK(gen_random_regular(16, 4, 9).regular_degree() == 4);
  CHECK_THROWS_AS(gen_random_regular(9, 3, 0), Error);  // odd n * d
}

TEST_CASE("high girth dense") {
  // g = 4, N = 256: verified girth
  Graph g4 = gen_high_girth_dense(256, 4, 7);
  CHECK(g4.girth() >= 4);
  CHECK(g4.n() >= 128);

  // g = 3: any simple graph qualifies
  Graph g3 = gen_high_girth_dense(64, 3, 1);
  CHECK(g3.girth() >= 3);

  // deterministic per seed
  Graph x = gen_high_girth_dense(128, 5, 3);
  Graph y = gen_high_girth_dense(128, 5, 3);
  CHECK(x.edges() == y.edges());
}

TEST_CASE("misc families") {
  FiniteMetric eq = gen_misc("equilateral", 5, 0);
  CHECK(aspect_ratio(eq) == 1.0);

  FiniteMetric p4 = gen_misc("path", 4, 0);
  CHECK(aspect_ratio(p4) == 3.0);

  FiniteMetric r8 = gen_misc("random_metric", 8, 5);  // validates on build
  CHECK(r8.n() == 8);
  FiniteMetric r8b = gen_misc("random_metric", 8, 5);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) CHECK(r8.d(i, j) == r8b.d(i, j));

  FiniteMetric comp = gen_misc("composed", 12, 3);
  CHECK(comp.n() == 12);

  CHECK_THROWS_AS(gen_misc("nope", 4, 0), Error);
}
