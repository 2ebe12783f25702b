#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "metric_ramsey/certify.hpp"
#include "metric_ramsey/numeric.hpp"

using namespace mr;

TEST_CASE("interval exponent matches the double formula") {
  for (long t : {8L, 12L, 32L}) {
    for (double q : {16.0, 256.0, 65536.0}) {
      for (double phi : {1.0, 3.5, 240.0}) {
        IReal psi = shell_exponent(t, rat_of_double(q), rat_of_double(phi));
        double expect = std::pow(t * std::log2(4 * q * phi), -2.0 / t);
        CHECK(psi.mid() == Catch::Approx(expect).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("weighted guarantee certification") {
  auto rats = [](std::initializer_list<double> xs) {
    std::vector<Rat> out;
    for (double x : xs) out.push_back(rat_of_double(x));
    return out;
  };

  // subset = everything: subadditivity holds for every psi <= 1, including
  // the boundary psi = 1 where both sides coincide
  CHECK(certify_weighted_guarantee(rats({1, 2, 3}), rats({1, 2, 3}), 1.0));
  CHECK(certify_weighted_guarantee(rats({1, 2, 3}), rats({1, 2, 3}), 0.37));

  // single point carrying the whole weight: exact equality
  CHECK(certify_weighted_guarantee(rats({5}), rats({5}), 0.5));

  // uniform weights: |Y| >= n^psi iff certified
  // 4 >= 9^0.63 ~ 3.99 (true), 4 >= 9^0.64 ~ 4.08 (false)
  CHECK(certify_weighted_guarantee(rats({1, 1, 1, 1}), rats({1, 1, 1, 1, 1, 1, 1, 1, 1}), 0.63));
  CHECK_FALSE(
      certify_weighted_guarantee(rats({1, 1, 1, 1}), rats({1, 1, 1, 1, 1, 1, 1, 1, 1}), 0.64));

  // a certainly false case: a light singleton against a heavy total
  CHECK_FALSE(certify_weighted_guarantee(rats({0.001}), rats({0.001, 10.0}), 0.9));

  // randomized: claimed psi slightly below the measured exponent always
  // certifies; slightly above never does (uniform weights)
  Rng rng(31);
  for (int it = 0; it < 200; ++it) {
    int n = 3 + static_cast<int>(rng.below(40));
    int k = 2 + static_cast<int>(rng.below(n - 2));
    double measured = std::log(static_cast<double>(k)) / std::log(static_cast<double>(n));
    std::vector<Rat> all(n, Rat(1)), kept(k, Rat(1));
    CHECK(certify_weighted_guarantee(kept, all, measured * 0.999));
    CHECK_FALSE(certify_weighted_guarantee(kept, all, std::min(measured * 1.001, 1.0)));
  }

  // zeros in the subset contribute nothing but do not break certification
  CHECK(certify_weighted_guarantee(rats({0, 2, 2}), rats({1, 2, 2, 1}), 0.5));
}

TEST_CASE("square-root comparisons stay rational") {
  // j sqrt(omega) >= sqrt(S)  <=>  j^2 omega >= S
  CHECK(sqrt_level_geq(2, Rat(1), Rat(4)));        // equality: 2*1 = sqrt(4)
  CHECK_FALSE(sqrt_level_geq(2, Rat(1), Rat(5)));  // 4 < 5
  CHECK(sqrt_level_geq(3, Rat(1) / 2, Rat(4)));    // 4.5 >= 4

  // sqrt(a) + sqrt(b) >= sqrt(S): squared form with the remainder sign
  CHECK(sqrt_pair_geq(Rat(1), Rat(1), Rat(4)));        // 1+1 = sqrt(4) exactly
  CHECK_FALSE(sqrt_pair_geq(Rat(1), Rat(1), Rat(5)));  // 2 < sqrt(5)
  CHECK(sqrt_pair_geq(Rat(9), Rat(0), Rat(4)));        // rem < 0 branch
  // float sanity on random instances
  Rng rng(77);
  for (int it = 0; it < 500; ++it) {
    double a = rng.uniform() + 1e-6, b = rng.uniform() + 1e-6, s = 3 * rng.uniform() + 1e-6;
    bool exact = sqrt_pair_geq(rat_of_double(a), rat_of_double(b), rat_of_double(s));
    bool approx = std::sqrt(a) + std::sqrt(b) >= std::sqrt(s) * (1 - 1e-12);
    if (std::abs(std::sqrt(a) + std::sqrt(b) - std::sqrt(s)) > 1e-9) CHECK(exact == approx);
  }
}
