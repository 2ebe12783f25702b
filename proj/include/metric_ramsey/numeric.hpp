// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

namespace mr {

/// Exact rational scalar for the exact-rational checking mode (expression
/// templates off so values play nicely with std::max/std::min).
using Rat = boost::multiprecision::number<
    boost::multiprecision::rational_adaptor<boost::multiprecision::cpp_int_backend<>>,
    boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::cpp_int;

/// Relative tolerance used by every float-mode inequality check.
inline constexpr double kRelTol = 1e-9;
/// Guard used before ceil/floor of log ratios, so exact powers do not
/// fall on the wrong side of an integer boundary.
inline constexpr double kLogGuard = 1e-12;

/// a <= b up to relative tolerance (both sides nonnegative in our usage).
inline bool leq_tol(double a, double b, double rel = kRelTol) {
  return a <= b + rel * std::max(std::abs(a), std::abs(b));
}

inline bool geq_tol(double a, double b, double rel = kRelTol) { return leq_tol(b, a, rel); }

inline bool eq_tol(double a, double b, double rel = kRelTol) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

/// ceil(x) with a guard band: values within kLogGuard of an integer are
/// snapped to it first.
inline long guarded_ceil(double x) {
  double r = std::nearbyint(x);
  if (std::abs(x - r) < kLogGuard) return static_cast<long>(r);
  return static_cast<long>(std::ceil(x));
}

inline long guarded_floor(double x) {
  double r = std::nearbyint(x);
  if (std::abs(x - r) < kLogGuard) return static_cast<long>(r);
  return static_cast<long>(std::floor(x));
}

/// Exact conversion: every finite double is a dyadic rational.
inline Rat rat_of_double(double x) {
  Rat r(x);
  return r;
}

inline double rat_to_double(const Rat& r) { return static_cast<double>(r); }

/// Rational power with integer exponent.
inline Rat rat_pow(const Rat& base, long e) {
  Rat acc = 1;
  Rat b = base;
  long n = e >= 0 ? e : -e;
  while (n > 0) {
    if (n & 1) acc *= b;
    b *= b;
    n >>= 1;
  }
  if (e < 0) acc = Rat(1) / acc;
  return acc;
}

/// 17-significant-digit float formatting: round-trips bit-exactly and is
/// locale-independent ('.' decimal point).
inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Deterministic seeded RNG.
//
// Stream-split rule: stream i of master seed s is splitmix64 initialised at
// mix(s) + (i+1) * 0x9E3779B97F4A7C15. Generator name "splitmix64" and the
// (seed, stream) pair are embedded in serialized instances.
// ---------------------------------------------------------------------------
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(seed) + (stream + 1) * 0x9E3779B97F4A7C15ull) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) by rejection; portable across platforms.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t lim = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= lim);
    return x % n;
  }

  /// Standard normal via Box-Muller.
  double gaussian() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace mr
