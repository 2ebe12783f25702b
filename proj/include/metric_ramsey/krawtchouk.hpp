// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/numeric.hpp"

namespace mr {

/// Exact binomial coefficient.
inline BigInt binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (long i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

/// Degree-k Krawtchouk polynomial of the d-cube at integer x:
/// K_k^(d)(x) = sum_j (-1)^j C(x,j) C(d-x, k-j), exact integer arithmetic.
inline long long krawtchouk(long d, long k, long x) {
  require(d >= 0 && k >= 0 && k <= d && x >= 0 && x <= d, Err::OutOfRange,
          "need 0 <= k <= d and 0 <= x <= d");
  BigInt acc = 0;
  for (long j = 0; j <= k; ++j) {
    BigInt term = binomial(x, j) * binomial(d - x, k - j);
    if (j % 2)
      acc -= term;
    else
      acc += term;
  }
  require(acc >= std::numeric_limits<long long>::min() &&
              acc <= std::numeric_limits<long long>::max(),
          Err::OutOfRange, "value exceeds 64 bits");
  return static_cast<long long>(acc);
}

/// Exact check of the Krawtchouk minimum bound for even k <= d/2:
/// min_x K_k^(d)(x) >= -(64k/d)^(k/2) C(d,k), compared in cross-multiplied
/// integer form K * d^(k/2) >= -(64k)^(k/2) * C(d,k).
inline bool krawtchouk_min_bound_holds(long d, long k) {
  require(k >= 1 && k % 2 == 0 && 2 * k <= d, Err::OutOfRange, "need even k <= d/2");
  BigInt dk = 1, num = 1;
  for (long i = 0; i < k / 2; ++i) {
    dk *= d;
    num *= 64 * k;
  }
  BigInt bound = -num * binomial(d, k);
  for (long x = 0; x <= d; ++x) {
    BigInt kx = krawtchouk(d, k, x);
    if (kx * dk < bound) return false;
  }
  return true;
}

}  // namespace mr
