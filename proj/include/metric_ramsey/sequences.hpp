// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "metric_ramsey/certify.hpp"
#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/numeric.hpp"

namespace mr {

/// Output of the weight-truncation lemma: y <= x pointwise, sum y^p >=
/// (sum x)^p, and {y_i^p} is q-decomposable (its support splits into
/// "heavy" entries holding >= 1/q of the total and a constant level omega).
struct WeightDecomposition {
  std::vector<double> y;       // original index order
  double p = 1;
  double q = 16;
  std::optional<double> omega; // common level of {y_i^p}, when one exists
  std::vector<int> heavy_set;  // indices with y_i^p >= (1/q) * sum y^p
  double sum_yp = 0;           // sum y^p
  double rhs = 0;              // (sum x)^p
};

/// Truncates a nonnegative weight sequence to a q-decomposable one in the
/// p-th power, p = 1 - log2 log2 q / log2 q, by the largest-heavy-prefix /
/// level-scan construction. Throws QTooSmall (q < 16) and AllZero.
inline WeightDecomposition decompose_sequence(const std::vector<double>& x, double q) {
  require(q >= 16.0, Err::QTooSmall, "q must be >= 16, got " + fmt17(q));
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  require(total > 0, Err::AllZero, "sequence is identically zero");
  for (double v : x) require(v >= 0, Err::NegativeDistance, "weights must be nonnegative");
  const double p = 1.0 - std::log2(std::log2(q)) / std::log2(q);
  const int n = static_cast<int>(x.size());

  // nonincreasing rearrangement, ties by original index
  std::vector<int> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return x[a] > x[b]; });

  auto xn = [&](int r) { return x[ord[r]] / total; };  // normalized, rank r (0-based)
  auto xnp = [&](int r) { return std::pow(xn(r), p); };

  // l = number of leading entries with x^p >= 2/q
  int l = 0;
  double prefix = 0;
  while (l < n && xnp(l) >= 2.0 / q) {
    prefix += xnp(l);
    ++l;
  }

  WeightDecomposition out;
  out.p = p;
  out.q = q;
  out.y.assign(n, 0.0);
  if (prefix >= 1.0) {
    // shrink to the minimal heavy prefix reaching 1 (keeps the total in [1,2))
    int lmin = 0;
    double s = 0;
    while (s < 1.0 && lmin < l) s += xnp(lmin++);
    for (int r = 0; r < lmin; ++r) out.y[ord[r]] = x[ord[r]];
    out.sum_yp = s;
  } else {
    // scan for the minimal b > l with (b - l) x_b^p >= 1 - prefix
    int b = -1;
    for (int r = l; r < n; ++r) {
      if ((r + 1 - l) * xnp(r) >= 1.0 - prefix) {
        b = r;
        break;
      }
    }
    require(b >= 0, Err::GuaranteeViolation,
            "level scan found no b; the (p,inf)-norm lemma should forbid this");
    for (int r = 0; r < l; ++r) out.y[ord[r]] = x[ord[r]];
    for (int r = l; r <= b; ++r) out.y[ord[r]] = x[ord[b]];
    out.omega = std::pow(x[ord[b]], p);
    out.sum_yp = prefix + (b + 1 - l) * xnp(b);
  }
  // report in original scale: sum y^p = total^p * normalized sum
  out.sum_yp *= std::pow(total, p);
  out.rhs = std::pow(total, p);
  double threshold = out.sum_yp / q;
  for (int i = 0; i < n; ++i)
    if (out.y[i] > 0 && std::pow(out.y[i], p) >= threshold * (1 - 1e-12)) out.heavy_set.push_back(i);
  return out;
}

/// Checks a q-decomposable split exists for the positive weights x: all
/// entries below (1/q)*sum must share one common value. Returns that level
/// (or nullopt when every entry is heavy).
inline std::optional<double> decomposable_level(const std::vector<double>& x, double q) {
  double total = std::accumulate(x.begin(), x.end(), 0.0);
  std::optional<double> omega;
  for (double v : x) {
    if (v <= 0 || v >= total / q) continue;
    if (!omega)
      omega = v;
    else if (!eq_tol(v, *omega))
      return std::nullopt;
  }
  return omega ? omega : std::optional<double>(0.0);  // 0 marks "no light entries"
}

/// The (p,inf)-norm inequality ||x||_{p,inf} >= ((1-p)/(2-p))^{1/p}
/// ||x||_1^{1/p} / ||x||_inf^{(1-p)/p}; holds for every x in l1 and
/// 0 < p < 1, so this predicate is a property check that must return true.
inline bool pinfty_bound_check(std::vector<double> x, double p) {
  require(p > 0 && p < 1, Err::InvalidParameters, "p must be in (0,1)");
  std::sort(x.begin(), x.end(), std::greater<double>());
  while (!x.empty() && x.back() <= 0) x.pop_back();
  if (x.empty()) return true;
  double norm1 = std::accumulate(x.begin(), x.end(), 0.0);
  double norminf = x[0];
  double pinf = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    pinf = std::max(pinf, std::pow(static_cast<double>(i + 1), 1.0 / p) * x[i]);
  double rhs = std::pow((1 - p) / (2 - p), 1.0 / p) * std::pow(norm1, 1.0 / p) /
               std::pow(norminf, (1 - p) / p);
  return pinf >= rhs * (1 - 1e-12);
}

/// Binary balancing: y <= x with sum sqrt(y) >= sqrt(sum x), where y is
/// either supported on the two largest entries or a level set. Scans level
/// candidates (descending), then the top-two case; comparisons are done in
/// squared form so the exact mode stays rational.
inline std::vector<double> balance_binary(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  double total = std::accumulate(x.begin(), x.end(), 0.0);
  require(total > 0, Err::AllZero, "sequence is identically zero");
  std::vector<int> ord(n);
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return x[a] > x[b]; });
  // level candidates: for each distinct omega (descending) the level set is
  // every entry >= omega, clamped down to omega
  for (int j = 0; j < n; ++j) {
    double omega = x[ord[j]];
    if (omega <= 0) break;
    if (j + 1 < n && x[ord[j + 1]] == omega) continue;  // not the last of a tie run
    long cnt = j + 1;
    if (sqrt_level_geq(cnt, rat_of_double(omega), rat_of_double(total))) {
      std::vector<double> y(n, 0.0);
      for (int r = 0; r <= j; ++r) y[ord[r]] = omega;
      return y;
    }
  }
  // top-two case
  double a = x[ord[0]], b = n >= 2 ? x[ord[1]] : 0.0;
  require(sqrt_pair_geq(rat_of_double(a), rat_of_double(b), rat_of_double(total)),
          Err::GuaranteeViolation, "binary balancing found no case; the lemma forbids this");
  std::vector<double> y(n, 0.0);
  y[ord[0]] = a;
  if (n >= 2) y[ord[1]] = b;
  return y;
}

}  // namespace mr
