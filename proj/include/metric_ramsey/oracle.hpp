// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "metric_ramsey/metric.hpp"
#include "metric_ramsey/ultrametric.hpp"

namespace mr {

enum class RamseyTarget { UM, EQ };

/// Brute-force R_UM(X; alpha) / R_EQ(X; alpha): a maximum-cardinality subset
/// S with c_target(S) <= alpha, decided via the subdominant ultrametric (UM)
/// or the aspect ratio (EQ). Ties resolved to the lexicographically smallest
/// index set. Exponential scan, guarded by `cap`.
inline PointSubset exact_ramsey_oracle(const FiniteMetric& X, double alpha, RamseyTarget target,
                                       int cap = 15) {
  const int n = X.n();
  require(n <= cap, Err::InstanceTooLarge,
          "oracle cap is " + std::to_string(cap) + ", instance has " + std::to_string(n));
  std::optional<Rat> alpha_x;
  if (X.has_exact()) alpha_x = rat_of_double(alpha);

  auto qualifies = [&](const std::vector<int>& idx) {
    if (idx.size() <= 1) return true;
    FiniteMetric S = X.restrict(idx);
    if (target == RamseyTarget::EQ) {
      if (S.has_exact()) return aspect_ratio_exact(S) <= *alpha_x;
      return leq_tol(aspect_ratio(S), alpha);
    }
    auto sub = subdominant_ultrametric(S);
    if (sub.c_um_exact) return *sub.c_um_exact <= *alpha_x;
    return leq_tol(sub.c_um, alpha);
  };

  std::vector<int> best;
  std::vector<int> idx;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    idx.clear();
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    if (idx.size() < best.size()) continue;
    if (idx.size() == best.size() && !best.empty() &&
        !std::lexicographical_compare(idx.begin(), idx.end(), best.begin(), best.end()))
      continue;
    if (qualifies(idx)) best = idx;
  }
  return PointSubset(X, std::move(best));
}

}  // namespace mr
