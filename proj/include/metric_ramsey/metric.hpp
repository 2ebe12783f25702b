// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/numeric.hpp"

namespace mr {

/// Validated finite metric space: an n x n symmetric matrix of nonnegative
/// distances with zero diagonal and the triangle inequality, plus point
/// labels. Distances live in doubles; an exact rational mirror can be
/// attached for the exact-rational checking mode (every double converts
/// losslessly, so attaching it never changes the metric).
///
/// Immutable after construction; all operations on it are pure.
class FiniteMetric {
 public:
  FiniteMetric() = default;

  /// Validates and builds. Throws AsymmetricMatrix, NegativeDistance,
  /// NonzeroDiagonal, ZeroOffDiagonal or TriangleViolation (with a witness
  /// triple). `validate_triangle` exists for trusted generated instances.
  static FiniteMetric build(std::vector<std::vector<double>> rows,
                            std::vector<std::string> labels = {}, bool validate_triangle = true) {
    const std::size_t n = rows.size();
    for (const auto& r : rows)
      require(r.size() == n, Err::SizeMismatch, "matrix is not square");
    FiniteMetric m;
    m.n_ = static_cast<int>(n);
    m.d_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m.d_[i * n + j] = rows[i][j];
    m.labels_ = std::move(labels);
    if (m.labels_.empty()) {
      m.labels_.reserve(n);
      for (std::size_t i = 0; i < n; ++i) m.labels_.push_back("p" + std::to_string(i));
    }
    require(m.labels_.size() == n, Err::SizeMismatch, "label count != n");
    m.validate(validate_triangle);
    return m;
  }

  static FiniteMetric build_exact(std::vector<std::vector<Rat>> rows,
                                  std::vector<std::string> labels = {},
                                  bool validate_triangle = true) {
    const std::size_t n = rows.size();
    std::vector<std::vector<double>> dr(n);
    std::vector<Rat> flat;
    flat.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      require(rows[i].size() == n, Err::SizeMismatch, "matrix is not square");
      dr[i].resize(n);
      for (std::size_t j = 0; j < n; ++j) dr[i][j] = rat_to_double(rows[i][j]);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) flat.push_back(rows[i][j]);
    FiniteMetric m = build(std::move(dr), std::move(labels), false);
    m.exact_ = std::move(flat);
    m.validate(validate_triangle);
    return m;
  }

  int n() const { return n_; }
  double d(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool has_exact() const { return !exact_.empty(); }
  const Rat& dx(int i, int j) const { return exact_[static_cast<std::size_t>(i) * n_ + j]; }

  /// Attach the lossless rational mirror of the double matrix.
  FiniteMetric with_exact() const {
    if (has_exact() || n_ == 0) return *this;
    FiniteMetric m = *this;
    m.exact_.reserve(static_cast<std::size_t>(n_) * n_);
    for (double v : d_) m.exact_.push_back(rat_of_double(v));
    return m;
  }

  double diameter() const {
    double m = 0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) m = std::max(m, d(i, j));
    return m;
  }

  double min_distance() const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) m = std::min(m, d(i, j));
    return m;
  }

  /// Induced submetric. Indices must be distinct and in range.
  FiniteMetric restrict(const std::vector<int>& idx) const {
    const std::size_t k = idx.size();
    check_indices(idx);
    FiniteMetric m;
    m.n_ = static_cast<int>(k);
    m.d_.resize(k * k);
    m.labels_.reserve(k);
    for (std::size_t a = 0; a < k; ++a) {
      m.labels_.push_back(labels_[idx[a]]);
      for (std::size_t b = 0; b < k; ++b) m.d_[a * k + b] = d(idx[a], idx[b]);
    }
    if (has_exact()) {
      m.exact_.reserve(k * k);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) m.exact_.push_back(dx(idx[a], idx[b]));
    }
    return m;
  }

  void check_indices(const std::vector<int>& idx) const {
    std::vector<char> seen(n_, 0);
    for (int i : idx) {
      require(i >= 0 && i < n_, Err::OutOfRange, "index " + std::to_string(i) + " out of range");
      require(!seen[i], Err::NotBijection, "duplicate index " + std::to_string(i));
      seen[i] = 1;
    }
  }

 private:
  void validate(bool triangle) const {
    for (int i = 0; i < n_; ++i) {
      require(d(i, i) == 0, Err::NonzeroDiagonal, "d[" + std::to_string(i) + "][" +
                                                      std::to_string(i) + "] = " + fmt17(d(i, i)));
      for (int j = 0; j < n_; ++j) {
        require(!(d(i, j) < 0), Err::NegativeDistance,
                "d[" + std::to_string(i) + "][" + std::to_string(j) + "] = " + fmt17(d(i, j)));
        require(d(i, j) == d(j, i), Err::AsymmetricMatrix,
                "d[" + std::to_string(i) + "][" + std::to_string(j) + "] != d[" +
                    std::to_string(j) + "][" + std::to_string(i) + "]");
        if (i != j)
          require(d(i, j) > 0, Err::ZeroOffDiagonal,
                  "d[" + std::to_string(i) + "][" + std::to_string(j) + "] = 0");
      }
    }
    if (has_exact())
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          require(dx(i, j) == dx(j, i), Err::AsymmetricMatrix, "exact matrix asymmetric");
    if (!triangle) return;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        if (j == i) continue;
        for (int k = 0; k < n_; ++k) {
          if (k == i || k == j) continue;
          bool ok = has_exact() ? dx(i, k) <= dx(i, j) + dx(j, k)
                                : leq_tol(d(i, k), d(i, j) + d(j, k));
          require(ok, Err::TriangleViolation,
                  "d(" + std::to_string(i) + "," + std::to_string(k) + ") > d(" +
                      std::to_string(i) + "," + std::to_string(j) + ") + d(" + std::to_string(j) +
                      "," + std::to_string(k) + "): " + fmt17(d(i, k)) + " > " + fmt17(d(i, j)) +
                      " + " + fmt17(d(j, k)));
        }
      }
  }

  int n_ = 0;
  std::vector<double> d_;
  std::vector<std::string> labels_;
  std::vector<Rat> exact_;
};

/// Finite metric plus a strictly positive weight on every point.
struct WeightedMetric {
  FiniteMetric base;
  std::vector<double> w;

  WeightedMetric(FiniteMetric m, std::vector<double> weights)
      : base(std::move(m)), w(std::move(weights)) {
    require(static_cast<int>(w.size()) == base.n(), Err::SizeMismatch, "weight count != n");
    for (double v : w) require(v > 0, Err::ZeroWeight, "weights must be strictly positive");
  }

  static WeightedMetric uniform(FiniteMetric m) {
    std::vector<double> w(m.n(), 1.0);
    return WeightedMetric(std::move(m), std::move(w));
  }
};

/// Indices into a FiniteMetric, kept sorted.
struct PointSubset {
  std::vector<int> indices;

  PointSubset() = default;
  PointSubset(const FiniteMetric& m, std::vector<int> idx) : indices(std::move(idx)) {
    m.check_indices(indices);
    std::sort(indices.begin(), indices.end());
  }
  int size() const { return static_cast<int>(indices.size()); }
  FiniteMetric induced(const FiniteMetric& m) const { return m.restrict(indices); }
};

/// Distortion report for a bijection f between two equal-sized metrics:
/// expansion = sup d_Y/d_X, contraction = sup d_X/d_Y, distortion is their
/// product, with the argmax pairs as witnesses.
struct EmbeddingReport {
  double expansion = 1.0;
  double contraction = 1.0;
  double distortion = 1.0;
  std::pair<int, int> expansion_witness{-1, -1};
  std::pair<int, int> contraction_witness{-1, -1};
  std::optional<Rat> expansion_exact;
  std::optional<Rat> contraction_exact;
  std::optional<Rat> distortion_exact;

  bool exact() const { return distortion_exact.has_value(); }

  /// distortion <= bound, in the strongest arithmetic available.
  bool leq(double bound) const {
    if (exact()) return *distortion_exact <= rat_of_double(bound);
    return leq_tol(distortion, bound);
  }
  bool leq(const Rat& bound) const {
    if (exact()) return *distortion_exact <= bound;
    return leq_tol(distortion, rat_to_double(bound));
  }
  /// Noncontractive: d_Y >= d_X everywhere, i.e. contraction <= 1.
  bool noncontractive() const {
    if (exact()) return *contraction_exact <= 1;
    return leq_tol(contraction, 1.0);
  }
};

/// Aspect ratio Phi = diam / min interpoint distance; 1 for a single point.
inline double aspect_ratio(const FiniteMetric& m) {
  if (m.n() <= 1) return 1.0;
  return m.diameter() / m.min_distance();
}

inline Rat aspect_ratio_exact(const FiniteMetric& m) {
  if (m.n() <= 1) return Rat(1);
  Rat dmax = 0, dmin = m.dx(0, 1);
  for (int i = 0; i < m.n(); ++i)
    for (int j = i + 1; j < m.n(); ++j) {
      dmax = std::max(dmax, m.dx(i, j));
      dmin = std::min(dmin, m.dx(i, j));
    }
  return dmax / dmin;
}

/// Exact expansion/contraction/distortion of the bijection i -> f[i] from X
/// onto Y. Throws SizeMismatch / NotBijection.
inline EmbeddingReport distortion(const FiniteMetric& X, const FiniteMetric& Y,
                                  const std::vector<int>& f) {
  require(X.n() == Y.n(), Err::SizeMismatch,
          "|X| = " + std::to_string(X.n()) + " but |Y| = " + std::to_string(Y.n()));
  require(static_cast<int>(f.size()) == X.n(), Err::NotBijection, "map size != n");
  std::vector<char> hit(Y.n(), 0);
  for (int v : f) {
    require(v >= 0 && v < Y.n(), Err::NotBijection, "image out of range");
    require(!hit[v], Err::NotBijection, "map not injective");
    hit[v] = 1;
  }
  EmbeddingReport r;
  if (X.n() <= 1) {
    if (X.has_exact() && Y.has_exact()) {
      r.expansion_exact = Rat(1);
      r.contraction_exact = Rat(1);
      r.distortion_exact = Rat(1);
    }
    return r;
  }
  double exp_best = 0, con_best = 0;
  for (int i = 0; i < X.n(); ++i)
    for (int j = i + 1; j < X.n(); ++j) {
      double a = Y.d(f[i], f[j]) / X.d(i, j);
      double b = X.d(i, j) / Y.d(f[i], f[j]);
      if (a > exp_best) {
        exp_best = a;
        r.expansion_witness = {i, j};
      }
      if (b > con_best) {
        con_best = b;
        r.contraction_witness = {i, j};
      }
    }
  r.expansion = exp_best;
  r.contraction = con_best;
  r.distortion = exp_best * con_best;
  if (X.has_exact() && Y.has_exact()) {
    Rat e = 0, c = 0;
    for (int i = 0; i < X.n(); ++i)
      for (int j = i + 1; j < X.n(); ++j) {
        Rat a = Y.dx(f[i], f[j]) / X.dx(i, j);
        Rat b = X.dx(i, j) / Y.dx(f[i], f[j]);
        e = std::max(e, a);
        c = std::max(c, b);
      }
    r.expansion_exact = e;
    r.contraction_exact = c;
    r.distortion_exact = e * c;
  }
  return r;
}

inline std::vector<int> identity_map(int n) {
  std::vector<int> f(n);
  for (int i = 0; i < n; ++i) f[i] = i;
  return f;
}

}  // namespace mr
