// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Certified real-number comparisons via MPFR directed rounding. The weighted
// guarantee sum_{Y} w^psi >= (sum_X w)^psi has an irrational exponent, so it
// cannot be decided in rational arithmetic; instead both sides are enclosed
// in intervals whose endpoints are correctly rounded, and the comparison is
// accepted only when the intervals certify it.

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "metric_ramsey/numeric.hpp"

namespace mr {

/// Interval with correctly rounded endpoints at a given precision.
class IReal {
 public:
  explicit IReal(mpfr_prec_t prec) : prec_(prec) {
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }
  IReal(const IReal& o) : IReal(o.prec_) {
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  IReal& operator=(const IReal& o) {
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
    return *this;
  }
  ~IReal() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  static IReal from_long(long v, mpfr_prec_t prec) {
    IReal r(prec);
    mpfr_set_si(r.lo_, v, MPFR_RNDD);
    mpfr_set_si(r.hi_, v, MPFR_RNDU);
    return r;
  }

  static IReal from_double(double v, mpfr_prec_t prec) {
    IReal r(prec);
    mpfr_set_d(r.lo_, v, MPFR_RNDD);
    mpfr_set_d(r.hi_, v, MPFR_RNDU);
    return r;
  }

  static IReal from_rat(const Rat& v, mpfr_prec_t prec) {
    IReal r(prec);
    const std::string num = numerator(v).str();
    const std::string den = denominator(v).str();
    mpfr_t n, d;
    mpfr_init2(n, prec);
    mpfr_init2(d, prec);
    mpfr_set_str(n, num.c_str(), 10, MPFR_RNDD);
    mpfr_set_str(d, den.c_str(), 10, MPFR_RNDU);
    mpfr_div(r.lo_, n, d, MPFR_RNDD);
    mpfr_set_str(n, num.c_str(), 10, MPFR_RNDU);
    mpfr_set_str(d, den.c_str(), 10, MPFR_RNDD);
    mpfr_div(r.hi_, n, d, MPFR_RNDU);
    mpfr_clear(n);
    mpfr_clear(d);
    return r;
  }

  IReal operator+(const IReal& o) const {
    IReal r(prec_);
    mpfr_add(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
  }

  IReal operator-(const IReal& o) const {
    IReal r(prec_);
    mpfr_sub(r.lo_, lo_, o.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, hi_, o.lo_, MPFR_RNDU);
    return r;
  }

  /// Product, assuming both operands nonnegative.
  IReal mul_nonneg(const IReal& o) const {
    IReal r(prec_);
    mpfr_mul(r.lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_mul(r.hi_, hi_, o.hi_, MPFR_RNDU);
    return r;
  }

  /// Reciprocal, assuming strictly positive.
  IReal inv_pos() const {
    IReal r(prec_);
    mpfr_si_div(r.lo_, 1, hi_, MPFR_RNDD);
    mpfr_si_div(r.hi_, 1, lo_, MPFR_RNDU);
    return r;
  }

  /// log2, assuming strictly positive.
  IReal log2() const {
    IReal r(prec_);
    mpfr_log2(r.lo_, lo_, MPFR_RNDD);
    mpfr_log2(r.hi_, hi_, MPFR_RNDU);
    return r;
  }

  /// base^e for nonnegative base; corners evaluated with directed rounding.
  IReal pow(const IReal& e) const {
    IReal r(prec_);
    mpfr_t c[4];
    for (auto& x : c) mpfr_init2(x, prec_);
    mpfr_pow(c[0], lo_, e.lo_, MPFR_RNDD);
    mpfr_pow(c[1], lo_, e.hi_, MPFR_RNDD);
    mpfr_pow(c[2], hi_, e.lo_, MPFR_RNDD);
    mpfr_pow(c[3], hi_, e.hi_, MPFR_RNDD);
    mpfr_min(r.lo_, c[0], c[1], MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, c[2], MPFR_RNDD);
    mpfr_min(r.lo_, r.lo_, c[3], MPFR_RNDD);
    mpfr_pow(c[0], lo_, e.lo_, MPFR_RNDU);
    mpfr_pow(c[1], lo_, e.hi_, MPFR_RNDU);
    mpfr_pow(c[2], hi_, e.lo_, MPFR_RNDU);
    mpfr_pow(c[3], hi_, e.hi_, MPFR_RNDU);
    mpfr_max(r.hi_, c[0], c[1], MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, c[2], MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, c[3], MPFR_RNDU);
    for (auto& x : c) mpfr_clear(x);
    return r;
  }

  /// Certified comparisons: true only when the intervals prove it.
  bool certainly_geq(const IReal& o) const { return mpfr_cmp(lo_, o.hi_) >= 0; }
  bool certainly_leq(const IReal& o) const { return mpfr_cmp(hi_, o.lo_) <= 0; }

  double mid() const {
    double a = mpfr_get_d(lo_, MPFR_RNDN);
    double b = mpfr_get_d(hi_, MPFR_RNDN);
    return 0.5 * (a + b);
  }

  mpfr_prec_t prec() const { return prec_; }

 private:
  mpfr_prec_t prec_;
  mpfr_t lo_, hi_;
};

/// The exponent psi = [t * log2(4 q Phi)]^(-2/t) of the shell lemma,
/// as a certified interval. q and Phi are exact rationals, t an integer.
inline IReal shell_exponent(long t, const Rat& q, const Rat& phi, mpfr_prec_t prec = 256) {
  IReal base = IReal::from_rat(Rat(4) * q * phi, prec).log2().mul_nonneg(IReal::from_long(t, prec));
  IReal two_over_t = IReal::from_long(2, prec).mul_nonneg(IReal::from_long(t, prec).inv_pos());
  IReal neg = IReal::from_long(0, prec) - two_over_t;
  return base.pow(neg);
}

/// Certifies sum_i w_i^psi >= (sum_i v_i)^psi for nonnegative rational
/// weights (w over the subset, v over the whole space) and an interval
/// exponent psi in (0, 1]. Returns true when certified, false when the
/// inequality is certainly false or cannot be certified at max precision.
inline bool certify_weighted_guarantee(const std::vector<Rat>& subset_w,
                                       const std::vector<Rat>& all_w, const IReal& psi_in,
                                       double* lhs_out = nullptr, double* rhs_out = nullptr) {
  Rat total = 0;
  for (const auto& v : all_w) total += v;
  // Structural equality case: the subset carries the entire weight in one
  // point (single-point space) -- both sides coincide exactly.
  if (subset_w.size() == 1 && subset_w[0] == total) {
    if (lhs_out) *lhs_out = std::pow(rat_to_double(total), psi_in.mid());
    if (rhs_out) *rhs_out = *lhs_out;
    return true;
  }
  for (mpfr_prec_t prec = psi_in.prec(); prec <= 1024; prec *= 2) {
    // Recompute psi at the working precision by widening (its endpoints are
    // already certified at its own precision).
    IReal psi(prec);
    psi = psi_in;
    IReal lhs(prec);
    for (const auto& w : subset_w) {
      if (w == 0) continue;
      lhs = lhs + IReal::from_rat(w, prec).pow(psi);
    }
    IReal rhs = IReal::from_rat(total, prec).pow(psi);
    if (lhs_out) *lhs_out = lhs.mid();
    if (rhs_out) *rhs_out = rhs.mid();
    if (lhs.certainly_geq(rhs)) return true;
    if (lhs.certainly_leq(rhs - IReal::from_rat(Rat(1, 1000000), prec).mul_nonneg(rhs)))
      return false;  // certainly below by a relative margin: a real violation
  }
  return false;
}

/// Convenience overload: fixed double exponent (exact as a dyadic rational).
inline bool certify_weighted_guarantee(const std::vector<Rat>& subset_w,
                                       const std::vector<Rat>& all_w, double psi,
                                       double* lhs_out = nullptr, double* rhs_out = nullptr) {
  IReal p = IReal::from_double(psi, 256);
  return certify_weighted_guarantee(subset_w, all_w, p, lhs_out, rhs_out);
}

/// Exact check of sum_i sqrt(y_i) >= sqrt(S) for rationals, used by the
/// binary balancing lemma. Level-set case: j * sqrt(omega) >= sqrt(S)
/// <=> j^2 * omega >= S. Top-two case: sqrt(a) + sqrt(b) >= sqrt(S)
/// <=> a + b >= S or 4ab >= (S - a - b)^2.
inline bool sqrt_level_geq(long j, const Rat& omega, const Rat& total) {
  return Rat(j) * Rat(j) * omega >= total;
}

inline bool sqrt_pair_geq(const Rat& a, const Rat& b, const Rat& total) {
  Rat rem = total - a - b;
  if (rem <= 0) return true;
  return 4 * a * b >= rem * rem;
}

}  // namespace mr
