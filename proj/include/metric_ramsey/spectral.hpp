// SPDX-FileCopyrightText: 2026 metric-ramsey contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "metric_ramsey/errors.hpp"
#include "metric_ramsey/graph.hpp"

namespace mr {

/// Adjacency eigenvalues sorted descending (dense symmetric solver).
inline std::vector<double> adjacency_spectrum(const Graph& g) {
  const int n = g.n();
  require(n >= 1 && n <= 4096, Err::InstanceTooLarge, "spectrum limited to n <= 4096");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (auto [u, v] : g.edges()) {
    A(u, v) = 1;
    A(v, u) = 1;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end(), std::greater<double>());
  return ev;
}

struct SpectralProfile {
  std::vector<double> eigenvalues;  // descending
  int d = 0;
  double gamma = 0;       // lambda_2 / d
  double gamma_plus = 0;  // max(lambda_2, -lambda_n) / d
  double lambda_min = 0;
};

/// gamma, gamma_plus and the full spectrum of a regular graph.
inline SpectralProfile spectral_profile(const Graph& g) {
  int d = g.regular_degree();
  require(d >= 0, Err::NotRegular, "graph is not regular");
  SpectralProfile p;
  p.eigenvalues = adjacency_spectrum(g);
  p.d = d;
  const int n = g.n();
  p.lambda_min = p.eigenvalues.back();
  p.gamma = n >= 2 ? p.eigenvalues[1] / d : 0.0;
  p.gamma_plus = n >= 2 ? std::max(p.eigenvalues[1], -p.lambda_min) / d : 0.0;
  return p;
}

/// Self-mixing parameter mu(G) = max_S |S|/|V| - 2|E(S)|/(d|S|).
/// Exact mode enumerates all nonempty subsets (n <= 20); spectral mode
/// returns the bound -lambda_n / d.
enum class SelfMixingMode { Exact, Spectral };

inline double self_mixing(const Graph& g, SelfMixingMode mode) {
  int d = g.regular_degree();
  require(d >= 1, Err::NotRegular, "graph is not regular");
  if (mode == SelfMixingMode::Spectral) {
    auto p = spectral_profile(g);
    return -p.lambda_min / d;
  }
  const int n = g.n();
  require(n <= 20, Err::InstanceTooLarge, "exact self-mixing limited to n <= 20");
  double best = -1e300;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    int size = __builtin_popcount(mask);
    long es = 0;
    for (auto [u, v] : g.edges())
      if ((mask >> u & 1) && (mask >> v & 1)) ++es;
    double val = static_cast<double>(size) / n - 2.0 * es / (static_cast<double>(d) * size);
    best = std::max(best, val);
  }
  return best;
}

/// Expander mixing inequality ||E(S,T)| - d|S||T|/n| <= gamma_+ d sqrt(|S||T|)
/// (property check; always true for regular graphs).
inline bool expander_mixing_check(const Graph& g, const std::vector<int>& S,
                                  const std::vector<int>& T, double gamma_plus = -1) {
  int d = g.regular_degree();
  require(d >= 1, Err::NotRegular, "graph is not regular");
  if (gamma_plus < 0) gamma_plus = spectral_profile(g).gamma_plus;
  std::vector<char> inS(g.n(), 0), inT(g.n(), 0);
  for (int v : S) inS[v] = 1;
  for (int v : T) inT[v] = 1;
  long est = 0;  // directed count
  for (auto [u, v] : g.edges()) {
    if (inS[u] && inT[v]) ++est;
    if (inS[v] && inT[u]) ++est;
  }
  double expect = static_cast<double>(d) * S.size() * T.size() / g.n();
  double bound = gamma_plus * d * std::sqrt(static_cast<double>(S.size()) * T.size());
  return std::abs(est - expect) <= bound * (1 + 1e-9) + 1e-12;
}

/// Degree-band pruning: drops high-degree vertices of B, then peels
/// minimum-degree vertices until all induced degrees lie in
/// [d|B|/(8n), 4d|B|/n]. The guarantees |C| >= |B|/3 and the band hold
/// under the spectral precondition |B| >= 8 gamma_+ n; pass
/// enforce_precondition = false to run the construction regardless (the
/// caller then checks the conclusions directly).
inline std::vector<int> expander_subset_prune(const Graph& g, const std::vector<int>& B,
                                              bool enforce_precondition = true) {
  int d = g.regular_degree();
  require(d >= 1, Err::NotRegular, "graph is not regular");
  const int n = g.n();
  const double k = static_cast<double>(B.size());
  if (enforce_precondition) {
    double gp = spectral_profile(g).gamma_plus;
    require(k >= 8 * gp * n, Err::SubsetTooSmall,
            "|B| = " + std::to_string(B.size()) + " below 8 gamma_+ n = " + fmt17(8 * gp * n));
  }
  std::vector<char> in(n, 0);
  for (int v : B) in[v] = 1;
  std::vector<int> deg(n, 0);
  auto recompute = [&] {
    std::fill(deg.begin(), deg.end(), 0);
    for (auto [u, v] : g.edges())
      if (in[u] && in[v]) {
        ++deg[u];
        ++deg[v];
      }
  };
  recompute();
  // drop vertices above the 4dk/n cap
  const double hi = 4.0 * d * k / n;
  for (int v = 0; v < n; ++v)
    if (in[v] && deg[v] > hi) in[v] = 0;
  recompute();
  // peel minimum-degree vertices while min degree <= dk/8n
  const double lo = d * k / (8.0 * n);
  while (true) {
    int worst = -1;
    for (int v = 0; v < n; ++v)
      if (in[v] && (worst < 0 || deg[v] < deg[worst])) worst = v;
    if (worst < 0 || deg[worst] > lo) break;
    in[worst] = 0;
    for (int u : g.neighbors(worst))
      if (in[u]) --deg[u];
  }
  std::vector<int> C;
  for (int v = 0; v < n; ++v)
    if (in[v]) C.push_back(v);
  return C;
}

/// Poincare certificate: both sides of
///   sum_{u,v in C} ||f(u)-f(v)||_p^p <= (32p)^p (n/d) sum_{[u,v] in E(C)} ...
/// with C produced by the degree-band pruning of B.
struct PoincareCertificate {
  std::vector<int> C;
  double p = 2;
  double lhs = 0;  // ordered pairs u, v in C
  double rhs = 0;  // (32p)^p * n/d * edge sum
  double ratio = 0;
  bool valid = false;
};

inline PoincareCertificate poincare_check(const Graph& g, const std::vector<int>& B,
                                          const std::vector<std::vector<double>>& f, double p,
                                          bool enforce_precondition = true) {
  require(p >= 1, Err::InvalidParameters, "p must be >= 1");
  require(f.size() == static_cast<std::size_t>(g.n()), Err::SizeMismatch,
          "need one vector per vertex");
  int d = g.regular_degree();
  require(d >= 1, Err::NotRegular, "graph is not regular");
  PoincareCertificate cert;
  cert.p = p;
  cert.C = expander_subset_prune(g, B, enforce_precondition);
  auto pdist = [&](int u, int v) {
    double s = 0;
    for (std::size_t i = 0; i < f[u].size(); ++i) s += std::pow(std::abs(f[u][i] - f[v][i]), p);
    return s;
  };
  for (std::size_t a = 0; a < cert.C.size(); ++a)
    for (std::size_t b = 0; b < cert.C.size(); ++b)
      if (a != b) cert.lhs += pdist(cert.C[a], cert.C[b]);
  std::vector<char> in(g.n(), 0);
  for (int v : cert.C) in[v] = 1;
  double esum = 0;
  for (auto [u, v] : g.edges())
    if (in[u] && in[v]) esum += pdist(u, v);
  cert.rhs = std::pow(32 * p, p) * g.n() / d * esum;
  cert.ratio = cert.rhs > 0 ? cert.lhs / cert.rhs : (cert.lhs > 0 ? 1e300 : 0.0);
  cert.valid = cert.lhs <= cert.rhs * (1 + 1e-9);
  return cert;
}

/// Greedy ball-carving net on a graph metric: pairwise distances > r =
/// diam/alpha, so the result has aspect ratio <= alpha; its size is at
/// least n / (3 (d-1)^(r+1)) on d-regular graphs.
inline std::vector<int> expander_net(const Graph& g, double alpha) {
  require(alpha > 1, Err::InvalidParameters, "alpha must be > 1");
  const int n = g.n();
  int diam = g.diameter();
  double r = diam / alpha;
  std::vector<char> alive(n, 1);
  std::vector<int> net;
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    net.push_back(v);
    auto dist = g.bfs(v);
    for (int u = 0; u < n; ++u)
      if (dist[u] <= r) alive[u] = 0;
  }
  return net;
}

}  // namespace mr
