#pragma once

#include <string>
#include <vector>

#include "nupart/instance.hpp"
#include "nupart/rng.hpp"
#include "nupart/sdp.hpp"

namespace nupart::testing {

// Path a-b-c, k = 2, uniform measures, rho = (2/3, 2/3). Optimum cuts
// one edge with witness {a,b} | {c}.
inline Instance path3() {
  Graph g = Graph::build(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  std::vector<std::vector<double>> mu(2, std::vector<double>(3, 1.0 / 3));
  return Instance(g, 2, mu, {2.0 / 3, 2.0 / 3});
}

inline Instance triangle_k2() {
  Graph g = Graph::build(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
  std::vector<std::vector<double>> mu(2, std::vector<double>(3, 1.0 / 3));
  return Instance(g, 2, mu, {2.0 / 3, 2.0 / 3});
}

inline Instance triangle_k3() {
  Graph g = Graph::build(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
  std::vector<std::vector<double>> mu(3, std::vector<double>(3, 1.0 / 3));
  return Instance(g, 3, mu, {1.0 / 3, 1.0 / 3, 1.0 / 3});
}

// Random instance with a planted feasible partition; capacities get a
// multiplicative margin over the planted loads (clamped to 1).
inline Instance random_instance(std::uint64_t seed, int n, int k, double edge_prob,
                                bool weighted = true, double cap_margin = 1.25,
                                bool uniform_mu = false) {
  Rng rng(seed);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform01() < edge_prob)
        edges.push_back({u, v, weighted ? rng.uniform(0.5, 2.0) : 1.0});
  Graph g = Graph::build(n, edges);

  std::vector<int> planted(n);
  for (int u = 0; u < n; ++u) planted[u] = u % k;
  for (int u = n - 1; u > 0; --u) std::swap(planted[u], planted[rng.uniform_int(0, u)]);

  std::vector<std::vector<double>> mu(k, std::vector<double>(n));
  for (int i = 0; i < k; ++i) {
    double total = 0.0;
    for (int u = 0; u < n; ++u) {
      mu[i][u] = uniform_mu ? 1.0 : rng.uniform(0.2, 1.0);
      total += mu[i][u];
    }
    for (int u = 0; u < n; ++u) mu[i][u] /= total;
  }
  std::vector<double> rho(k);
  Partition p{planted};
  for (int i = 0; i < k; ++i) {
    double load = 0.0;
    for (int u = 0; u < n; ++u)
      if (planted[u] == i) load += mu[i][u];
    rho[i] = std::min(1.0, std::max(load * cap_margin, 1e-3));
  }
  return Instance(g, k, std::move(mu), std::move(rho), p);
}

// Exactly feasible fractional solution: a convex combination of the
// Gram matrices of two capacity-feasible partitions, realized as
// 2-column blocks (sqrt(lambda) indicator, sqrt(1-lambda) indicator).
// Satisfies every constraint family of the relaxation exactly.
inline SdpSolution partition_mixture(const Instance& inst, const Partition& p,
                                     const Partition& q, double lambda) {
  std::vector<Eigen::MatrixXd> blocks;
  for (int i = 0; i < inst.k(); ++i) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(inst.n(), 2);
    for (int u = 0; u < inst.n(); ++u) {
      if (p(u) == i) b(u, 0) = std::sqrt(lambda);
      if (q(u) == i) b(u, 1) = std::sqrt(1.0 - lambda);
    }
    blocks.push_back(std::move(b));
  }
  return SdpSolution::from_blocks(std::move(blocks));
}

// Three-component mixture; lam3 = 1 - lam1 - lam2. Placing lam3 inside
// the threshold window [delta/(2k), delta/k] makes theta-truncation an
// actual coin flip instead of a no-op.
inline SdpSolution partition_mixture3(const Instance& inst, const Partition& p,
                                      const Partition& q, const Partition& s,
                                      double lam1, double lam2) {
  double lam3 = 1.0 - lam1 - lam2;
  std::vector<Eigen::MatrixXd> blocks;
  for (int i = 0; i < inst.k(); ++i) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(inst.n(), 3);
    for (int u = 0; u < inst.n(); ++u) {
      if (p(u) == i) b(u, 0) = std::sqrt(lam1);
      if (q(u) == i) b(u, 1) = std::sqrt(lam2);
      if (s(u) == i) b(u, 2) = std::sqrt(lam3);
    }
    blocks.push_back(std::move(b));
  }
  return SdpSolution::from_blocks(std::move(blocks));
}

inline Partition all_in_bin(int n, int bin) {
  return Partition{std::vector<int>(static_cast<std::size_t>(n), bin)};
}

}  // namespace nupart::testing
