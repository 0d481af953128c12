#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nupart/instance.hpp"
#include "nupart/rng.hpp"
#include "nupart/sdp.hpp"

namespace nupart {

// Threshold truncation: draw theta ~ U[delta/2, delta] once, zero every
// per-bin vector with ||u_i||^2 < theta/k (the >= side is kept). Vertex
// norms are renormalized to unit sum first, so the truncated solution
// lands in [1 - delta, 1] per vertex by construction.
struct TruncationResult {
  SdpSolution solution;
  double theta = 0.0;
  std::uint64_t zeroed = 0;
};

inline TruncationResult truncate_solution(const SdpSolution& sol, double delta, Rng& rng,
                                          double input_tol = 1e-6) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("truncate: delta must lie in (0,1)");
  const int n = sol.n();
  const int k = sol.k();

  TruncationResult out;
  out.solution = sol;
  for (int u = 0; u < n; ++u) {
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += out.solution.norm2(u, i);
    if (std::abs(sum - 1.0) > input_tol)
      throw std::invalid_argument("truncate: input violates the unit norm-sum constraint");
    double scale = 1.0 / std::sqrt(sum);
    for (int i = 0; i < k; ++i) out.solution.block(i).row(u) *= scale;
  }

  out.theta = delta / 2.0 + (delta / 2.0) * rng.uniform_closed01();
  const double threshold = out.theta / k;
  for (int i = 0; i < k; ++i) {
    for (int u = 0; u < n; ++u) {
      if (out.solution.norm2(u, i) < threshold) {
        out.solution.block(i).row(u).setZero();
        ++out.zeroed;
      }
    }
  }
  return out;
}

// Truncated solution plus the reweighted measures/capacities it is fed
// to the rounding with. rho_tilde is clamped at 1 (the measures are
// normalized, so any larger capacity is vacuous); the raw ratio is kept
// for reporting. Bins whose support carries no measure keep their
// original measure and get capacity 1.
struct TransformedProblem {
  SdpSolution solution;
  double theta = 0.0;
  std::vector<std::vector<int>> support;     // A_i = { u : u_i != 0 }
  std::vector<double> mass;                  // mu_i(A_i)
  std::vector<std::vector<double>> mu_tilde;
  std::vector<double> rho_tilde;
  std::vector<double> rho_tilde_raw;
  std::vector<char> degenerate;              // mu_i(A_i) == 0

  double rho_tilde_min() const {
    double r = 1.0;
    for (double x : rho_tilde) r = std::min(r, x);
    return r;
  }

  Instance to_instance(const Instance& original) const {
    return Instance(original.graph(), original.k(), mu_tilde, rho_tilde);
  }
};

inline TransformedProblem reweight(const Instance& inst, TruncationResult truncated) {
  const int n = inst.n();
  const int k = inst.k();
  TransformedProblem tp;
  tp.theta = truncated.theta;
  tp.solution = std::move(truncated.solution);
  tp.support.resize(k);
  tp.mass.assign(k, 0.0);
  tp.mu_tilde.assign(k, std::vector<double>(n, 0.0));
  tp.rho_tilde.assign(k, 1.0);
  tp.rho_tilde_raw.assign(k, 1.0);
  tp.degenerate.assign(k, 0);

  for (int i = 0; i < k; ++i) {
    for (int u = 0; u < n; ++u) {
      if (tp.solution.norm2(u, i) > 0.0) {
        tp.support[i].push_back(u);
        tp.mass[i] += inst.mu(i, u);
      }
    }
    if (tp.mass[i] == 0.0) {
      tp.degenerate[i] = 1;
      tp.mu_tilde[i] = inst.mu(i);  // capacity constraint effectively removed
      tp.rho_tilde[i] = 1.0;
      tp.rho_tilde_raw[i] = 1.0;
      continue;
    }
    for (int u : tp.support[i]) tp.mu_tilde[i][u] = inst.mu(i, u) / tp.mass[i];
    tp.rho_tilde_raw[i] = inst.rho(i) / tp.mass[i];
    tp.rho_tilde[i] = std::min(tp.rho_tilde_raw[i], 1.0);
  }
  return tp;
}

// Lift the partition found on the reweighted problem back to the
// original measures and certify the capacity chain directly.
struct LiftCertificate {
  Partition partition;
  bool support_ok = false;    // P_i subset of A_i
  bool capacity_ok = false;   // mu_i(P_i) <= 5(1+eps) rho_i, original mu
  std::vector<double> original_loads;
  std::vector<double> caps;
};

inline LiftCertificate lift_partition(const TransformedProblem& tp, const Instance& inst,
                                      const Partition& p, double epsilon) {
  const int k = inst.k();
  LiftCertificate cert;
  cert.partition = p;
  cert.support_ok = true;
  std::vector<std::vector<char>> in_support(k, std::vector<char>(inst.n(), 0));
  for (int i = 0; i < k; ++i)
    for (int u : tp.support[i]) in_support[i][u] = 1;
  for (int u = 0; u < inst.n(); ++u) {
    int i = p(u);
    if (i < 0 || i >= k) throw std::invalid_argument("lift: partition not total");
    if (!tp.degenerate[i] && !in_support[i][u]) cert.support_ok = false;
  }
  if (!cert.support_ok)
    throw std::logic_error("lift: rounding placed a vertex outside the bin support");

  cert.original_loads = inst.bin_loads(p);
  cert.caps.resize(k);
  cert.capacity_ok = true;
  for (int i = 0; i < k; ++i) {
    cert.caps[i] = 5.0 * (1.0 + epsilon) * inst.rho(i);
    if (cert.original_loads[i] > cert.caps[i]) cert.capacity_ok = false;
  }
  return cert;
}

// Scalarisation of d-dimensional weights:
//   mu'_i(u) = max_j r_j(u,i) / c_j(i),
//   mu_i = mu'_i / mu'_i(V),  rho_i = min(d / mu'_i(V), 1).
// Any partition meeting the d-dimensional capacities satisfies
// mu_i(P_i) <= rho_i in the reduced instance. A bin with mu'_i(V) = 0
// gets a uniform measure and capacity 1.
struct ReducedInstance {
  Instance instance;
  std::vector<double> mu_prime_total;  // mu'_i(V)
  std::vector<double> rho_raw;         // d / mu'_i(V) before the clamp
  std::vector<char> degenerate;        // mu'_i(V) == 0
};

inline ReducedInstance reduce_ddim(const DDimInstance& dd) {
  const int n = dd.n();
  const int k = dd.k();
  const int d = dd.d();
  std::vector<std::vector<double>> mu(k, std::vector<double>(n, 0.0));
  std::vector<double> rho(k, 1.0);
  ReducedInstance red;
  red.mu_prime_total.assign(k, 0.0);
  red.rho_raw.assign(k, 0.0);
  red.degenerate.assign(k, 0);

  for (int i = 0; i < k; ++i) {
    std::vector<double> prime(n, 0.0);
    for (int u = 0; u < n; ++u)
      for (int j = 0; j < d; ++j)
        prime[u] = std::max(prime[u], dd.r(u, i, j) / dd.c(i, j));
    double total = 0.0;
    for (double x : prime) total += x;
    red.mu_prime_total[i] = total;
    if (total == 0.0) {
      red.degenerate[i] = 1;
      red.rho_raw[i] = std::numeric_limits<double>::infinity();
      for (int u = 0; u < n; ++u) mu[i][u] = 1.0 / n;
      rho[i] = 1.0;
      continue;
    }
    for (int u = 0; u < n; ++u) mu[i][u] = prime[u] / total;
    red.rho_raw[i] = static_cast<double>(d) / total;
    rho[i] = std::min(red.rho_raw[i], 1.0);
  }
  red.instance = Instance(dd.graph(), k, std::move(mu), std::move(rho));
  return red;
}

// Bi-criteria capacity check for the d-dimensional problem:
// sum_{u in P_i} r_j(u,i) <= 5 d (1+eps) c_j(i) for every (i, j).
struct DDimReport {
  std::vector<std::vector<double>> loads;   // [i][j]
  std::vector<std::vector<double>> bounds;  // 5 d (1+eps) c_j(i)
  std::vector<std::pair<int, int>> violations;
  double worst_ratio = 0.0;  // max load / bound

  bool pass() const { return violations.empty(); }
};

inline DDimReport check_ddim(const DDimInstance& dd, const Partition& p, double epsilon) {
  const int k = dd.k();
  const int d = dd.d();
  DDimReport rep;
  rep.loads.assign(k, std::vector<double>(d, 0.0));
  rep.bounds.assign(k, std::vector<double>(d, 0.0));
  for (int u = 0; u < dd.n(); ++u) {
    int i = p(u);
    if (i < 0) continue;
    for (int j = 0; j < d; ++j) rep.loads[i][j] += dd.r(u, i, j);
  }
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j) {
      rep.bounds[i][j] = 5.0 * d * (1.0 + epsilon) * dd.c(i, j);
      rep.worst_ratio = std::max(rep.worst_ratio, rep.loads[i][j] / rep.bounds[i][j]);
      if (rep.loads[i][j] > rep.bounds[i][j]) rep.violations.push_back({i, j});
    }
  return rep;
}

}  // namespace nupart
