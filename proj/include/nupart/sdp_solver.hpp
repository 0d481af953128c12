#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "nupart/instance.hpp"
#include "nupart/oracle.hpp"
#include "nupart/rng.hpp"
#include "nupart/sdp.hpp"

namespace nupart {

struct SolverConfig {
  int max_outer = 200;
  int inner_iters = 150;
  double penalty_init = 1.0;
  double penalty_growth = 1.4;
  double penalty_max = 1e9;
  double tol = 1e-6;              // converged classification
  double target_residual = 1e-9;  // the solver keeps tightening to this
  double eig_floor = 1e-10;       // eigenvalue cut in vector recovery
  int triangle_batch = 200;
  int triangle_exact_cap = 40;
  std::uint64_t triangle_samples = 1000000;
  std::uint64_t seed = 1;
  double time_budget_sec = 120.0;
  int oracle_fallback_max_n = 11;
  int greedy_tries = 64;
};

struct SolveOutcome {
  SdpSolution solution;
  double sdp_value = 0.0;  // always re-derived via sdp_objective
  FeasibilityReport residual;
  bool converged = false;
  bool fallback_used = false;  // returned solution is an integral embedding
  bool unsolvable = false;     // diverged and no integral fallback exists
  int outer_iters = 0;
  std::uint64_t triangles_added = 0;
  std::optional<Partition> fallback_partition;
};

struct TriangleViolation {
  int u = 0, v = 0, w = 0, bin = 0;
  double violation = 0.0;
};

// Violated l2^2 triangle inequalities (v is the middle vertex), sorted
// by violation magnitude. Exhaustive for n <= triangle_exact_cap,
// uniformly sampled above; an empty list certifies the scanned triples.
inline std::vector<TriangleViolation> separate_triangles(const SdpSolution& sol, double tol,
                                                         std::size_t max_returned,
                                                         int triangle_exact_cap = 40,
                                                         std::uint64_t samples = 1000000,
                                                         std::uint64_t seed = 0x7a5e11) {
  const int n = sol.n();
  const int k = sol.k();
  std::vector<TriangleViolation> found;
  auto consider = [&](int i, int u, int v, int w) {
    double viol = sol.dist2(i, u, w) - sol.dist2(i, u, v) - sol.dist2(i, v, w);
    if (viol > tol) found.push_back({u, v, w, i, viol});
  };
  if (n <= triangle_exact_cap) {
    for (int i = 0; i < k; ++i)
      for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u) {
          if (u == v) continue;
          for (int w = u + 1; w < n; ++w)
            if (w != v) consider(i, u, v, w);
        }
  } else {
    Rng rng(seed);
    for (std::uint64_t t = 0; t < samples; ++t) {
      int i = static_cast<int>(rng.uniform_index(k));
      int u = static_cast<int>(rng.uniform_index(n));
      int v = static_cast<int>(rng.uniform_index(n));
      int w = static_cast<int>(rng.uniform_index(n));
      if (u != v && v != w && u != w) consider(i, u, v, w);
    }
  }
  std::sort(found.begin(), found.end(),
            [](const TriangleViolation& a, const TriangleViolation& b) {
              return a.violation > b.violation;
            });
  if (found.size() > max_returned) found.resize(max_returned);
  return found;
}

// Greedy capacity-respecting packer: assign vertices (heavy first, then
// random restarts) to the feasible bin with the least added cut.
inline std::optional<Partition> greedy_pack(const Instance& inst, int tries,
                                            std::uint64_t seed) {
  const int n = inst.n();
  const int k = inst.k();
  auto deg = inst.graph().weighted_degrees();
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const Edge& e : inst.graph().edges()) {
    adj[e.u].push_back({e.v, e.w});
    adj[e.v].push_back({e.u, e.w});
  }

  std::optional<Partition> best;
  double best_cut = std::numeric_limits<double>::infinity();
  Rng rng(seed);
  for (int t = 0; t < tries; ++t) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (t == 0) {
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return deg[a] > deg[b]; });
    } else {
      for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[rng.uniform_int(0, i)]);
    }
    std::vector<int> assign(n, -1);
    std::vector<double> loads(k, 0.0);
    bool ok = true;
    for (int u : order) {
      int pick = -1;
      double pick_cost = std::numeric_limits<double>::infinity();
      for (int i = 0; i < k; ++i) {
        if (loads[i] + inst.mu(i, u) > inst.rho(i)) continue;
        double cost = 0.0;
        for (const auto& [v, w] : adj[u])
          if (assign[v] >= 0 && assign[v] != i) cost += w;
        if (cost < pick_cost) {
          pick_cost = cost;
          pick = i;
        }
      }
      if (pick < 0) {
        ok = false;
        break;
      }
      assign[u] = pick;
      loads[pick] += inst.mu(pick, u);
    }
    if (!ok) continue;
    Partition p{assign};
    double cut = cut_weight(inst.graph(), p);
    if (cut < best_cut) {
      best_cut = cut;
      best = std::move(p);
    }
  }
  return best;
}

namespace detail {

struct LinTerm {
  int blk;
  int r, c;
  double coef;  // multiplies the (r,c) entry (X is symmetric)
};

struct LinCon {
  bool eq = false;
  double rhs = 0.0;
  double lambda = 0.0;
  std::vector<LinTerm> terms;

  double eval(const std::vector<Eigen::MatrixXd>& X) const {
    double s = -rhs;
    for (const LinTerm& t : terms) s += t.coef * X[t.blk](t.r, t.c);
    return s;
  }
};

class AlmSdp {
 public:
  AlmSdp(const Instance& inst, const SolverConfig& cfg) : inst_(inst), cfg_(cfg) {
    n_ = inst.n();
    k_ = inst.k();
    cost_ = Eigen::MatrixXd::Zero(n_, n_);
    for (const Edge& e : inst.graph().edges()) {
      cost_(e.u, e.u) += 0.5 * e.w;
      cost_(e.v, e.v) += 0.5 * e.w;
      cost_(e.u, e.v) -= 0.5 * e.w;
      cost_(e.v, e.u) -= 0.5 * e.w;
    }
    build_static_constraints();
  }

  // Returns the Gram blocks after the ALM loop; best-effort feasible.
  std::vector<Eigen::MatrixXd> run(std::vector<Eigen::MatrixXd> X, int& outer_done,
                                   std::uint64_t& triangles_added) {
    const auto t_start = std::chrono::steady_clock::now();
    double sigma = cfg_.penalty_init;
    double prev_viol = std::numeric_limits<double>::infinity();
    double prev_obj = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < cfg_.max_outer; ++outer) {
      outer_done = outer + 1;
      inner_minimize(X, sigma);

      double viol = 0.0;
      for (LinCon& c : cons_) {
        double v = c.eval(X);
        if (c.eq) {
          c.lambda += sigma * v;
          viol = std::max(viol, std::abs(v));
        } else {
          c.lambda = std::max(0.0, c.lambda + sigma * v);
          viol = std::max(viol, v);
        }
      }

      std::size_t added = add_violated_triangles(X);
      triangles_added += added;

      double obj = 0.0;
      for (int i = 0; i < k_; ++i) obj += cost_.cwiseProduct(X[i]).sum();
      bool obj_stalled = std::abs(prev_obj - obj) <= 1e-8 * (1.0 + std::abs(obj));
      prev_obj = obj;

      if (viol <= cfg_.target_residual && added == 0 && obj_stalled) break;
      if (viol > 0.5 * prev_viol)
        sigma = std::min(sigma * cfg_.penalty_growth, cfg_.penalty_max);
      prev_viol = viol;

      auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start);
      if (elapsed.count() > cfg_.time_budget_sec) break;
    }
    return X;
  }

  std::vector<Eigen::MatrixXd> initial_point(const std::optional<Partition>& warm) const {
    std::vector<Eigen::MatrixXd> X(k_, Eigen::MatrixXd::Zero(n_, n_));
    if (warm) {
      for (int i = 0; i < k_; ++i)
        for (int u = 0; u < n_; ++u)
          for (int v = 0; v < n_; ++v)
            X[i](u, v) = ((*warm)(u) == i && (*warm)(v) == i) ? 1.0 : 0.0;
    } else {
      for (int i = 0; i < k_; ++i)
        X[i] = Eigen::MatrixXd::Identity(n_, n_) / static_cast<double>(k_);
    }
    return X;
  }

 private:
  void build_static_constraints() {
    // capacity: sum_u mu_i(u) X_i(u,u) <= rho_i
    for (int i = 0; i < k_; ++i) {
      LinCon c;
      c.rhs = inst_.rho(i);
      for (int u = 0; u < n_; ++u)
        if (inst_.mu(i, u) != 0.0) c.terms.push_back({i, u, u, inst_.mu(i, u)});
      cons_.push_back(std::move(c));
    }
    // spreading: sum_v mu_i(v) X_i(u,v) - rho_i X_i(u,u) <= 0
    for (int i = 0; i < k_; ++i)
      for (int u = 0; u < n_; ++u) {
        LinCon c;
        for (int v = 0; v < n_; ++v) {
          double coef = inst_.mu(i, v) - (v == u ? inst_.rho(i) : 0.0);
          if (coef != 0.0) c.terms.push_back({i, u, v, coef});
        }
        cons_.push_back(std::move(c));
      }
    // assignment: sum_i X_i(u,u) = 1
    for (int u = 0; u < n_; ++u) {
      LinCon c;
      c.eq = true;
      c.rhs = 1.0;
      for (int i = 0; i < k_; ++i) c.terms.push_back({i, u, u, 1.0});
      cons_.push_back(std::move(c));
    }
    // box: 0 <= X_i(u,v) <= min(X_i(u,u), X_i(v,v))
    for (int i = 0; i < k_; ++i)
      for (int u = 0; u < n_; ++u)
        for (int v = u + 1; v < n_; ++v) {
          cons_.push_back(LinCon{false, 0.0, 0.0, {{i, u, v, -1.0}}});
          cons_.push_back(LinCon{false, 0.0, 0.0, {{i, u, v, 1.0}, {i, u, u, -1.0}}});
          cons_.push_back(LinCon{false, 0.0, 0.0, {{i, u, v, 1.0}, {i, v, v, -1.0}}});
        }
  }

  std::size_t add_violated_triangles(const std::vector<Eigen::MatrixXd>& X) {
    // X_i(u,v) + X_i(v,w) - X_i(v,v) - X_i(u,w) <= 0, v in the middle.
    struct Cand {
      int i, u, v, w;
      double viol;
    };
    std::vector<Cand> cands;
    auto consider = [&](int i, int u, int v, int w) {
      double viol = X[i](u, v) + X[i](v, w) - X[i](v, v) - X[i](u, w);
      if (viol > 1e-10) cands.push_back({i, u, v, w, viol});
    };
    if (n_ <= cfg_.triangle_exact_cap) {
      for (int i = 0; i < k_; ++i)
        for (int v = 0; v < n_; ++v)
          for (int u = 0; u < n_; ++u) {
            if (u == v) continue;
            for (int w = u + 1; w < n_; ++w)
              if (w != v) consider(i, u, v, w);
          }
    } else {
      Rng rng(splitmix64(cfg_.seed));
      for (std::uint64_t t = 0; t < cfg_.triangle_samples; ++t) {
        int i = static_cast<int>(rng.uniform_index(k_));
        int u = static_cast<int>(rng.uniform_index(n_));
        int v = static_cast<int>(rng.uniform_index(n_));
        int w = static_cast<int>(rng.uniform_index(n_));
        if (u != v && v != w && u != w) consider(i, u, v, w);
      }
    }
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.viol > b.viol; });
    std::size_t added = 0;
    for (const Cand& c : cands) {
      if (added >= static_cast<std::size_t>(cfg_.triangle_batch)) break;
      auto key = std::array<int, 4>{c.i, c.u, c.v, c.w};
      if (!triangle_keys_.insert(key).second) continue;
      LinCon con;
      con.terms = {{c.i, c.u, c.v, 1.0},
                   {c.i, c.v, c.w, 1.0},
                   {c.i, c.v, c.v, -1.0},
                   {c.i, c.u, c.w, -1.0}};
      cons_.push_back(std::move(con));
      ++added;
    }
    return added;
  }

  double lagrangian(const std::vector<Eigen::MatrixXd>& X, double sigma) const {
    double L = 0.0;
    for (int i = 0; i < k_; ++i) L += cost_.cwiseProduct(X[i]).sum();
    for (const LinCon& c : cons_) {
      double v = c.eval(X);
      if (c.eq) {
        L += c.lambda * v + 0.5 * sigma * v * v;
      } else {
        double y = std::max(0.0, c.lambda + sigma * v);
        L += (y * y - c.lambda * c.lambda) / (2.0 * sigma);
      }
    }
    return L;
  }

  void gradient(const std::vector<Eigen::MatrixXd>& X, double sigma,
                std::vector<Eigen::MatrixXd>& G) const {
    for (int i = 0; i < k_; ++i) G[i] = cost_;
    for (const LinCon& c : cons_) {
      double v = c.eval(X);
      double y = c.eq ? (c.lambda + sigma * v) : std::max(0.0, c.lambda + sigma * v);
      if (y == 0.0) continue;
      for (const LinTerm& t : c.terms) {
        if (t.r == t.c) {
          G[t.blk](t.r, t.r) += y * t.coef;
        } else {
          G[t.blk](t.r, t.c) += 0.5 * y * t.coef;
          G[t.blk](t.c, t.r) += 0.5 * y * t.coef;
        }
      }
    }
  }

  static void project_psd(Eigen::MatrixXd& X) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        0.5 * (X + X.transpose()));
    Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
    X = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
  }

  // Monotone accelerated projected gradient: FISTA extrapolation with a
  // function-value restart, so the Lagrangian never increases.
  void inner_minimize(std::vector<Eigen::MatrixXd>& X, double sigma) {
    std::vector<Eigen::MatrixXd> G(k_), Y(k_), cand(k_), Xprev(X);
    double L = lagrangian(X, sigma);
    double eta = eta_;
    double tk = 1.0;
    for (int it = 0; it < cfg_.inner_iters; ++it) {
      double tk_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      bool momentum = tk > 1.0;
      double beta = momentum ? (tk - 1.0) / tk_next : 0.0;
      for (int i = 0; i < k_; ++i)
        Y[i] = momentum ? (X[i] + beta * (X[i] - Xprev[i])).eval() : X[i];
      gradient(Y, sigma, G);

      bool accepted = false;
      for (int bt = 0; bt < 48 && !accepted; ++bt) {
        for (int i = 0; i < k_; ++i) {
          cand[i] = Y[i] - eta * G[i];
          project_psd(cand[i]);
        }
        double Lc = lagrangian(cand, sigma);
        if (Lc <= L) {
          double step = 0.0;
          for (int i = 0; i < k_; ++i)
            step = std::max(step, (cand[i] - X[i]).lpNorm<Eigen::Infinity>());
          Xprev.swap(X);
          X.swap(cand);
          double drop = L - Lc;
          L = Lc;
          accepted = true;
          tk = tk_next;
          eta = std::min(eta * 1.1, 1e6);
          if (step < 1e-14 || drop < 1e-16 * (std::abs(L) + 1.0)) it = cfg_.inner_iters;
        } else if (momentum) {
          // extrapolation overshot: restart from X without momentum
          momentum = false;
          tk = 1.0;
          tk_next = 1.0;
          for (int i = 0; i < k_; ++i) Y[i] = X[i];
          gradient(Y, sigma, G);
        } else {
          eta *= 0.5;
          if (eta < 1e-16) break;
        }
      }
      if (!accepted) break;
    }
    eta_ = eta;
  }

  const Instance& inst_;
  SolverConfig cfg_;
  int n_ = 0, k_ = 0;
  Eigen::MatrixXd cost_;
  std::vector<LinCon> cons_;
  std::set<std::array<int, 4>> triangle_keys_;
  double eta_ = 1.0;
};

inline SdpSolution recover_vectors(const std::vector<Eigen::MatrixXd>& X, double eig_floor) {
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(X.size());
  for (const Eigen::MatrixXd& Xi : X) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (Xi + Xi.transpose()));
    const Eigen::VectorXd& lam = eig.eigenvalues();
    std::vector<int> keep;
    for (int j = 0; j < lam.size(); ++j)
      if (lam[j] > eig_floor) keep.push_back(j);
    Eigen::MatrixXd B(Xi.rows(), std::max<std::size_t>(1, keep.size()));
    B.setZero();
    for (std::size_t c = 0; c < keep.size(); ++c)
      B.col(c) = eig.eigenvectors().col(keep[c]) * std::sqrt(lam[keep[c]]);
    blocks.push_back(std::move(B));
  }
  return SdpSolution::from_blocks(std::move(blocks));
}

}  // namespace detail

// First-order solve of the relaxation. The returned sdp_value is always
// re-derived from the returned vectors. If the iterative scheme fails to
// reach tolerance, or an integral embedding of the best known feasible
// partition scores better, that embedding is returned instead
// (fallback_used = true), so the pipeline always proceeds with a
// feasible input when one exists.
inline SolveOutcome solve_sdp(const Instance& inst, const SolverConfig& cfg = {}) {
  // Best integral candidate: exact witness when the oracle is affordable,
  // greedy packing otherwise.
  std::optional<Partition> integral = inst.witness();
  if (inst.n() <= cfg.oracle_fallback_max_n &&
      std::pow(static_cast<double>(inst.k()), inst.n()) <= 4e6) {
    OracleResult o = exact_opt(inst);
    if (o.optimal()) integral = o.witness;
  }
  if (!integral) {
    auto greedy = greedy_pack(inst, cfg.greedy_tries, splitmix64(cfg.seed ^ 0x9c0ffee));
    if (greedy) integral = greedy;
  }

  detail::AlmSdp alm(inst, cfg);
  int outer = 0;
  std::uint64_t triangles = 0;
  std::vector<Eigen::MatrixXd> X = alm.run(alm.initial_point(integral), outer, triangles);
  SdpSolution iterative = detail::recover_vectors(X, cfg.eig_floor);

  CheckOptions check_opts;
  check_opts.tol = cfg.tol;
  check_opts.triangle_exact_cap = cfg.triangle_exact_cap;
  check_opts.triangle_samples = cfg.triangle_samples;
  FeasibilityReport it_rep = check_feasibility(inst, iterative, false, 0.0, check_opts);

  SolveOutcome out;
  out.outer_iters = outer;
  out.triangles_added = triangles;

  std::optional<double> integral_value;
  if (integral) integral_value = cut_weight(inst.graph(), *integral);

  bool take_integral =
      integral && (!it_rep.feasible || *integral_value < it_rep.objective);
  if (take_integral) {
    out.solution = embed_integral(inst, *integral);
    out.residual = check_feasibility(inst, out.solution, false, 0.0, check_opts);
    out.fallback_used = true;
    out.fallback_partition = integral;
  } else {
    out.solution = std::move(iterative);
    out.residual = it_rep;
  }
  out.sdp_value = out.residual.objective;  // sdp_objective on returned vectors
  out.converged = out.residual.feasible;
  out.unsolvable = !out.converged && !integral;
  return out;
}

}  // namespace nupart
