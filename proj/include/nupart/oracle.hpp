#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "nupart/instance.hpp"

namespace nupart {

enum class OracleStatus { Optimal, NodeLimit, Infeasible };

struct OracleResult {
  OracleStatus status = OracleStatus::Infeasible;
  double opt_cut = std::numeric_limits<double>::infinity();
  Partition witness;
  std::uint64_t feasible_count = 0;  // feasible leaves reached after pruning
  std::uint64_t explored = 0;
  bool exhausted = false;

  bool optimal() const { return status == OracleStatus::Optimal; }

  json to_json() const {
    json j;
    j["status"] = status == OracleStatus::Optimal      ? "optimal"
                  : status == OracleStatus::NodeLimit  ? "node_limit"
                                                       : "infeasible";
    j["exhausted"] = exhausted;
    j["feasible_count"] = feasible_count;
    j["explored"] = explored;
    if (status != OracleStatus::Infeasible) {
      j["opt_cut"] = opt_cut;
      j["witness"] = witness.assign;
    }
    return j;
  }
};

struct OracleConfig {
  std::uint64_t node_limit = 100000000;
  bool use_edge_bound = true;
};

namespace detail {

// Branch and bound over assignments, vertices in decreasing weighted
// degree order. Capacity feasibility is checked exactly (slack 1).
// The optional lower bound charges every unassigned vertex the cheapest
// cut toward its already-assigned neighbours; each such edge is counted
// in exactly one term, so the bound is admissible.
template <typename Feasible>
class BnB {
 public:
  BnB(const Graph& g, int k, Feasible feasible, const OracleConfig& cfg)
      : g_(g), k_(k), feasible_(std::move(feasible)), cfg_(cfg), n_(g.n()) {
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), 0);
    auto deg = g.weighted_degrees();
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return deg[a] > deg[b]; });
    pos_.assign(n_, -1);
    for (int r = 0; r < n_; ++r) pos_[order_[r]] = r;
    adj_.assign(n_, {});
    for (const Edge& e : g.edges()) {
      adj_[e.u].push_back({e.v, e.w});
      adj_[e.v].push_back({e.u, e.w});
    }
    cross_.assign(n_, std::vector<double>(k_, 0.0));
    assign_.assign(n_, -1);
  }

  OracleResult run() {
    OracleResult res;
    dfs(0, 0.0, res);
    res.exhausted = res.explored <= cfg_.node_limit;
    if (!res.exhausted)
      res.status = OracleStatus::NodeLimit;
    else if (res.feasible_count == 0 && !best_.has_value())
      res.status = OracleStatus::Infeasible;
    else
      res.status = OracleStatus::Optimal;
    if (best_) {
      res.opt_cut = best_cut_;
      res.witness = *best_;
    }
    return res;
  }

 private:
  double lower_bound(int depth) const {
    if (!cfg_.use_edge_bound) return 0.0;
    double lb = 0.0;
    for (int r = depth; r < n_; ++r) {
      int v = order_[r];
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < k_; ++i) best = std::min(best, cross_[v][i]);
      lb += best;
    }
    return lb;
  }

  void dfs(int depth, double cut, OracleResult& res) {
    if (res.explored > cfg_.node_limit) return;
    ++res.explored;
    // epsilon-slack pruning: the incremental cut can drift from the
    // canonical edge-order sum by a few ulp
    if (best_ && cut + lower_bound(depth) >= best_cut_ + 1e-12) return;
    if (depth == n_) {
      ++res.feasible_count;
      Partition leaf{assign_};
      double exact = cut_weight(g_, leaf);  // canonical summation order
      if (!best_ || exact < best_cut_) {
        best_cut_ = exact;
        best_ = std::move(leaf);
      }
      return;
    }
    int u = order_[depth];
    for (int i = 0; i < k_; ++i) {
      if (!feasible_.try_place(u, i)) continue;
      double added = cross_[u][i];
      assign_[u] = i;
      for (const auto& [v, w] : adj_[u])
        if (assign_[v] < 0)
          for (int j = 0; j < k_; ++j)
            if (j != i) cross_[v][j] += w;
      dfs(depth + 1, cut + added, res);
      for (const auto& [v, w] : adj_[u])
        if (assign_[v] < 0)
          for (int j = 0; j < k_; ++j)
            if (j != i) cross_[v][j] -= w;
      assign_[u] = -1;
      feasible_.unplace(u, i);
    }
  }

  const Graph& g_;
  int k_;
  Feasible feasible_;
  OracleConfig cfg_;
  int n_;
  std::vector<int> order_;
  std::vector<int> pos_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::vector<std::vector<double>> cross_;
  std::vector<int> assign_;
  std::optional<Partition> best_;
  double best_cut_ = std::numeric_limits<double>::infinity();
};

struct ScalarFeasible {
  const Instance* inst;
  std::vector<double> loads;

  explicit ScalarFeasible(const Instance& i) : inst(&i), loads(i.k(), 0.0) {}

  bool try_place(int u, int i) {
    if (loads[i] + inst->mu(i, u) > inst->rho(i)) return false;
    loads[i] += inst->mu(i, u);
    return true;
  }
  void unplace(int u, int i) { loads[i] -= inst->mu(i, u); }
};

struct DDimFeasible {
  const DDimInstance* inst;
  std::vector<std::vector<double>> loads;  // [i][j]

  explicit DDimFeasible(const DDimInstance& d)
      : inst(&d), loads(d.k(), std::vector<double>(d.d(), 0.0)) {}

  bool try_place(int u, int i) {
    for (int j = 0; j < inst->d(); ++j)
      if (loads[i][j] + inst->r(u, i, j) > inst->c(i, j)) return false;
    for (int j = 0; j < inst->d(); ++j) loads[i][j] += inst->r(u, i, j);
    return true;
  }
  void unplace(int u, int i) {
    for (int j = 0; j < inst->d(); ++j) loads[i][j] -= inst->r(u, i, j);
  }
};

}  // namespace detail

inline OracleResult exact_opt(const Instance& inst, const OracleConfig& cfg = {}) {
  detail::BnB bnb(inst.graph(), inst.k(), detail::ScalarFeasible(inst), cfg);
  return bnb.run();
}

inline OracleResult exact_opt_ddim(const DDimInstance& inst, const OracleConfig& cfg = {}) {
  detail::BnB bnb(inst.graph(), inst.k(), detail::DDimFeasible(inst), cfg);
  return bnb.run();
}

}  // namespace nupart
