#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nupart/instance.hpp"
#include "nupart/sdp.hpp"
#include "nupart/separators.hpp"

namespace nupart {

// One insertion cohort inside a bin. The front layer has depth 1;
// eviction always removes whole layers from the back, so vertices
// stored together keep equal depth until they leave together.
struct Layer {
  std::vector<int> members;
  double mass = 0.0;
};

struct BinState {
  std::deque<Layer> layers;  // front = depth 1
  double load = 0.0;

  std::size_t depth_of_back() const { return layers.size(); }
};

// Insert `incoming` as the new top layer, then drop bottom layers until
// the load fits under `cap`, keeping the largest depth that fits
// (equality with the cap is kept). Returns the evicted vertices.
// An empty incoming set leaves the bin untouched.
inline std::vector<int> place_in_bin(BinState& bin, const std::vector<int>& incoming,
                                     double cap, const std::vector<double>& mu) {
  if (incoming.empty()) return {};
  Layer fresh;
  fresh.members = incoming;
  for (int u : incoming) fresh.mass += mu[u];
  if (fresh.mass > cap)
    throw std::logic_error("place_in_bin: incoming set alone exceeds the bin cap");

  double kept = fresh.mass;
  std::size_t keep_layers = 0;
  for (const Layer& layer : bin.layers) {
    if (kept + layer.mass > cap) break;
    kept += layer.mass;
    ++keep_layers;
  }
  std::vector<int> evicted;
  while (bin.layers.size() > keep_layers) {
    Layer& bottom = bin.layers.back();
    evicted.insert(evicted.end(), bottom.members.begin(), bottom.members.end());
    bin.layers.pop_back();
  }
  bin.layers.push_front(std::move(fresh));
  bin.load = kept;
  return evicted;
}

enum class RoundStatus { Complete, IterationCap };

struct RoundingResult {
  RoundStatus status = RoundStatus::IterationCap;
  Partition partition;  // assign = -1 for still-active vertices on cap
  std::uint64_t iterations = 0;
  double cut = 0.0;
  std::vector<double> loads;
  std::vector<double> caps;  // 5(1+eps) rho_i
  std::uint64_t evictions = 0;
  std::uint64_t placements = 0;
  std::uint64_t separator_samples = 0;
  double alpha_min = 0.0;
  double bound_T = 0.0;  // n * 4k / alpha_min + 1

  bool complete() const { return status == RoundStatus::Complete; }
};

struct StepEvent {
  std::uint64_t t = 0;
  int bin = -1;
  const std::vector<int>* sample = nullptr;    // S' members
  const std::vector<int>* incoming = nullptr;  // S' intersected with A
  const std::vector<int>* evicted = nullptr;
  const std::vector<char>* active = nullptr;   // active mask before the step
};

struct RoundOptions {
  std::uint64_t max_iterations = 0;  // 0 = 100 * (n*4k/alpha_min + 1)
  bool validate_input = true;
  double input_tol = 1e-6;
  double c_beta = 1.0;
  std::function<void(const StepEvent&)> observer;
};

// Layered-bin randomized rounding. Repeatedly picks a bin uniformly,
// samples an orthogonal separator for it (delta = epsilon/4), stores the
// captured active vertices as the bin's new top layer and evicts bottom
// layers over the 5(1+eps)rho_i cap back into the active set. Every
// emitted partition satisfies mu_i(P_i) <= 5(1+eps)rho_i unconditionally.
inline RoundingResult round_solution(const Instance& inst, const SdpSolution& sol,
                                     double epsilon, Rng& rng,
                                     const RoundOptions& opts = {}) {
  const int n = inst.n();
  const int k = inst.k();
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("round: epsilon must lie in (0,1)");
  if (opts.validate_input) {
    FeasibilityReport pre = check_feasibility(inst, sol, /*relaxed=*/true,
                                              /*delta=*/epsilon / 4.0,
                                              CheckOptions{.tol = opts.input_tol});
    if (!pre.feasible)
      throw std::invalid_argument("round: input solution infeasible at tolerance");
  }

  std::vector<SeparatorSampler> samplers;
  samplers.reserve(k);
  double alpha_min = 1.0;
  for (int i = 0; i < k; ++i) {
    SeparatorParams p = make_params(inst.rho(i), epsilon, n, opts.c_beta);
    alpha_min = std::min(alpha_min, p.alpha);
    samplers.emplace_back(sol.block(i), p);
  }

  RoundingResult res;
  res.alpha_min = alpha_min;
  res.bound_T = static_cast<double>(n) * 4.0 * k / alpha_min + 1.0;
  res.caps.resize(k);
  for (int i = 0; i < k; ++i) res.caps[i] = 5.0 * (1.0 + epsilon) * inst.rho(i);

  std::uint64_t max_iter = opts.max_iterations;
  if (max_iter == 0)
    max_iter = static_cast<std::uint64_t>(100.0 * res.bound_T);

  std::vector<char> active(n, 1);
  int active_count = n;
  std::vector<BinState> bins(k);
  std::vector<int> incoming;

  while (active_count > 0 && res.iterations < max_iter) {
    const std::uint64_t t = res.iterations++;
    const int i = static_cast<int>(rng.uniform_index(k));
    SeparatorSample s = samplers[i].sample(inst.mu(i), rng);
    ++res.separator_samples;

    incoming.clear();
    for (int u : s.members)
      if (active[u]) incoming.push_back(u);

    std::vector<int> evicted;
    if (!incoming.empty()) {
      evicted = place_in_bin(bins[i], incoming, res.caps[i], inst.mu(i));
      for (int u : incoming) active[u] = 0;
      for (int u : evicted) active[u] = 1;
      active_count -= static_cast<int>(incoming.size());
      active_count += static_cast<int>(evicted.size());
      res.placements += incoming.size();
      res.evictions += evicted.size();
    }
    if (opts.observer) {
      StepEvent ev;
      ev.t = t;
      ev.bin = i;
      ev.sample = &s.members;
      ev.incoming = &incoming;
      ev.evicted = &evicted;
      opts.observer(ev);
    }
  }

  res.status = active_count == 0 ? RoundStatus::Complete : RoundStatus::IterationCap;
  res.partition.assign.assign(n, -1);
  for (int i = 0; i < k; ++i)
    for (const Layer& layer : bins[i].layers)
      for (int u : layer.members) res.partition.assign[u] = i;
  res.loads.resize(k);
  for (int i = 0; i < k; ++i) {
    res.loads[i] = bins[i].load;
    double recomputed = 0.0;
    for (const Layer& layer : bins[i].layers) recomputed += layer.mass;
    if (std::abs(recomputed - bins[i].load) > 1e-12)
      throw std::logic_error("round: cached bin load drifted");
    if (res.loads[i] > res.caps[i])
      throw std::logic_error("round: capacity invariant violated");
  }
  if (res.complete()) res.cut = cut_weight(inst.graph(), res.partition);
  return res;
}

inline double default_distortion(int n, double rho_min) {
  return std::sqrt(std::max(1.0, std::log(static_cast<double>(n))) *
                   std::max(1.0, std::log(1.0 / rho_min)));
}

enum class GuaranteeStatus { Accepted, Bottom };

struct GuaranteeResult {
  GuaranteeStatus status = GuaranteeStatus::Bottom;
  std::optional<RoundingResult> accepted;
  int attempts = 0;
  int cap_failures = 0;
  int gate_failures = 0;
  double gate = 0.0;  // 48 * dhat * sdp_value
  double dhat = 0.0;

  bool ok() const { return status == GuaranteeStatus::Accepted; }
};

struct GuaranteeOptions {
  std::uint64_t iteration_cap_override = 0;  // 0 = 4 n^4 k + n^2
  int attempts_override = 0;                 // 0 = n
  double input_tol = 1e-6;
  double c_beta = 1.0;
};

// Always-polynomial wrapper: run the rounding with a hard iteration cap
// of 4 n^4 k + n^2, accept a completed run iff its cut passes the cost
// gate cut <= 3 * (16 dhat) * sdp_value, and retry up to n times before
// giving up with a failure token.
inline GuaranteeResult solve_with_guarantee(const Instance& inst, const SdpSolution& sol,
                                            double sdp_value, double epsilon, Rng& rng,
                                            double dhat, const GuaranteeOptions& opts = {}) {
  const double n = inst.n();
  GuaranteeResult g;
  g.dhat = dhat;
  g.gate = 3.0 * (16.0 * dhat) * sdp_value;
  std::uint64_t cap = opts.iteration_cap_override
                          ? opts.iteration_cap_override
                          : static_cast<std::uint64_t>(4.0 * n * n * n * n * inst.k() + n * n);
  int attempts = opts.attempts_override ? opts.attempts_override : inst.n();

  RoundOptions ropts;
  ropts.max_iterations = cap;
  ropts.input_tol = opts.input_tol;
  ropts.c_beta = opts.c_beta;
  ropts.validate_input = true;
  for (int a = 0; a < attempts; ++a) {
    g.attempts = a + 1;
    RoundingResult rr = round_solution(inst, sol, epsilon, rng, ropts);
    ropts.validate_input = false;  // same inputs on retry
    if (!rr.complete()) {
      ++g.cap_failures;
      continue;
    }
    if (rr.cut <= g.gate) {
      g.status = GuaranteeStatus::Accepted;
      g.accepted = std::move(rr);
      return g;
    }
    ++g.gate_failures;
  }
  g.status = GuaranteeStatus::Bottom;
  return g;
}

}  // namespace nupart
