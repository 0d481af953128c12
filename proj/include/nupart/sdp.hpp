#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nupart/instance.hpp"
#include "nupart/rng.hpp"

namespace nupart {

// Vector solution of the partitioning relaxation: one vector per
// (vertex, bin) pair. Vectors of different bins are stored as separate
// n x d_i blocks occupying disjoint coordinate ranges of a shared
// ambient space (no constraint family mixes inner products across bins,
// so the blocks never need to interact geometrically).
class SdpSolution {
 public:
  SdpSolution() = default;

  SdpSolution(int n, int k) : n_(n), blocks_(k) {
    for (auto& b : blocks_) b = Eigen::MatrixXd::Zero(n, 1);
  }

  static SdpSolution from_blocks(std::vector<Eigen::MatrixXd> blocks) {
    SdpSolution s;
    if (blocks.empty()) throw std::invalid_argument("sdp solution: no blocks");
    s.n_ = static_cast<int>(blocks[0].rows());
    for (const auto& b : blocks)
      if (b.rows() != s.n_) throw std::invalid_argument("sdp solution: block row mismatch");
    s.blocks_ = std::move(blocks);
    return s;
  }

  int n() const { return n_; }
  int k() const { return static_cast<int>(blocks_.size()); }
  int dim() const {
    if (shared_ambient_) return static_cast<int>(blocks_[0].cols());
    int d = 0;
    for (const auto& b : blocks_) d += static_cast<int>(b.cols());
    return d;
  }

  const Eigen::MatrixXd& block(int i) const { return blocks_[i]; }
  Eigen::MatrixXd& block(int i) { return blocks_[i]; }

  double norm2(int u, int i) const { return blocks_[i].row(u).squaredNorm(); }
  double dot(int i, int u, int v) const { return blocks_[i].row(u).dot(blocks_[i].row(v)); }
  double dist2(int i, int u, int v) const {
    return (blocks_[i].row(u) - blocks_[i].row(v)).squaredNorm();
  }

  bool finite() const {
    for (const auto& b : blocks_)
      if (!b.allFinite()) return false;
    return true;
  }

  // Flat serialization: {"dim": D, "vectors": {"u,i": [..D reals..]}}.
  // Internally built solutions keep per-bin blocks in disjoint column
  // ranges; parsed ones share the ambient space as given.
  json to_json() const {
    json vecs = json::object();
    int total = dim();
    int offset = 0;
    for (int i = 0; i < k(); ++i) {
      int d = static_cast<int>(blocks_[i].cols());
      for (int u = 0; u < n_; ++u) {
        std::vector<double> v(total, 0.0);
        for (int c = 0; c < d; ++c) v[(shared_ambient_ ? 0 : offset) + c] = blocks_[i](u, c);
        vecs[std::to_string(u) + "," + std::to_string(i)] = std::move(v);
      }
      if (!shared_ambient_) offset += d;
    }
    return json{{"dim", total}, {"vectors", std::move(vecs)}};
  }

  std::string serialize() const { return to_json().dump(); }

  static SdpSolution from_json(const json& j) {
    int dim = j.at("dim").get<int>();
    if (dim < 1) throw std::invalid_argument("sdp solution: dim must be >= 1");
    const json& vecs = j.at("vectors");
    int n = 0, k = 0;
    for (auto it = vecs.begin(); it != vecs.end(); ++it) {
      auto comma = it.key().find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("sdp solution: vector keys must be 'u,i'");
      n = std::max(n, std::stoi(it.key().substr(0, comma)) + 1);
      k = std::max(k, std::stoi(it.key().substr(comma + 1)) + 1);
    }
    SdpSolution s;
    s.n_ = n;
    s.shared_ambient_ = true;
    s.blocks_.assign(k, Eigen::MatrixXd::Zero(n, dim));
    for (auto it = vecs.begin(); it != vecs.end(); ++it) {
      auto comma = it.key().find(',');
      int u = std::stoi(it.key().substr(0, comma));
      int i = std::stoi(it.key().substr(comma + 1));
      auto v = it.value().get<std::vector<double>>();
      if (static_cast<int>(v.size()) != dim)
        throw std::invalid_argument("sdp solution: vector length mismatch");
      for (int c = 0; c < dim; ++c) s.blocks_[i](u, c) = v[c];
    }
    if (!s.finite()) throw std::invalid_argument("sdp solution: non-finite entry");
    return s;
  }

  static SdpSolution deserialize(const std::string& text) {
    return from_json(json::parse(text));
  }

 private:
  int n_ = 0;
  bool shared_ambient_ = false;
  std::vector<Eigen::MatrixXd> blocks_;
};

// Indicator embedding of a partition: dim-1 blocks with u_i = 1 iff
// p(u) = i. Its objective equals cut_weight(p) bit-for-bit.
inline SdpSolution embed_integral(const Instance& inst, const Partition& p) {
  if (p.size() != inst.n() || !p.total(inst.k()))
    throw std::invalid_argument("embed_integral: partition not total");
  SdpSolution s(inst.n(), inst.k());
  for (int u = 0; u < inst.n(); ++u) s.block(p(u))(u, 0) = 1.0;
  return s;
}

// (1/2) sum_i sum_{(u,v) in E} w(u,v) ||u_i - v_i||^2.
// Edges outer, bins inner: for an integral embedding each cut edge
// contributes exactly (w + w) / 2 = w in canonical edge order, which
// makes the value identical to cut_weight.
inline double sdp_objective(const Graph& g, const SdpSolution& sol) {
  if (sol.n() != g.n()) throw std::invalid_argument("sdp objective: size mismatch");
  double total = 0.0;
  for (const Edge& e : g.edges()) {
    double d = 0.0;
    for (int i = 0; i < sol.k(); ++i) d += sol.dist2(i, e.u, e.v);
    total += 0.5 * (e.w * d);
  }
  return total;
}

// Raw maximum violations of each constraint family, evaluated exactly
// as stated. Triangle inequalities are exhaustive for n <= triangle_cap
// and sampled above it.
struct FeasibilityReport {
  double capacity = 0.0;    // sum_u ||u_i||^2 mu_i(u) <= rho_i
  double spreading = 0.0;   // sum_v <u_i,v_i> mu_i(v) <= ||u_i||^2 rho_i
  double assignment = 0.0;  // sum_i ||u_i||^2 = 1, or in [1-delta, 1]
  double triangle = 0.0;    // l2^2 triangle inequality
  double box = 0.0;         // 0 <= <u_i,v_i> <= min norms; ||u_i||^2 <= 1
  double objective = 0.0;
  bool feasible = false;
  bool relaxed = false;
  double delta = 0.0;
  double tol = 0.0;
  bool triangle_sampled = false;
  std::uint64_t triangle_checked = 0;

  double max_violation() const {
    return std::max({capacity, spreading, assignment, triangle, box});
  }

  json to_json() const {
    return json{{"capacity", capacity},   {"spreading", spreading},
                {"assignment", assignment}, {"triangle", triangle},
                {"box", box},             {"objective", objective},
                {"feasible", feasible},   {"relaxed", relaxed},
                {"delta", delta},         {"tol", tol},
                {"triangle_sampled", triangle_sampled},
                {"triangle_checked", triangle_checked}};
  }
};

struct CheckOptions {
  double tol = 1e-6;
  int triangle_exact_cap = 40;
  std::uint64_t triangle_samples = 1000000;
  std::uint64_t sample_seed = 0x7a5e11;
};

inline FeasibilityReport check_feasibility(const Instance& inst, const SdpSolution& sol,
                                           bool relaxed = false, double delta = 0.0,
                                           const CheckOptions& opts = {}) {
  if (sol.n() != inst.n() || sol.k() != inst.k())
    throw std::invalid_argument("check_feasibility: solution shape mismatch");
  if (relaxed && !(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("check_feasibility: relaxed mode needs delta in (0,1)");
  const int n = inst.n();
  const int k = inst.k();

  FeasibilityReport rep;
  rep.relaxed = relaxed;
  rep.delta = delta;
  rep.tol = opts.tol;
  rep.objective = sdp_objective(inst.graph(), sol);

  std::vector<std::vector<double>> norms(k, std::vector<double>(n));
  for (int i = 0; i < k; ++i)
    for (int u = 0; u < n; ++u) norms[i][u] = sol.norm2(u, i);

  for (int i = 0; i < k; ++i) {
    double load = 0.0;
    for (int u = 0; u < n; ++u) load += norms[i][u] * inst.mu(i, u);
    rep.capacity = std::max(rep.capacity, load - inst.rho(i));

    // Gram block for spreading/box; n is desk scale so dense is fine.
    Eigen::MatrixXd gram = sol.block(i) * sol.block(i).transpose();
    for (int u = 0; u < n; ++u) {
      double s = 0.0;
      for (int v = 0; v < n; ++v) s += gram(u, v) * inst.mu(i, v);
      rep.spreading = std::max(rep.spreading, s - norms[i][u] * inst.rho(i));
      rep.box = std::max(rep.box, norms[i][u] - 1.0);
      for (int v = u + 1; v < n; ++v) {
        double d = gram(u, v);
        rep.box = std::max({rep.box, -d, d - std::min(norms[i][u], norms[i][v])});
      }
    }
  }

  for (int u = 0; u < n; ++u) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += norms[i][u];
    if (relaxed)
      rep.assignment = std::max({rep.assignment, s - 1.0, (1.0 - delta) - s});
    else
      rep.assignment = std::max(rep.assignment, std::abs(s - 1.0));
  }

  auto triangle_violation = [&](int i, int u, int v, int w) {
    return sol.dist2(i, u, w) - sol.dist2(i, u, v) - sol.dist2(i, v, w);
  };
  if (n <= opts.triangle_exact_cap) {
    for (int i = 0; i < k; ++i)
      for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u) {
          if (u == v) continue;
          for (int w = u + 1; w < n; ++w) {
            if (w == v) continue;
            rep.triangle = std::max(rep.triangle, triangle_violation(i, u, v, w));
            ++rep.triangle_checked;
          }
        }
  } else {
    rep.triangle_sampled = true;
    Rng rng(opts.sample_seed);
    for (std::uint64_t t = 0; t < opts.triangle_samples; ++t) {
      int i = static_cast<int>(rng.uniform_index(k));
      int u = static_cast<int>(rng.uniform_index(n));
      int v = static_cast<int>(rng.uniform_index(n));
      int w = static_cast<int>(rng.uniform_index(n));
      if (u == v || v == w || u == w) continue;
      rep.triangle = std::max(rep.triangle, triangle_violation(i, u, v, w));
      ++rep.triangle_checked;
    }
  }

  rep.feasible = rep.max_violation() <= opts.tol;
  return rep;
}

}  // namespace nupart
