#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "nupart/graph.hpp"

namespace nupart {

using json = nlohmann::json;

// Partitioning instance with unrelated weights: k normalized measures
// mu_i over V and per-bin capacities rho_i in (0,1]. Measures are
// renormalized after parsing so mu_i(V) == 1 up to machine rounding.
class Instance {
 public:
  Instance() = default;

  Instance(Graph g, int k, std::vector<std::vector<double>> mu,
           std::vector<double> rho, std::optional<Partition> witness = {})
      : graph_(std::move(g)),
        k_(k),
        mu_(std::move(mu)),
        rho_(std::move(rho)),
        witness_(std::move(witness)) {
    validate();
  }

  const Graph& graph() const { return graph_; }
  int n() const { return graph_.n(); }
  int k() const { return k_; }
  const std::vector<std::vector<double>>& mu() const { return mu_; }
  const std::vector<double>& mu(int i) const { return mu_[i]; }
  double mu(int i, int u) const { return mu_[i][u]; }
  const std::vector<double>& rho() const { return rho_; }
  double rho(int i) const { return rho_[i]; }
  double rho_min() const {
    double r = 1.0;
    for (double x : rho_) r = std::min(r, x);
    return r;
  }
  bool feasible_known() const { return witness_.has_value(); }
  const std::optional<Partition>& witness() const { return witness_; }

  double measure_of(int i, const std::vector<int>& verts) const {
    double s = 0.0;
    for (int u : verts) s += mu_[i][u];
    return s;
  }

  // Per-bin load of a partition under that bin's own measure.
  std::vector<double> bin_loads(const Partition& p) const {
    std::vector<double> loads(k_, 0.0);
    for (int u = 0; u < n(); ++u)
      if (p(u) >= 0) loads[p(u)] += mu_[p(u)][u];
    return loads;
  }

  json to_json() const {
    json j;
    j["n"] = n();
    j["k"] = k_;
    json edges = json::array();
    for (const Edge& e : graph_.edges()) edges.push_back({e.u, e.v, e.w});
    j["edges"] = std::move(edges);
    j["mu"] = mu_;
    j["rho"] = rho_;
    if (witness_) j["witness"] = witness_->assign;
    return j;
  }

  std::string serialize() const { return to_json().dump(); }

 private:
  void validate() {
    if (k_ < 1) throw std::invalid_argument("instance: k must be >= 1");
    if (static_cast<int>(mu_.size()) != k_ || static_cast<int>(rho_.size()) != k_)
      throw std::invalid_argument("instance: need k measures and k capacities");
    for (int i = 0; i < k_; ++i) {
      if (static_cast<int>(mu_[i].size()) != n())
        throw std::invalid_argument("instance: measure length mismatch");
      double total = 0.0;
      for (double x : mu_[i]) {
        if (!(x >= 0.0) || !std::isfinite(x))
          throw std::invalid_argument("instance: measure values must be nonnegative");
        total += x;
      }
      if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("measure not normalized");
      // renormalize, but idempotently: re-parsing an already normalized
      // document must reproduce it bit-for-bit
      if (std::abs(total - 1.0) > 1e-14)
        for (double& x : mu_[i]) x /= total;
      if (!(rho_[i] > 0.0) || rho_[i] > 1.0 || !std::isfinite(rho_[i]))
        throw std::invalid_argument("instance: rho must lie in (0,1]");
    }
    if (witness_) {
      if (witness_->size() != n() || !witness_->total(k_))
        throw std::invalid_argument("instance: witness is not a total partition");
      auto loads = bin_loads(*witness_);
      for (int i = 0; i < k_; ++i)
        if (loads[i] > rho_[i])
          throw std::invalid_argument("instance: witness violates capacities");
    }
  }

  Graph graph_;
  int k_ = 0;
  std::vector<std::vector<double>> mu_;
  std::vector<double> rho_;
  std::optional<Partition> witness_;
};

// d-dimensional variant: vertex u consumes r_j(u,i) units of resource j
// when assigned to bin i; bin i offers c_j(i) units.
class DDimInstance {
 public:
  DDimInstance() = default;

  DDimInstance(Graph g, int k, int d,
               std::vector<std::vector<std::vector<double>>> r,
               std::vector<std::vector<double>> c)
      : graph_(std::move(g)), k_(k), d_(d), r_(std::move(r)), c_(std::move(c)) {
    validate();
  }

  const Graph& graph() const { return graph_; }
  int n() const { return graph_.n(); }
  int k() const { return k_; }
  int d() const { return d_; }
  double r(int u, int i, int j) const { return r_[u][i][j]; }
  double c(int i, int j) const { return c_[i][j]; }

  json to_json() const {
    json j;
    j["n"] = n();
    j["k"] = k_;
    j["d"] = d_;
    json edges = json::array();
    for (const Edge& e : graph_.edges()) edges.push_back({e.u, e.v, e.w});
    j["edges"] = std::move(edges);
    j["r"] = r_;
    j["c"] = c_;
    return j;
  }

  std::string serialize() const { return to_json().dump(); }

 private:
  void validate() {
    if (k_ < 1 || d_ < 1)
      throw std::invalid_argument("ddim instance: k and d must be >= 1");
    if (static_cast<int>(r_.size()) != n())
      throw std::invalid_argument("ddim instance: r must have one row per vertex");
    for (const auto& per_bin : r_) {
      if (static_cast<int>(per_bin.size()) != k_)
        throw std::invalid_argument("ddim instance: r row length mismatch");
      for (const auto& res : per_bin) {
        if (static_cast<int>(res.size()) != d_)
          throw std::invalid_argument("ddim instance: r resource length mismatch");
        for (double x : res)
          if (!(x >= 0.0) || !std::isfinite(x))
            throw std::invalid_argument("ddim instance: requirements must be nonnegative and finite");
      }
    }
    if (static_cast<int>(c_.size()) != k_)
      throw std::invalid_argument("ddim instance: c must have k rows");
    for (const auto& res : c_) {
      if (static_cast<int>(res.size()) != d_)
        throw std::invalid_argument("ddim instance: c resource length mismatch");
      for (double x : res)
        if (!(x > 0.0) || !std::isfinite(x))
          throw std::invalid_argument("capacity must be positive");
    }
  }

  Graph graph_;
  int k_ = 0;
  int d_ = 0;
  std::vector<std::vector<std::vector<double>>> r_;  // [u][i][j]
  std::vector<std::vector<double>> c_;               // [i][j]
};

using AnyInstance = std::variant<Instance, DDimInstance>;

namespace detail {

inline Graph graph_from_json(const json& j) {
  int n = j.at("n").get<int>();
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3)
      throw std::invalid_argument("instance: each edge must be [u, v, w]");
    edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
  }
  return Graph::build(n, edges);
}

}  // namespace detail

// Accepts both schema variants; the presence of "d" selects the
// d-dimensional one.
inline AnyInstance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance: malformed JSON: ") + e.what());
  }
  try {
    Graph g = detail::graph_from_json(j);
    int k = j.at("k").get<int>();
    if (j.contains("d")) {
      return DDimInstance(std::move(g), k, j.at("d").get<int>(),
                          j.at("r").get<std::vector<std::vector<std::vector<double>>>>(),
                          j.at("c").get<std::vector<std::vector<double>>>());
    }
    std::optional<Partition> witness;
    if (j.contains("witness"))
      witness = Partition{j.at("witness").get<std::vector<int>>()};
    return Instance(std::move(g), k,
                    j.at("mu").get<std::vector<std::vector<double>>>(),
                    j.at("rho").get<std::vector<double>>(), std::move(witness));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance: missing or mistyped field: ") + e.what());
  }
}

inline Instance parse_unrelated(const std::string& text) {
  AnyInstance any = parse_instance(text);
  if (!std::holds_alternative<Instance>(any))
    throw std::invalid_argument("instance: expected unrelated-weights schema, got d-dimensional");
  return std::get<Instance>(std::move(any));
}

inline DDimInstance parse_ddim(const std::string& text) {
  AnyInstance any = parse_instance(text);
  if (!std::holds_alternative<DDimInstance>(any))
    throw std::invalid_argument("instance: expected d-dimensional schema");
  return std::get<DDimInstance>(std::move(any));
}

// Per-bin loads and the set of bins exceeding slack * rho_i.
struct CapacityReport {
  std::vector<double> loads;
  std::vector<int> violated;
  double slack = 1.0;

  bool accepted() const { return violated.empty(); }
};

inline CapacityReport check_capacities(const Instance& inst, const Partition& p,
                                       double slack = 1.0) {
  if (slack < 1.0) throw std::invalid_argument("check_capacities: slack must be >= 1");
  CapacityReport rep;
  rep.slack = slack;
  rep.loads = inst.bin_loads(p);
  for (int i = 0; i < inst.k(); ++i)
    if (rep.loads[i] > slack * inst.rho(i)) rep.violated.push_back(i);
  return rep;
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename Inst>
inline std::string instance_digest(const Inst& inst) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(inst.serialize())));
  return buf;
}

// Uniform instance from a bare edge list: mu_i(u) = 1/n for every bin and
// rho_i = ceil(n/k)/n, the tightest balanced capacity an integral
// partition can meet.
inline Instance uniform_instance(const Graph& g, int k) {
  int n = g.n();
  std::vector<std::vector<double>> mu(k, std::vector<double>(n, 1.0 / n));
  double rho = static_cast<double>((n + k - 1) / k) / n;
  return Instance(g, k, std::move(mu), std::vector<double>(k, rho));
}

}  // namespace nupart
