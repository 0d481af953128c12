#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nupart {

struct Edge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

// Undirected weighted graph on vertices 0..n-1. Edges are canonicalized
// (u < v, sorted, parallel edges merged by weight summation); self-loops
// are rejected.
class Graph {
 public:
  Graph() = default;

  static Graph build(int n, const std::vector<Edge>& raw) {
    if (n < 0) throw std::invalid_argument("graph: negative vertex count");
    std::map<std::pair<int, int>, double> merged;
    for (const Edge& e : raw) {
      if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
        throw std::invalid_argument("graph: vertex id out of range");
      if (e.u == e.v) throw std::invalid_argument("graph: self-loop");
      if (!(e.w > 0.0) || !std::isfinite(e.w))
        throw std::invalid_argument("graph: edge weight must be positive and finite");
      auto key = std::minmax(e.u, e.v);
      merged[{key.first, key.second}] += e.w;
    }
    Graph g;
    g.n_ = n;
    g.edges_.reserve(merged.size());
    for (const auto& [key, w] : merged) g.edges_.push_back({key.first, key.second, w});
    return g;
  }

  int n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t m() const { return edges_.size(); }

  double total_weight() const {
    double s = 0.0;
    for (const Edge& e : edges_) s += e.w;
    return s;
  }

  // Weighted degree of every vertex.
  std::vector<double> weighted_degrees() const {
    std::vector<double> deg(n_, 0.0);
    for (const Edge& e : edges_) {
      deg[e.u] += e.w;
      deg[e.v] += e.w;
    }
    return deg;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

// Total assignment of vertices to bins 0..k-1. Bins may be empty.
// An entry of -1 marks "unassigned" and only appears in incomplete
// rounding reports, never in a finished partition.
struct Partition {
  std::vector<int> assign;

  int size() const { return static_cast<int>(assign.size()); }
  int operator()(int u) const { return assign[u]; }

  bool total(int k) const {
    for (int a : assign)
      if (a < 0 || a >= k) return false;
    return true;
  }
};

// Sum of weights of edges whose endpoints land in different bins.
// Accumulates in canonical edge order so integral SDP embeddings can
// reproduce the value bit-for-bit.
inline double cut_weight(const Graph& g, const Partition& p) {
  if (p.size() != g.n()) throw std::invalid_argument("cut_weight: partition size mismatch");
  double cut = 0.0;
  for (const Edge& e : g.edges())
    if (p(e.u) != p(e.v)) cut += e.w;
  return cut;
}

inline double intra_weight(const Graph& g, const Partition& p) {
  double s = 0.0;
  for (const Edge& e : g.edges())
    if (p(e.u) == p(e.v)) s += e.w;
  return s;
}

// Plain edge-list text: first line "n m k", then m lines "u v w".
inline std::pair<Graph, int> parse_edge_list(const std::string& text) {
  std::istringstream in(text);
  int n = -1, k = -1;
  std::size_t m = 0;
  if (!(in >> n >> m >> k)) throw std::invalid_argument("edge list: bad header, expected 'n m k'");
  if (k < 1) throw std::invalid_argument("edge list: k must be >= 1");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Edge e;
    if (!(in >> e.u >> e.v >> e.w))
      throw std::invalid_argument("edge list: truncated edge line");
    edges.push_back(e);
  }
  return {Graph::build(n, edges), k};
}

}  // namespace nupart
