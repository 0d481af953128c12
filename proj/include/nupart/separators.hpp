#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "nupart/rng.hpp"

namespace nupart {

// Parameter bundle of the separator sampler. When built by make_params:
//   delta = beta = epsilon/4, m = 2/(delta*epsilon*rho),
//   l = ceil(c_beta * log2(m)), alpha = min(1/n, 2^-l).
// The word construction cannot give a per-vertex scale above 2^-l, so
// alpha is capped there instead of fixed at 1/n.
struct SeparatorParams {
  double rho = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double m = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  int word_length = 0;
  int n = 0;
};

inline SeparatorParams make_params(double rho, double epsilon, int n,
                                   double c_beta = 1.0) {
  if (!(rho > 0.0 && rho <= 1.0))
    throw std::invalid_argument("separator params: rho must lie in (0,1]");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("separator params: epsilon must lie in (0,1)");
  if (n < 1) throw std::invalid_argument("separator params: n must be >= 1");
  if (!(c_beta > 0.0))
    throw std::invalid_argument("separator params: c_beta must be positive");
  SeparatorParams p;
  p.rho = rho;
  p.epsilon = epsilon;
  p.delta = epsilon / 4.0;
  p.beta = epsilon / 4.0;
  p.m = 2.0 / (p.delta * epsilon * rho);
  p.word_length = std::max(1, static_cast<int>(std::ceil(c_beta * std::log2(p.m))));
  p.alpha = std::min(1.0 / n, std::ldexp(1.0, -p.word_length));
  p.n = n;
  return p;
}

struct SeparatorSample {
  std::vector<int> members;      // S' (empty when truncated)
  std::vector<int> raw_members;  // S before the measure cap
  bool truncated = false;
};

// Samples random vertex subsets from one bin's vectors:
//   S0 = { u : ||u||^2 >= r and <g_j, u> < 0 for all j }, r ~ U(0,1],
//   g_1..g_l iid standard Gaussian directions; S0 survives a final coin
//   of probability alpha * 2^l (= 1 at desk scale).
// Membership of an isolated vertex is then exactly alpha ||u||^2, and
// word agreement decays with the angle between vectors. Gaussians are
// drawn lazily, one direction at a time, and stop as soon as the
// survivor set empties; this changes nothing distributionally because
// dropped draws would never be read.
class SeparatorSampler {
 public:
  SeparatorSampler(const Eigen::MatrixXd& vectors, SeparatorParams params)
      : vectors_(vectors), params_(params) {
    const int n = static_cast<int>(vectors_.rows());
    norms_.resize(n);
    for (int u = 0; u < n; ++u) norms_[u] = vectors_.row(u).squaredNorm();
    by_norm_.resize(n);
    std::iota(by_norm_.begin(), by_norm_.end(), 0);
    std::stable_sort(by_norm_.begin(), by_norm_.end(),
                     [&](int a, int b) { return norms_[a] > norms_[b]; });
    keep_prob_ = std::min(1.0, params_.alpha * std::ldexp(1.0, params_.word_length));
    dir_.resize(vectors_.cols());
  }

  const SeparatorParams& params() const { return params_; }
  double norm2(int u) const { return norms_[u]; }

  std::vector<int> sample_raw(Rng& rng) {
    std::vector<int> survivors;
    if (rng.uniform01() >= keep_prob_) return survivors;
    const double r = rng.uniform_open0_closed1();
    for (int u : by_norm_) {
      if (norms_[u] < r) break;  // sorted: the rest are below the threshold too
      survivors.push_back(u);
    }
    const int dim = static_cast<int>(vectors_.cols());
    for (int j = 0; j < params_.word_length && !survivors.empty(); ++j) {
      for (int c = 0; c < dim; ++c) dir_[c] = rng.normal();
      std::size_t kept = 0;
      for (int u : survivors)
        if (vectors_.row(u).dot(dir_) < 0.0) survivors[kept++] = u;
      survivors.resize(kept);
    }
    std::sort(survivors.begin(), survivors.end());
    return survivors;
  }

  // Truncation wrapper: output S unchanged if mu(S) <= (1+eps)rho,
  // empty otherwise. The cap therefore holds on every draw.
  SeparatorSample sample(const std::vector<double>& mu, Rng& rng) {
    SeparatorSample s;
    s.raw_members = sample_raw(rng);
    double mass = 0.0;
    for (int u : s.raw_members) mass += mu[u];
    if (mass <= (1.0 + params_.epsilon) * params_.rho) {
      s.members = s.raw_members;
    } else {
      s.truncated = true;
    }
    return s;
  }

 private:
  Eigen::MatrixXd vectors_;
  SeparatorParams params_;
  std::vector<double> norms_;
  std::vector<int> by_norm_;
  double keep_prob_ = 1.0;
  Eigen::VectorXd dir_;
};

inline std::vector<int> sample_raw(const Eigen::MatrixXd& vectors,
                                   const SeparatorParams& params, Rng& rng) {
  SeparatorSampler s(vectors, params);
  return s.sample_raw(rng);
}

inline SeparatorSample sample_separator(const Eigen::MatrixXd& vectors,
                                        const std::vector<double>& mu,
                                        const SeparatorParams& params, Rng& rng) {
  SeparatorSampler s(vectors, params);
  return s.sample(mu, rng);
}

// Measure of the ball B_u = { v : ||u - v||^2 < beta ||u||^2 } together
// with the deterministic cap mu(B_u) <= (1 + 2 beta) rho that holds for
// every solution satisfying the spreading and box constraints.
struct BallMassResult {
  double mass = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::vector<int> members;
};

inline BallMassResult ball_mass(const Eigen::MatrixXd& vectors,
                                const std::vector<double>& mu, int u,
                                double beta, double rho) {
  const double nu = vectors.row(u).squaredNorm();
  if (nu == 0.0) throw std::invalid_argument("ball_mass: vector of u must be nonzero");
  BallMassResult res;
  res.bound = (1.0 + 2.0 * beta) * rho;
  for (int v = 0; v < vectors.rows(); ++v) {
    if ((vectors.row(u) - vectors.row(v)).squaredNorm() < beta * nu) {
      res.mass += mu[v];
      res.members.push_back(v);
    }
  }
  res.pass = res.mass <= res.bound;
  return res;
}

}  // namespace nupart
