#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "nupart/oracle.hpp"
#include "nupart/sdp.hpp"

using namespace nupart;

TEST_CASE("exact_opt on the path instance") {
  auto res = exact_opt(testing::path3());
  REQUIRE(res.optimal());
  REQUIRE(res.exhausted);
  REQUIRE(res.opt_cut == 1.0);
  auto rep = check_capacities(testing::path3(), res.witness);
  REQUIRE(rep.accepted());
}

TEST_CASE("exact_opt on K3 with two bins") {
  auto res = exact_opt(testing::triangle_k2());
  REQUIRE(res.optimal());
  REQUIRE(res.opt_cut == 2.0);
}

TEST_CASE("exact_opt trivial and degenerate cases") {
  Graph g = Graph::build(1, {});
  Instance inst(g, 1, {{1.0}}, {1.0});
  auto res = exact_opt(inst);
  REQUIRE(res.optimal());
  REQUIRE(res.opt_cut == 0.0);

  // K3 into three unit bins must cut everything
  auto r3 = exact_opt(testing::triangle_k3());
  REQUIRE(r3.opt_cut == 3.0);
}

TEST_CASE("exact_opt detects infeasibility") {
  Graph g = Graph::build(2, {{0, 1, 1.0}});
  // one bin of capacity 0.6 cannot hold measure 1
  Instance inst(g, 1, {{0.5, 0.5}}, {0.6});
  auto res = exact_opt(inst);
  REQUIRE(res.status == OracleStatus::Infeasible);
}

TEST_CASE("node limit yields a flagged partial result") {
  auto inst = testing::random_instance(91, 10, 3, 0.5);
  OracleConfig cfg;
  cfg.node_limit = 5;
  auto res = exact_opt(inst, cfg);
  REQUIRE_FALSE(res.exhausted);
  REQUIRE(res.status == OracleStatus::NodeLimit);
}

TEST_CASE("oracle agrees with plain enumeration on small instances") {
  for (std::uint64_t seed : {201u, 202u, 203u, 204u, 205u}) {
    auto inst = testing::random_instance(seed, 6, 2, 0.6);
    auto res = exact_opt(inst);
    REQUIRE(res.optimal());

    // independent oracle: full enumeration without pruning
    double best = std::numeric_limits<double>::infinity();
    int n = inst.n();
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<int> assign(n);
      for (int u = 0; u < n; ++u) assign[u] = (mask >> u) & 1;
      Partition p{assign};
      auto caps = check_capacities(inst, p);
      if (!caps.accepted()) continue;
      best = std::min(best, cut_weight(inst.graph(), p));
    }
    REQUIRE(res.opt_cut == best);
    // witness is strictly feasible and embeds exactly
    REQUIRE(check_capacities(inst, res.witness).accepted());
    REQUIRE(sdp_objective(inst.graph(), embed_integral(inst, res.witness)) == res.opt_cut);
  }
}

TEST_CASE("bin relabeling with identical measures keeps opt unchanged") {
  auto inst = testing::random_instance(300, 7, 2, 0.5, true, 1.4, /*uniform_mu=*/true);
  // swap the two (identical) bins
  std::vector<std::vector<double>> mu{inst.mu(1), inst.mu(0)};
  Instance swapped(inst.graph(), 2, mu, {inst.rho(1), inst.rho(0)});
  REQUIRE(exact_opt(inst).opt_cut == exact_opt(swapped).opt_cut);
}

TEST_CASE("exact_opt_ddim agrees with exact_opt for d = 1") {
  for (std::uint64_t seed : {42u, 43u}) {
    Rng rng(seed);
    int n = 6, k = 2;
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        if (rng.uniform01() < 0.5) edges.push_back({u, v, 1.0});
    Graph g = Graph::build(n, edges);

    std::vector<std::vector<std::vector<double>>> r(
        n, std::vector<std::vector<double>>(k, std::vector<double>(1)));
    std::vector<std::vector<double>> c(k, std::vector<double>(1));
    for (int i = 0; i < k; ++i) c[i][0] = rng.uniform(2.0, 4.0);
    for (int u = 0; u < n; ++u)
      for (int i = 0; i < k; ++i) r[u][i][0] = rng.uniform(0.1, 1.0);
    DDimInstance dd(g, k, 1, r, c);

    // equivalent unrelated-weights instance: mu_i = r/total, rho_i = c_i/total
    std::vector<std::vector<double>> mu(k, std::vector<double>(n));
    std::vector<double> rho(k);
    for (int i = 0; i < k; ++i) {
      double total = 0.0;
      for (int u = 0; u < n; ++u) total += r[u][i][0];
      for (int u = 0; u < n; ++u) mu[i][u] = r[u][i][0] / total;
      rho[i] = std::min(1.0, c[i][0] / total);
    }
    Instance inst(g, k, mu, rho);

    auto rd = exact_opt_ddim(dd);
    auto ri = exact_opt(inst);
    REQUIRE(rd.status == ri.status);
    if (rd.optimal()) REQUIRE(rd.opt_cut == Catch::Approx(ri.opt_cut).margin(1e-12));
  }
}

TEST_CASE("exact_opt_ddim small cases") {
  // vertex 0 needs more of resource 0 than any bin offers
  Graph g = Graph::build(2, {{0, 1, 1.0}});
  DDimInstance dd(g, 2, 2,
                  {{{5.0, 1.0}, {5.0, 1.0}}, {{1.0, 1.0}, {1.0, 1.0}}},
                  {{4.0, 4.0}, {4.0, 4.0}});
  REQUIRE(exact_opt_ddim(dd).status == OracleStatus::Infeasible);

  // 4-cycle, d=2, generous capacities: nothing needs to be cut... but a
  // cycle split across bins cuts 2. With capacities fitting everything in
  // one bin the optimum is 0.
  Graph c4 = Graph::build(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {0, 3, 1.0}});
  std::vector<std::vector<std::vector<double>>> r(
      4, std::vector<std::vector<double>>(2, std::vector<double>{1.0, 1.0}));
  DDimInstance roomy(c4, 2, 2, r, {{10.0, 10.0}, {10.0, 10.0}});
  auto res = exact_opt_ddim(roomy);
  REQUIRE(res.opt_cut == 0.0);

  // tight capacities force a 2|2 split of the cycle: cut 2
  DDimInstance tight(c4, 2, 2, r, {{2.0, 2.0}, {2.0, 2.0}});
  auto res2 = exact_opt_ddim(tight);
  REQUIRE(res2.opt_cut == 2.0);
}
