#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "helpers.hpp"
#include "nupart/oracle.hpp"
#include "nupart/rounding.hpp"

using namespace nupart;

TEST_CASE("place_in_bin keeps the largest depth under the cap") {
  // rho = 0.1, eps = 0.2 => cap = 0.6; layers (top..bottom) of masses
  // 0.15 / 0.2 / 0.2 plus incoming 0.15 overflow to 0.70, so the bottom
  // layer is evicted and the load settles at 0.5.
  std::vector<double> mu{0.05, 0.10, 0.10, 0.10, 0.10, 0.10, 0.05, 0.10};
  BinState bin;
  bin.layers.push_back({{0, 1}, 0.15});   // depth 1
  bin.layers.push_back({{2, 3}, 0.20});   // depth 2
  bin.layers.push_back({{4, 5}, 0.20});   // depth 3
  bin.load = 0.55;
  std::vector<int> incoming{6, 7};  // mass 0.05 + 0.10 = 0.15
  auto evicted = place_in_bin(bin, incoming, 0.6, mu);
  REQUIRE(evicted == std::vector<int>{4, 5});
  REQUIRE(bin.layers.size() == 3);
  REQUIRE(bin.layers[0].mass == Catch::Approx(0.15));
  REQUIRE(bin.layers[1].mass == Catch::Approx(0.15));
  REQUIRE(bin.layers[2].mass == Catch::Approx(0.20));
  REQUIRE(bin.load == Catch::Approx(0.5));
}

TEST_CASE("place_in_bin edge cases") {
  std::vector<double> mu{0.15, 0.2};
  BinState bin;
  bin.layers.push_back({{1}, 0.2});
  bin.load = 0.2;

  SECTION("empty incoming set is a no-op") {
    auto evicted = place_in_bin(bin, {}, 0.6, mu);
    REQUIRE(evicted.empty());
    REQUIRE(bin.layers.size() == 1);
    REQUIRE(bin.load == Catch::Approx(0.2));
  }
  SECTION("empty bin accepts a fitting layer without eviction") {
    BinState fresh;
    auto evicted = place_in_bin(fresh, {0}, 0.6, mu);
    REQUIRE(evicted.empty());
    REQUIRE(fresh.layers.size() == 1);
    REQUIRE(fresh.load == Catch::Approx(0.15));
  }
  SECTION("incoming alone above the cap is an invariant fault") {
    REQUIRE_THROWS_AS(place_in_bin(bin, {0, 1}, 0.3, mu), std::logic_error);
  }
}

TEST_CASE("round terminates with zero cut on edgeless graphs") {
  Graph g = Graph::build(4, {});
  std::vector<std::vector<double>> mu(2, std::vector<double>(4, 0.25));
  Instance inst(g, 2, mu, {0.75, 0.75});
  SdpSolution sol = embed_integral(inst, Partition{{0, 0, 1, 1}});
  Rng rng(5);
  auto res = round_solution(inst, sol, 0.2, rng);
  REQUIRE(res.complete());
  REQUIRE(res.cut == 0.0);
}

TEST_CASE("round handles a single vertex and bin") {
  Graph g = Graph::build(1, {});
  Instance inst(g, 1, {{1.0}}, {1.0});
  SdpSolution sol = embed_integral(inst, Partition{{0}});
  Rng rng(6);
  auto res = round_solution(inst, sol, 0.2, rng);
  REQUIRE(res.complete());
  REQUIRE(res.iterations >= 1);
  REQUIRE(res.cut == 0.0);
  REQUIRE(res.partition.assign == std::vector<int>{0});
}

TEST_CASE("seed sweep on the path instance") {
  auto inst = testing::path3();
  auto o = exact_opt(inst);
  REQUIRE(o.opt_cut == 1.0);
  SdpSolution sol = embed_integral(inst, o.witness);

  const double eps = 0.2;
  double sum_T = 0.0, sum_cut = 0.0;
  double bound = 0.0;
  const int runs = 60;
  for (int r = 0; r < runs; ++r) {
    Rng rng(1000 + r);
    RoundOptions opts;
    opts.validate_input = (r == 0);
    auto res = round_solution(inst, sol, eps, rng, opts);
    REQUIRE(res.complete());
    for (int i = 0; i < inst.k(); ++i)
      REQUIRE(res.loads[i] <= 5.0 * (1.0 + eps) * inst.rho(i));
    sum_T += static_cast<double>(res.iterations);
    sum_cut += res.cut;
    bound = res.bound_T;
  }
  REQUIRE(sum_T / runs <= bound);
  // cut stays within a small constant of OPT = 1 on average
  REQUIRE(sum_cut / runs <= 8.0);
}

TEST_CASE("state stays a partition of V and layers stay atomic") {
  auto inst = testing::random_instance(61, 9, 3, 0.5);
  SdpSolution sol = embed_integral(inst, *inst.witness());

  // mirror the algorithm state from step events
  std::vector<int> where(inst.n(), -1);  // -1 active, else bin
  std::map<int, int> depth_cohort;       // vertex -> step at which it entered
  bool case2_seen = false;
  std::vector<char> prev_active(inst.n(), 1);

  RoundOptions opts;
  opts.observer = [&](const StepEvent& ev) {
    // co-placement: everything evicted at this step must have entered at
    // the same step as every co-evicted member of its layer cohort; and a
    // vertex evicted while a same-cohort same-bin vertex stays would be
    // the impossible "case 2".
    std::map<int, int> cohort_of_evicted;
    for (int u : *ev.evicted) {
      cohort_of_evicted[depth_cohort[u]]++;
      where[u] = -1;
    }
    for (int u : *ev.incoming) {
      where[u] = ev.bin;
      depth_cohort[u] = static_cast<int>(ev.t);
    }
    // verify cohort atomicity: no member of an evicted cohort may remain
    for (auto [cohort, cnt] : cohort_of_evicted) {
      for (int v = 0; v < static_cast<int>(where.size()); ++v) {
        if (where[v] == ev.bin && depth_cohort.count(v) && depth_cohort[v] == cohort) {
          bool v_incoming = false;
          for (int w : *ev.incoming) v_incoming |= (w == v);
          if (!v_incoming) case2_seen = true;
        }
      }
    }
  };
  Rng rng(62);
  auto res = round_solution(inst, sol, 0.2, rng, opts);
  REQUIRE(res.complete());
  REQUIRE_FALSE(case2_seen);
  // final mirror agrees with the result partition
  for (int u = 0; u < inst.n(); ++u) REQUIRE(where[u] == res.partition.assign[u]);
}

TEST_CASE("iteration cap yields an incomplete run") {
  auto inst = testing::random_instance(63, 8, 2, 0.5);
  SdpSolution sol = embed_integral(inst, *inst.witness());
  Rng rng(64);
  RoundOptions opts;
  opts.max_iterations = 3;
  auto res = round_solution(inst, sol, 0.2, rng, opts);
  REQUIRE_FALSE(res.complete());
  REQUIRE(res.iterations == 3);
}

TEST_CASE("infeasible input solutions are rejected") {
  auto inst = testing::path3();
  SdpSolution zero(inst.n(), inst.k());  // all-zero: violates assignment
  Rng rng(65);
  REQUIRE_THROWS_AS(round_solution(inst, zero, 0.2, rng), std::invalid_argument);
}

TEST_CASE("wrapper accepts zero-cut runs") {
  Graph g = Graph::build(3, {});
  std::vector<std::vector<double>> mu(2, std::vector<double>(3, 1.0 / 3));
  Instance inst(g, 2, mu, {1.0, 1.0});
  SdpSolution sol = embed_integral(inst, testing::all_in_bin(3, 0));
  Rng rng(66);
  auto res = solve_with_guarantee(inst, sol, 0.0, 0.2, rng, 1.5);
  REQUIRE(res.ok());
  REQUIRE(res.accepted->cut == 0.0);
  REQUIRE(res.accepted->cut <= res.gate);
}

TEST_CASE("wrapper retries on forced iteration caps and then fails") {
  auto inst = testing::path3();
  SdpSolution sol = embed_integral(inst, exact_opt(inst).witness);
  Rng rng(67);
  GuaranteeOptions opts;
  opts.iteration_cap_override = 1;  // no run can finish in one iteration
  auto res = solve_with_guarantee(inst, sol, 1.0, 0.2, rng, 1.5, opts);
  REQUIRE_FALSE(res.ok());
  REQUIRE(res.attempts == inst.n());
  REQUIRE(res.cap_failures == inst.n());
}

TEST_CASE("wrapper rejects through the cost gate and then fails") {
  auto inst = testing::path3();  // every feasible partition cuts >= 1
  SdpSolution sol = embed_integral(inst, exact_opt(inst).witness);
  Rng rng(68);
  auto res = solve_with_guarantee(inst, sol, 1.0, 0.2, rng, /*dhat=*/1e-12);
  REQUIRE_FALSE(res.ok());
  REQUIRE(res.gate_failures + res.cap_failures == res.attempts);
  REQUIRE(res.gate_failures >= 1);
}

TEST_CASE("wrapper success satisfies the gate bound") {
  auto inst = testing::random_instance(69, 8, 2, 0.6);
  SdpSolution sol = embed_integral(inst, *inst.witness());
  double sdp_value = sdp_objective(inst.graph(), sol);
  double dhat = default_distortion(inst.n(), inst.rho_min());
  Rng rng(70);
  auto res = solve_with_guarantee(inst, sol, sdp_value, 0.2, rng, dhat);
  REQUIRE(res.ok());
  REQUIRE(res.accepted->cut <= 48.0 * dhat * sdp_value);
}

TEST_CASE("reactivation fraction stays below one half") {
  auto inst = testing::random_instance(71, 9, 3, 0.5);
  SdpSolution sol = embed_integral(inst, *inst.witness());
  std::uint64_t placements = 0, evictions = 0;
  for (int r = 0; r < 40; ++r) {
    Rng rng(7100 + r);
    RoundOptions opts;
    opts.validate_input = (r == 0);
    auto res = round_solution(inst, sol, 0.2, rng, opts);
    REQUIRE(res.complete());
    placements += res.placements;
    evictions += res.evictions;
  }
  double frac = static_cast<double>(evictions) / static_cast<double>(placements);
  double se = std::sqrt(0.25 / static_cast<double>(placements));
  REQUIRE(frac < 0.5 + 4.0 * se);
}
