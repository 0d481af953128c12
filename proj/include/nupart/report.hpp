#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nupart/instance.hpp"
#include "nupart/sdp.hpp"

namespace nupart {

// Flat result record of one pipeline run; everything the bench harness
// or an external plotter needs, JSON round-trippable.
struct RunReport {
  std::string instance_digest;
  std::string mode;  // plain | guaranteed | logk | ddim
  std::string status = "ok";  // ok | incomplete | bottom
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  int n = 0;
  int k = 0;

  double sdp_value = 0.0;
  bool sdp_converged = false;
  bool sdp_fallback = false;
  json sdp_residual;

  std::vector<int> partition;
  double cut = 0.0;
  std::uint64_t iterations = 0;
  double bound_T = 0.0;
  double alpha_min = 0.0;
  std::uint64_t evictions = 0;
  std::vector<double> loads;
  std::vector<double> caps;
  std::vector<double> slacks;  // load / cap
  double dhat = 0.0;

  // transform provenance (logk / ddim modes)
  std::optional<double> theta;
  std::optional<std::vector<double>> rho_tilde;
  std::optional<std::vector<double>> support_mass;

  // wrapper provenance (guaranteed mode)
  std::optional<json> gate;

  // d-dimensional check (ddim mode)
  std::optional<json> ddim;

  std::optional<double> oracle_opt;

  double wall_sdp_sec = 0.0;
  double wall_round_sec = 0.0;
  double wall_total_sec = 0.0;

  json to_json() const {
    json j{{"instance_digest", instance_digest},
           {"mode", mode},
           {"status", status},
           {"seed", seed},
           {"epsilon", epsilon},
           {"n", n},
           {"k", k},
           {"sdp_value", sdp_value},
           {"sdp_converged", sdp_converged},
           {"sdp_fallback", sdp_fallback},
           {"sdp_residual", sdp_residual},
           {"partition", partition},
           {"cut", cut},
           {"iterations", iterations},
           {"bound_T", bound_T},
           {"alpha_min", alpha_min},
           {"evictions", evictions},
           {"loads", loads},
           {"caps", caps},
           {"slacks", slacks},
           {"dhat", dhat},
           {"wall_sdp_sec", wall_sdp_sec},
           {"wall_round_sec", wall_round_sec},
           {"wall_total_sec", wall_total_sec}};
    if (theta) j["theta"] = *theta;
    if (rho_tilde) j["rho_tilde"] = *rho_tilde;
    if (support_mass) j["support_mass"] = *support_mass;
    if (gate) j["gate"] = *gate;
    if (ddim) j["ddim"] = *ddim;
    if (oracle_opt) j["oracle_opt"] = *oracle_opt;
    return j;
  }

  static RunReport from_json(const json& j) {
    RunReport r;
    r.instance_digest = j.at("instance_digest").get<std::string>();
    r.mode = j.at("mode").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.epsilon = j.at("epsilon").get<double>();
    r.n = j.at("n").get<int>();
    r.k = j.at("k").get<int>();
    r.sdp_value = j.at("sdp_value").get<double>();
    r.sdp_converged = j.at("sdp_converged").get<bool>();
    r.sdp_fallback = j.at("sdp_fallback").get<bool>();
    r.sdp_residual = j.at("sdp_residual");
    r.partition = j.at("partition").get<std::vector<int>>();
    r.cut = j.at("cut").get<double>();
    r.iterations = j.at("iterations").get<std::uint64_t>();
    r.bound_T = j.at("bound_T").get<double>();
    r.alpha_min = j.at("alpha_min").get<double>();
    r.evictions = j.at("evictions").get<std::uint64_t>();
    r.loads = j.at("loads").get<std::vector<double>>();
    r.caps = j.at("caps").get<std::vector<double>>();
    r.slacks = j.at("slacks").get<std::vector<double>>();
    r.dhat = j.at("dhat").get<double>();
    r.wall_sdp_sec = j.at("wall_sdp_sec").get<double>();
    r.wall_round_sec = j.at("wall_round_sec").get<double>();
    r.wall_total_sec = j.at("wall_total_sec").get<double>();
    if (j.contains("theta")) r.theta = j.at("theta").get<double>();
    if (j.contains("rho_tilde")) r.rho_tilde = j.at("rho_tilde").get<std::vector<double>>();
    if (j.contains("support_mass"))
      r.support_mass = j.at("support_mass").get<std::vector<double>>();
    if (j.contains("gate")) r.gate = j.at("gate");
    if (j.contains("ddim")) r.ddim = j.at("ddim");
    if (j.contains("oracle_opt")) r.oracle_opt = j.at("oracle_opt").get<double>();
    return r;
  }

  std::string serialize() const { return to_json().dump(); }
};

}  // namespace nupart
