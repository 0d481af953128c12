#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nupart/instance.hpp"
#include "nupart/oracle.hpp"
#include "nupart/report.hpp"
#include "nupart/rounding.hpp"
#include "nupart/sdp.hpp"
#include "nupart/sdp_solver.hpp"
#include "nupart/separators.hpp"
#include "nupart/transforms.hpp"

namespace nupart {

struct PipelineOptions {
  std::string mode = "plain";  // plain | guaranteed | logk | ddim
  double epsilon = 0.2;
  std::uint64_t seed = 1;
  double dhat_override = 0.0;  // 0 = default formula
  double c_beta = 1.0;         // separator word-length multiplier
  bool with_oracle = false;
  bool with_timings = false;  // off by default: reports stay byte-deterministic
  std::uint64_t oracle_node_limit = 100000000;
  SolverConfig sdp;
  const SolveOutcome* cached_sdp = nullptr;  // reuse across seeds in sweeps
};

// Wrap an externally produced vector solution as a solver outcome; the
// value is re-derived and the residual re-checked, never trusted.
inline SolveOutcome adopt_solution(const Instance& inst, SdpSolution sol, double tol = 1e-6) {
  SolveOutcome out;
  CheckOptions copts;
  copts.tol = tol;
  out.residual = check_feasibility(inst, sol, false, 0.0, copts);
  out.solution = std::move(sol);
  out.sdp_value = out.residual.objective;
  out.converged = out.residual.feasible;
  return out;
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void fill_round_fields(RunReport& rep, const RoundingResult& rr) {
  rep.partition = rr.partition.assign;
  rep.cut = rr.cut;
  rep.iterations = rr.iterations;
  rep.bound_T = rr.bound_T;
  rep.alpha_min = rr.alpha_min;
  rep.evictions = rr.evictions;
}

inline void fill_loads(RunReport& rep, const Instance& inst, const Partition& p,
                       double epsilon) {
  rep.loads = inst.bin_loads(p);
  rep.caps.resize(inst.k());
  rep.slacks.resize(inst.k());
  for (int i = 0; i < inst.k(); ++i) {
    rep.caps[i] = 5.0 * (1.0 + epsilon) * inst.rho(i);
    rep.slacks[i] = rep.loads[i] / rep.caps[i];
  }
}

}  // namespace detail

// Run the selected pipeline on an unrelated-weights instance. The SDP is
// solved once (or taken from opt.cached_sdp); rounding randomness is a
// child stream of the root seed, so (instance, mode, seed, config) fully
// determines the report.
inline RunReport run_pipeline_scalar(const Instance& inst, const PipelineOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.instance_digest = instance_digest(inst);
  rep.mode = opt.mode;
  rep.seed = opt.seed;
  rep.epsilon = opt.epsilon;
  rep.n = inst.n();
  rep.k = inst.k();

  SolveOutcome local;
  const SolveOutcome* sdp = opt.cached_sdp;
  if (!sdp) {
    auto ts = std::chrono::steady_clock::now();
    local = solve_sdp(inst, opt.sdp);
    rep.wall_sdp_sec = detail::seconds_since(ts);
    sdp = &local;
  }
  rep.sdp_value = sdp->sdp_value;
  rep.sdp_converged = sdp->converged;
  rep.sdp_fallback = sdp->fallback_used;
  rep.sdp_residual = sdp->residual.to_json();
  if (sdp->unsolvable) {
    rep.status = "bottom";
    return rep;
  }

  Rng root(opt.seed);
  auto tr = std::chrono::steady_clock::now();

  RoundOptions ropts;
  ropts.c_beta = opt.c_beta;

  if (opt.mode == "plain") {
    Rng rng = root.child(1);
    RoundingResult rr = round_solution(inst, sdp->solution, opt.epsilon, rng, ropts);
    rep.dhat = opt.dhat_override > 0.0 ? opt.dhat_override
                                       : default_distortion(inst.n(), inst.rho_min());
    detail::fill_round_fields(rep, rr);
    if (rr.complete()) {
      detail::fill_loads(rep, inst, rr.partition, opt.epsilon);
    } else {
      rep.status = "incomplete";
    }
  } else if (opt.mode == "guaranteed") {
    Rng rng = root.child(1);
    double dhat = opt.dhat_override > 0.0 ? opt.dhat_override
                                          : default_distortion(inst.n(), inst.rho_min());
    rep.dhat = dhat;
    GuaranteeOptions gopts;
    gopts.c_beta = opt.c_beta;
    GuaranteeResult gr = solve_with_guarantee(inst, sdp->solution, sdp->sdp_value,
                                              opt.epsilon, rng, dhat, gopts);
    rep.gate = json{{"gate", gr.gate},
                    {"attempts", gr.attempts},
                    {"cap_failures", gr.cap_failures},
                    {"gate_failures", gr.gate_failures},
                    {"accepted", gr.ok()}};
    if (gr.ok()) {
      detail::fill_round_fields(rep, *gr.accepted);
      detail::fill_loads(rep, inst, gr.accepted->partition, opt.epsilon);
    } else {
      rep.status = "bottom";
    }
  } else if (opt.mode == "logk") {
    Rng transform_rng = root.child(2);
    TruncationResult tr_res =
        truncate_solution(sdp->solution, opt.epsilon / 4.0, transform_rng);
    TransformedProblem tp = reweight(inst, std::move(tr_res));
    Instance tilde = tp.to_instance(inst);
    rep.theta = tp.theta;
    rep.rho_tilde = tp.rho_tilde;
    rep.support_mass = tp.mass;
    rep.dhat = opt.dhat_override > 0.0
                   ? opt.dhat_override
                   : default_distortion(inst.n(), tp.rho_tilde_min());
    Rng rng = root.child(1);
    RoundingResult rr = round_solution(tilde, tp.solution, opt.epsilon, rng, ropts);
    detail::fill_round_fields(rep, rr);
    if (rr.complete()) {
      LiftCertificate cert = lift_partition(tp, inst, rr.partition, opt.epsilon);
      rep.cut = cut_weight(inst.graph(), cert.partition);
      detail::fill_loads(rep, inst, cert.partition, opt.epsilon);
      if (!cert.capacity_ok) rep.status = "incomplete";  // cannot happen; belt and braces
    } else {
      rep.status = "incomplete";
    }
  } else {
    throw std::invalid_argument("unknown mode: " + opt.mode);
  }
  rep.wall_round_sec = detail::seconds_since(tr);

  if (opt.with_oracle) {
    OracleConfig ocfg;
    ocfg.node_limit = opt.oracle_node_limit;
    OracleResult o = exact_opt(inst, ocfg);
    if (o.optimal()) rep.oracle_opt = o.opt_cut;
  }
  rep.wall_total_sec = detail::seconds_since(t0);
  if (!opt.with_timings) rep.wall_sdp_sec = rep.wall_round_sec = rep.wall_total_sec = 0.0;
  return rep;
}

// d-dimensional pipeline: scalarize, run the logk route on the reduced
// instance, then verify the 5d(1+eps) capacity bound on the original.
inline RunReport run_pipeline_ddim(const DDimInstance& dd, const PipelineOptions& opt) {
  auto t0 = std::chrono::steady_clock::now();
  ReducedInstance red = reduce_ddim(dd);
  PipelineOptions inner = opt;
  inner.mode = "logk";
  inner.with_oracle = false;
  RunReport rep = run_pipeline_scalar(red.instance, inner);
  rep.mode = "ddim";
  rep.instance_digest = instance_digest(dd);
  if (rep.status == "ok") {
    DDimReport check = check_ddim(dd, Partition{rep.partition}, opt.epsilon);
    rep.ddim = json{{"d", dd.d()},
                    {"pass", check.pass()},
                    {"worst_ratio", check.worst_ratio},
                    {"loads", check.loads},
                    {"bounds", check.bounds},
                    {"rho_raw", red.rho_raw},
                    {"mu_prime_total", red.mu_prime_total}};
  }
  if (opt.with_oracle) {
    OracleConfig ocfg;
    ocfg.node_limit = opt.oracle_node_limit;
    OracleResult o = exact_opt_ddim(dd, ocfg);
    if (o.optimal()) rep.oracle_opt = o.opt_cut;
  }
  rep.wall_total_sec = detail::seconds_since(t0);
  if (!opt.with_timings) rep.wall_sdp_sec = rep.wall_round_sec = rep.wall_total_sec = 0.0;
  return rep;
}

inline RunReport run_pipeline(const AnyInstance& any, const PipelineOptions& opt) {
  if (std::holds_alternative<DDimInstance>(any)) {
    if (opt.mode != "ddim" && opt.mode != "plain")
      throw std::invalid_argument("d-dimensional instances run in --mode ddim");
    return run_pipeline_ddim(std::get<DDimInstance>(any), opt);
  }
  if (opt.mode == "ddim")
    throw std::invalid_argument("--mode ddim needs a d-dimensional instance");
  return run_pipeline_scalar(std::get<Instance>(any), opt);
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline AnyInstance load_instance(const std::string& path) {
  std::string text = read_file(path);
  if (path.size() > 4 && path.substr(path.size() - 4) == ".txt") {
    auto [g, k] = parse_edge_list(text);
    return uniform_instance(g, k);
  }
  return parse_instance(text);
}

inline void write_output(const std::string& out_path, const std::string& content,
                         std::ostream& fallback) {
  if (out_path.empty()) {
    fallback << content;
    if (!content.empty() && content.back() != '\n') fallback << '\n';
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write file: " + out_path);
    f << content;
  }
}

// Run r of a sweep rooted at `seed`; run 0 is the root itself, so a
// one-run sweep reproduces the single-run report exactly.
inline std::uint64_t derive_run_seed(std::uint64_t seed, int r) {
  return r == 0 ? seed : splitmix64(seed ^ (0xb0b + static_cast<std::uint64_t>(r)));
}

inline int worker_count(std::size_t tasks) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("NUPART_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) hw = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<std::size_t>(hw, std::max<std::size_t>(tasks, 1)));
}

inline std::string csv_line_for(const RunReport& r) {
  std::ostringstream s;
  s.precision(12);
  double max_slack = 0.0;
  for (double x : r.slacks) max_slack = std::max(max_slack, x);
  s << r.instance_digest << ',' << r.mode << ',' << r.status << ',' << r.seed << ','
    << r.n << ',' << r.k << ',' << r.cut << ',' << r.iterations << ',' << r.bound_T
    << ',' << r.sdp_value << ',' << max_slack << ',' << r.dhat;
  return s.str();
}

inline const char* solve_csv_header() {
  return "digest,mode,status,seed,n,k,cut,iterations,bound_T,sdp_value,max_slack,dhat";
}

}  // namespace detail

// ---- subcommand payloads -------------------------------------------------

struct SolveArgs {
  std::string instance_path;
  std::string solution_path;  // optional externally solved relaxation
  std::string out_path;
  std::string emit = "json";
  int runs = 1;
  PipelineOptions opt;
};

inline int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  AnyInstance any = detail::load_instance(args.instance_path);

  // One SDP solve shared across runs; the per-run seed only drives the
  // transform/rounding randomness. An injected solution bypasses the
  // solver entirely (its value and residual are still re-derived).
  std::optional<SolveOutcome> cached;
  if (!args.solution_path.empty()) {
    if (!std::holds_alternative<Instance>(any))
      throw std::invalid_argument("solve: --solution pairs with unrelated-weights instances");
    cached = adopt_solution(std::get<Instance>(any),
                            SdpSolution::deserialize(detail::read_file(args.solution_path)),
                            args.opt.sdp.tol);
  } else if (args.runs > 1 && std::holds_alternative<Instance>(any)) {
    cached = solve_sdp(std::get<Instance>(any), args.opt.sdp);
  }

  std::ostringstream body;
  bool bottom = false;
  for (int r = 0; r < args.runs; ++r) {
    PipelineOptions opt = args.opt;
    if (cached) opt.cached_sdp = &*cached;
    opt.seed = args.runs == 1 ? args.opt.seed : splitmix64(args.opt.seed ^ (0xb0b + r));
    RunReport rep = run_pipeline(any, opt);
    bottom = bottom || rep.status == "bottom";
    if (args.emit == "csv") {
      if (r == 0) body << detail::solve_csv_header() << '\n';
      body << detail::csv_line_for(rep) << '\n';
    } else {
      body << rep.serialize() << '\n';
    }
  }
  detail::write_output(args.out_path, body.str(), out);
  (void)err;
  return bottom ? 2 : 0;
}

struct ExactArgs {
  std::string instance_path;
  std::string out_path;
  std::uint64_t node_limit = 100000000;
  bool no_edge_bound = false;
};

inline int cmd_exact(const ExactArgs& args, std::ostream& out, std::ostream&) {
  AnyInstance any = detail::load_instance(args.instance_path);
  OracleConfig cfg;
  cfg.node_limit = args.node_limit;
  cfg.use_edge_bound = !args.no_edge_bound;
  OracleResult res = std::holds_alternative<Instance>(any)
                         ? exact_opt(std::get<Instance>(any), cfg)
                         : exact_opt_ddim(std::get<DDimInstance>(any), cfg);
  detail::write_output(args.out_path, res.to_json().dump(), out);
  return res.status == OracleStatus::NodeLimit ? 3 : 0;
}

struct SdpArgs {
  std::string instance_path;
  std::string out_path;
  std::string solution_out;
  SolverConfig cfg;
};

inline int cmd_sdp(const SdpArgs& args, std::ostream& out, std::ostream&) {
  Instance inst = parse_unrelated(detail::read_file(args.instance_path));
  SolveOutcome res = solve_sdp(inst, args.cfg);
  json j{{"sdp_value", res.sdp_value},
         {"converged", res.converged},
         {"fallback_used", res.fallback_used},
         {"unsolvable", res.unsolvable},
         {"outer_iterations", res.outer_iters},
         {"triangles_added", res.triangles_added},
         {"residual", res.residual.to_json()},
         {"dim", res.solution.dim()}};
  if (!args.solution_out.empty()) {
    std::ofstream f(args.solution_out, std::ios::binary);
    f << res.solution.serialize();
  } else {
    j["solution"] = res.solution.to_json();
  }
  detail::write_output(args.out_path, j.dump(), out);
  return res.unsolvable ? 2 : 0;
}

struct SeparatorStatsArgs {
  std::string instance_path;
  std::string solution_path;
  std::string out_path;
  int bin = 0;
  double epsilon = 0.2;
  double c_beta = 1.0;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
};

inline int cmd_separator_stats(const SeparatorStatsArgs& args, std::ostream& out,
                               std::ostream&) {
  Instance inst = parse_unrelated(detail::read_file(args.instance_path));
  SdpSolution sol = SdpSolution::deserialize(detail::read_file(args.solution_path));
  if (args.bin < 0 || args.bin >= inst.k())
    throw std::invalid_argument("separator-stats: bin index out of range");
  const int n = inst.n();

  SeparatorParams params = make_params(inst.rho(args.bin), args.epsilon, n, args.c_beta);
  SeparatorSampler sampler(sol.block(args.bin), params);
  Rng rng(args.seed);

  std::vector<std::uint64_t> member(n, 0);
  std::vector<std::vector<std::uint64_t>> joint(n, std::vector<std::uint64_t>(n, 0));
  std::vector<std::vector<std::uint64_t>> sep(n, std::vector<std::uint64_t>(n, 0));
  std::vector<char> in_s(n, 0);
  for (std::uint64_t t = 0; t < args.samples; ++t) {
    SeparatorSample s = sampler.sample(inst.mu(args.bin), rng);
    std::fill(in_s.begin(), in_s.end(), 0);
    for (int u : s.members) in_s[u] = 1;
    for (int u : s.members) {
      ++member[u];
      for (int v = 0; v < n; ++v) {
        if (v == u) continue;
        if (in_s[v])
          ++joint[u][v];
        else
          ++sep[u][v];
      }
    }
  }

  std::ostringstream csv;
  csv.precision(10);
  csv << "kind,u,v,norm2_u,dist2,count,rate,bound_lo,bound_hi,ratio\n";
  const double N = static_cast<double>(args.samples);
  const double alpha = params.alpha;
  for (int u = 0; u < n; ++u) {
    double nu = sampler.norm2(u);
    double rate = member[u] / N;
    csv << "vertex," << u << ",-1," << nu << ",0," << member[u] << ',' << rate << ','
        << (1.0 - params.delta) * alpha * nu << ',' << alpha * nu << ",0\n";
  }
  double dhat = 0.0;
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      double d2 = (sol.block(args.bin).row(u) - sol.block(args.bin).row(v)).squaredNorm();
      double jrate = joint[u][v] / N;
      double srate = sep[u][v] / N;
      double ratio = d2 > 1e-12 ? srate / (alpha * d2) : 0.0;
      dhat = std::max(dhat, ratio);
      if (u < v)
        csv << "joint," << u << ',' << v << ',' << std::min(sampler.norm2(u), sampler.norm2(v))
            << ',' << d2 << ',' << joint[u][v] << ',' << jrate << ",0,"
            << alpha * std::min(sampler.norm2(u), sampler.norm2(v)) / params.m << ",0\n";
      csv << "sep," << u << ',' << v << ',' << sampler.norm2(u) << ',' << d2 << ','
          << sep[u][v] << ',' << srate << ",0,0," << ratio << "\n";
    }
  csv << "summary,-1,-1," << alpha << ",0," << args.samples << ",0,0,0," << dhat << "\n";
  detail::write_output(args.out_path, csv.str(), out);
  return 0;
}

struct BenchArgs {
  std::string dir;
  std::string out_path;
  std::vector<std::uint64_t> seeds = {1};
  int runs = 10;
  PipelineOptions opt;
};

inline int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (fs::exists(args.dir))
    for (const auto& entry : fs::directory_iterator(args.dir))
      if (entry.is_regular_file() && entry.path().extension() == ".json")
        files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());

  std::ostringstream csv;
  csv.precision(12);
  csv << "instance,digest,n,k,mode,total_runs,ok_runs,mean_cut,p95_cut,mean_T,bound_T,"
         "max_slack,dhat,mean_sdp,mean_cut_over_sdp,errors\n";

  for (const std::string& file : files) {
    AnyInstance any;
    try {
      any = detail::load_instance(file);
    } catch (const std::exception& e) {
      err << "bench: skipping unreadable instance " << file << ": " << e.what() << "\n";
      csv << fs::path(file).filename().string() << ",,,,,0,0,0,0,0,0,0,0,0,0,unreadable\n";
      continue;
    }

    // Solve the relaxation once per instance; rounding fans out below.
    std::optional<SolveOutcome> cached;
    if (std::holds_alternative<Instance>(any))
      cached = solve_sdp(std::get<Instance>(any), args.opt.sdp);

    struct Task {
      std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::uint64_t root : args.seeds)
      for (int r = 0; r < args.runs; ++r) tasks.push_back({splitmix64(root ^ (0xb0b + r))});

    std::vector<RunReport> reports(tasks.size());
    std::atomic<std::size_t> next{0};
    int workers = detail::worker_count(tasks.size());
    auto work = [&]() {
      for (;;) {
        std::size_t idx = next.fetch_add(1);
        if (idx >= tasks.size()) return;
        PipelineOptions opt = args.opt;
        opt.seed = tasks[idx].seed;
        if (cached) opt.cached_sdp = &*cached;
        reports[idx] = run_pipeline(any, opt);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::vector<double> cuts;
    double sum_cut = 0, sum_T = 0, sum_sdp = 0, max_slack = 0, bound_T = 0, dhat = 0;
    int ok = 0, errors = 0;
    std::string digest;
    int n = 0, k = 0;
    for (const RunReport& r : reports) {
      digest = r.instance_digest;
      n = r.n;
      k = r.k;
      bound_T = std::max(bound_T, r.bound_T);
      dhat = r.dhat;
      if (r.status != "ok") {
        ++errors;
        continue;
      }
      ++ok;
      cuts.push_back(r.cut);
      sum_cut += r.cut;
      sum_T += static_cast<double>(r.iterations);
      sum_sdp += r.sdp_value;
      for (double s : r.slacks) max_slack = std::max(max_slack, s);
    }
    std::sort(cuts.begin(), cuts.end());
    double mean_cut = ok ? sum_cut / ok : 0.0;
    double p95 = cuts.empty() ? 0.0 : cuts[std::min(cuts.size() - 1,
                                                    static_cast<std::size_t>(
                                                        std::ceil(0.95 * cuts.size())) - 1)];
    double mean_T = ok ? sum_T / ok : 0.0;
    double mean_sdp = ok ? sum_sdp / ok : 0.0;
    csv << fs::path(file).filename().string() << ',' << digest << ',' << n << ',' << k
        << ',' << args.opt.mode << ',' << tasks.size() << ',' << ok << ',' << mean_cut
        << ',' << p95 << ',' << mean_T << ',' << bound_T << ',' << max_slack << ','
        << dhat << ',' << mean_sdp << ','
        << (mean_sdp > 0 ? mean_cut / mean_sdp : 0.0) << ',' << errors << '\n';
  }
  detail::write_output(args.out_path, csv.str(), out);
  return 0;
}

struct CheckArgs {
  std::string instance_path;
  std::string solution_path;
  std::string partition_path;
  std::string out_path;
  double slack = 1.0;
  double epsilon = 0.2;
  double tol = 1e-6;
  bool relaxed = false;
  double delta = 0.05;
};

inline int cmd_check(const CheckArgs& args, std::ostream& out, std::ostream&) {
  json j;
  bool pass = true;
  AnyInstance any = detail::load_instance(args.instance_path);
  j["instance_valid"] = true;
  j["kind"] = std::holds_alternative<Instance>(any) ? "unrelated" : "ddim";

  if (!args.partition_path.empty()) {
    json pj = json::parse(detail::read_file(args.partition_path));
    Partition p{pj.at("assign").get<std::vector<int>>()};
    if (std::holds_alternative<Instance>(any)) {
      auto rep = check_capacities(std::get<Instance>(any), p, args.slack);
      j["capacity"] = {{"loads", rep.loads}, {"violated", rep.violated},
                       {"slack", rep.slack}, {"accepted", rep.accepted()}};
      j["cut"] = cut_weight(std::get<Instance>(any).graph(), p);
      pass = pass && rep.accepted();
    } else {
      auto rep = check_ddim(std::get<DDimInstance>(any), p, args.epsilon);
      j["ddim"] = {{"pass", rep.pass()}, {"worst_ratio", rep.worst_ratio}};
      j["cut"] = cut_weight(std::get<DDimInstance>(any).graph(), p);
      pass = pass && rep.pass();
    }
  }
  if (!args.solution_path.empty()) {
    if (!std::holds_alternative<Instance>(any))
      throw std::invalid_argument("check: SDP solutions pair with unrelated instances");
    SdpSolution sol = SdpSolution::deserialize(detail::read_file(args.solution_path));
    CheckOptions copts;
    copts.tol = args.tol;
    auto rep = check_feasibility(std::get<Instance>(any), sol, args.relaxed, args.delta, copts);
    j["feasibility"] = rep.to_json();
    pass = pass && rep.feasible;
  }
  j["pass"] = pass;
  detail::write_output(args.out_path, j.dump(), out);
  return pass ? 0 : 1;
}

// ---- argument wiring -------------------------------------------------------

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nonuniform graph partitioning toolkit"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve = app.add_subcommand("solve", "run a partitioning pipeline");
  solve->add_option("--instance", solve_args.instance_path, "instance file (.json or .txt)")
      ->required();
  solve->add_option("--solution", solve_args.solution_path,
                    "externally solved SDP solution to inject");
  solve->add_option("--mode", solve_args.opt.mode, "plain | guaranteed | logk | ddim");
  solve->add_option("--epsilon", solve_args.opt.epsilon, "bi-criteria epsilon");
  solve->add_option("--seed", solve_args.opt.seed, "root random seed");
  solve->add_option("--runs", solve_args.runs, "number of seeded runs");
  solve->add_option("--out", solve_args.out_path, "output path (default stdout)");
  solve->add_option("--emit,--format", solve_args.emit, "json | csv");
  solve->add_option("--c-beta", solve_args.opt.c_beta,
                    "separator word-length multiplier");
  solve->add_option("--distortion-override", solve_args.opt.dhat_override,
                    "override the default distortion estimate");
  solve->add_flag("--with-oracle", solve_args.opt.with_oracle,
                  "attach brute-force OPT to the report");
  solve->add_flag("--timings", solve_args.opt.with_timings,
                  "include wall-clock timings (breaks byte determinism)");
  solve->add_option("--sdp-tol", solve_args.opt.sdp.tol, "SDP feasibility tolerance");
  solve->add_option("--sdp-max-iters", solve_args.opt.sdp.max_outer,
                    "SDP outer iteration cap");
  solve->add_option("--sdp-time-budget", solve_args.opt.sdp.time_budget_sec,
                    "SDP time budget in seconds");

  ExactArgs exact_args;
  auto* exact = app.add_subcommand("exact", "brute-force optimum for small instances");
  exact->add_option("--instance", exact_args.instance_path)->required();
  exact->add_option("--node-limit", exact_args.node_limit);
  exact->add_flag("--no-edge-bound", exact_args.no_edge_bound);
  exact->add_option("--out", exact_args.out_path);

  SdpArgs sdp_args;
  auto* sdp = app.add_subcommand("sdp", "solve the relaxation only");
  sdp->add_option("--instance", sdp_args.instance_path)->required();
  sdp->add_option("--out", sdp_args.out_path);
  sdp->add_option("--solution-out", sdp_args.solution_out,
                  "write the vector solution to its own file");
  sdp->add_option("--sdp-tol", sdp_args.cfg.tol);
  sdp->add_option("--sdp-max-iters", sdp_args.cfg.max_outer);
  sdp->add_option("--sdp-time-budget", sdp_args.cfg.time_budget_sec);
  sdp->add_option("--seed", sdp_args.cfg.seed);

  SeparatorStatsArgs sep_args;
  auto* sep = app.add_subcommand("separator-stats", "Monte Carlo separator statistics");
  sep->add_option("--instance", sep_args.instance_path)->required();
  sep->add_option("--solution", sep_args.solution_path)->required();
  sep->add_option("--bin", sep_args.bin)->required();
  sep->add_option("--epsilon", sep_args.epsilon);
  sep->add_option("--c-beta", sep_args.c_beta);
  sep->add_option("--samples", sep_args.samples);
  sep->add_option("--seed", sep_args.seed);
  sep->add_option("--out", sep_args.out_path);

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "sweep a directory of instances");
  bench->add_option("--dir", bench_args.dir)->required();
  bench->add_option("--seeds", bench_args.seeds, "root seeds");
  bench->add_option("--runs", bench_args.runs, "runs per seed");
  bench->add_option("--mode", bench_args.opt.mode);
  bench->add_option("--epsilon", bench_args.opt.epsilon);
  bench->add_option("--out", bench_args.out_path);
  bench->add_option("--sdp-tol", bench_args.opt.sdp.tol);
  bench->add_option("--sdp-time-budget", bench_args.opt.sdp.time_budget_sec);

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "validate instances, partitions, solutions");
  check->add_option("--instance", check_args.instance_path)->required();
  check->add_option("--solution", check_args.solution_path);
  check->add_option("--partition", check_args.partition_path);
  check->add_option("--slack", check_args.slack);
  check->add_option("--epsilon", check_args.epsilon);
  check->add_option("--tol", check_args.tol);
  check->add_flag("--relaxed", check_args.relaxed);
  check->add_option("--delta", check_args.delta);
  check->add_option("--out", check_args.out_path);

  std::vector<const char*> argv;
  argv.push_back("nupart");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream dummy;
    int code = app.exit(e, dummy, dummy);
    (err << dummy.str()).flush();
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_args, out, err);
    if (exact->parsed()) return cmd_exact(exact_args, out, err);
    if (sdp->parsed()) return cmd_sdp(sdp_args, out, err);
    if (sep->parsed()) return cmd_separator_stats(sep_args, out, err);
    if (bench->parsed()) return cmd_bench(bench_args, out, err);
    if (check->parsed()) return cmd_check(check_args, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace nupart
