#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "nupart/cli.hpp"

using namespace nupart;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("nupart_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }

  std::string write(const std::string& name, const std::string& content) const {
    fs::path p = path / name;
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p.string();
  }
};

std::pair<int, std::string> run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(std::move(args), out, err);
  return {code, out.str()};
}

std::string ddim_doc() {
  json j;
  j["n"] = 4;
  j["k"] = 2;
  j["d"] = 2;
  j["edges"] = json::array({{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  j["r"] = std::vector<std::vector<std::vector<double>>>(
      4, std::vector<std::vector<double>>(2, std::vector<double>{1.0, 0.5}));
  j["c"] = std::vector<std::vector<double>>(2, std::vector<double>{2.5, 1.5});
  return j.dump();
}

}  // namespace

TEST_CASE("solve is byte-identical for a fixed seed") {
  TempDir tmp;
  std::string file = tmp.write("path3.json", testing::path3().serialize());
  auto a = run({"solve", "--instance", file, "--mode", "plain", "--seed", "7"});
  auto b = run({"solve", "--instance", file, "--mode", "plain", "--seed", "7"});
  REQUIRE(a.first == 0);
  REQUIRE(a.second == b.second);
  REQUIRE_FALSE(a.second.empty());

  // different seed, different run
  auto c = run({"solve", "--instance", file, "--mode", "plain", "--seed", "8"});
  RunReport ra = RunReport::from_json(json::parse(a.second));
  RunReport rc = RunReport::from_json(json::parse(c.second));
  REQUIRE(ra.seed != rc.seed);
}

TEST_CASE("run reports round-trip through serialization") {
  TempDir tmp;
  std::string file = tmp.write("inst.json", testing::random_instance(5, 6, 2, 0.5).serialize());
  auto [code, out] = run({"solve", "--instance", file, "--mode", "logk", "--seed", "3",
                          "--with-oracle"});
  REQUIRE(code == 0);
  RunReport rep = RunReport::from_json(json::parse(out));
  REQUIRE(rep.serialize() == RunReport::from_json(json::parse(rep.serialize())).serialize());
  REQUIRE(rep.theta.has_value());
  REQUIRE(rep.oracle_opt.has_value());
  for (std::size_t i = 0; i < rep.loads.size(); ++i)
    REQUIRE(rep.loads[i] <= rep.caps[i]);
}

TEST_CASE("guaranteed mode reports bottom with exit code 2 when gated out") {
  TempDir tmp;
  std::string file = tmp.write("path3.json", testing::path3().serialize());
  // distortion forced to ~0 means the gate rejects every nonzero cut
  auto [code, out] = run({"solve", "--instance", file, "--mode", "guaranteed",
                          "--seed", "5", "--distortion-override", "1e-12"});
  REQUIRE(code == 2);
  RunReport rep = RunReport::from_json(json::parse(out));
  REQUIRE(rep.status == "bottom");
  REQUIRE(rep.gate.has_value());
}

TEST_CASE("ddim mode attaches the capacity check") {
  TempDir tmp;
  std::string file = tmp.write("dd.json", ddim_doc());
  auto [code, out] = run({"solve", "--instance", file, "--mode", "ddim", "--seed", "4"});
  REQUIRE(code == 0);
  RunReport rep = RunReport::from_json(json::parse(out));
  REQUIRE(rep.mode == "ddim");
  REQUIRE(rep.ddim.has_value());
  REQUIRE(rep.ddim->at("pass").get<bool>());
}

TEST_CASE("exact subcommand emits oracle JSON") {
  TempDir tmp;
  std::string file = tmp.write("path3.json", testing::path3().serialize());
  auto [code, out] = run({"exact", "--instance", file});
  REQUIRE(code == 0);
  json j = json::parse(out);
  REQUIRE(j.at("status") == "optimal");
  REQUIRE(j.at("opt_cut").get<double>() == 1.0);
}

TEST_CASE("sdp subcommand emits a loadable solution") {
  TempDir tmp;
  std::string file = tmp.write("inst.json", testing::path3().serialize());
  std::string sol_path = (tmp.path / "sol.json").string();
  auto [code, out] = run({"sdp", "--instance", file, "--solution-out", sol_path});
  REQUIRE(code == 0);
  json j = json::parse(out);
  REQUIRE(j.at("converged").get<bool>());
  SdpSolution sol = SdpSolution::deserialize(detail::read_file(sol_path));
  REQUIRE(sol.n() == 3);
  REQUIRE(sol.k() == 2);

  // solution feeds back through check
  auto [ccode, cout_] = run({"check", "--instance", file, "--solution", sol_path});
  REQUIRE(ccode == 0);
  REQUIRE(json::parse(cout_).at("pass").get<bool>());
}

TEST_CASE("separator-stats emits per-vertex and pair rows") {
  TempDir tmp;
  auto inst = testing::path3();
  std::string file = tmp.write("inst.json", inst.serialize());
  SdpSolution emb = embed_integral(inst, Partition{{0, 0, 1}});
  std::string sol = tmp.write("sol.json", emb.serialize());
  auto [code, out] = run({"separator-stats", "--instance", file, "--solution", sol,
                          "--bin", "0", "--samples", "2000", "--seed", "9"});
  REQUIRE(code == 0);
  std::istringstream lines(out);
  std::string line;
  std::getline(lines, line);
  REQUIRE(line == "kind,u,v,norm2_u,dist2,count,rate,bound_lo,bound_hi,ratio");
  int vertex_rows = 0, summary_rows = 0;
  while (std::getline(lines, line)) {
    if (line.rfind("vertex,", 0) == 0) ++vertex_rows;
    if (line.rfind("summary,", 0) == 0) ++summary_rows;
  }
  REQUIRE(vertex_rows == 3);
  REQUIRE(summary_rows == 1);
}

TEST_CASE("externally solved SDPs inject into the pipeline") {
  TempDir tmp;
  auto inst = testing::path3();
  std::string file = tmp.write("inst.json", inst.serialize());
  SdpSolution emb = embed_integral(inst, Partition{{0, 0, 1}});
  std::string sol = tmp.write("sol.json", emb.serialize());
  auto [code, out] = run({"solve", "--instance", file, "--solution", sol,
                          "--mode", "plain", "--seed", "11"});
  REQUIRE(code == 0);
  RunReport rep = RunReport::from_json(json::parse(out));
  // the injected indicator solution has objective exactly 1
  REQUIRE(rep.sdp_value == 1.0);
  REQUIRE(rep.status == "ok");

  // same injection, --format alias for --emit
  auto csv = run({"solve", "--instance", file, "--solution", sol, "--format", "csv",
                  "--seed", "11"});
  REQUIRE(csv.first == 0);
  REQUIRE(csv.second.rfind("digest,mode,status,", 0) == 0);
}

TEST_CASE("check validates partitions at a slack") {
  TempDir tmp;
  std::string file = tmp.write("inst.json", testing::path3().serialize());
  std::string part = tmp.write("part.json", R"({"assign":[0,0,0]})");
  auto strict = run({"check", "--instance", file, "--partition", part});
  REQUIRE(strict.first == 1);
  auto loose = run({"check", "--instance", file, "--partition", part, "--slack", "6"});
  REQUIRE(loose.first == 0);
}

TEST_CASE("bench aggregates a directory and tolerates bad files") {
  TempDir tmp;
  tmp.write("a.json", testing::path3().serialize());
  tmp.write("b.json", testing::random_instance(6, 5, 2, 0.6).serialize());
  tmp.write("broken.json", "{ nope");
  auto [code, out] = run({"bench", "--dir", tmp.path.string(), "--runs", "3",
                          "--seeds", "1", "--mode", "plain"});
  REQUIRE(code == 0);
  std::istringstream lines(out);
  std::string header;
  std::getline(lines, header);
  REQUIRE(header.rfind("instance,digest,n,k,mode,", 0) == 0);
  int rows = 0, unreadable = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    if (line.find("unreadable") != std::string::npos) ++unreadable;
  }
  REQUIRE(rows == 3);
  REQUIRE(unreadable == 1);
}

TEST_CASE("bench on an empty directory emits only the header") {
  TempDir tmp;
  fs::create_directories(tmp.path / "empty");
  auto [code, out] = run({"bench", "--dir", (tmp.path / "empty").string()});
  REQUIRE(code == 0);
  std::istringstream lines(out);
  std::string header, rest;
  std::getline(lines, header);
  REQUIRE_FALSE(std::getline(lines, rest));
}

TEST_CASE("edge-list instances load with uniform measures") {
  TempDir tmp;
  std::string file = tmp.write("g.txt", "4 3 2\n0 1 1.0\n1 2 1.0\n2 3 1.0\n");
  auto [code, out] = run({"exact", "--instance", file});
  REQUIRE(code == 0);
  REQUIRE(json::parse(out).at("opt_cut").get<double>() == 1.0);
}

TEST_CASE("input errors exit with code 1") {
  auto [code, out] = run({"solve", "--instance", "/nonexistent/file.json"});
  REQUIRE(code == 1);
  (void)out;
}
