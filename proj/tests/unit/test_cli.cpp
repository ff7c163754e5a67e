#include <doctest.h>

#include "cli.hpp"
#include "solenoid/plan.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using solenoid::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "solenoid_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> column(const std::string& table, std::size_t col) {
  std::vector<std::string> v;
  std::istringstream lines(table);
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string cell;
    for (std::size_t c = 0; c <= col; ++c) cells >> cell;
    v.push_back(cell);
  }
  return v;
}

}  // namespace

TEST_CASE("cli plan table and plan file") {
  fs::path plan = scratch("e5.json");
  Result r = call({"example5", "--out", plan.string()});
  REQUIRE(r.code == 0);
  CHECK(column(r.out, 3) == std::vector<std::string>{"1", "1/8", "1/96", "1/1536"});
  auto p = solenoid::SolenoidPlan::from_json(nlohmann::json::parse(read_file(plan)));
  CHECK(p.depth() == 3);

  fs::path cfg = scratch("zero.json");
  write_file(cfg, R"({"mode": "auto", "levels": 0})");
  r = call({"--config", cfg.string(), "plan", "--out", scratch("zero.plan").string()});
  REQUIRE(r.code == 0);
  CHECK(column(r.out, 0) == std::vector<std::string>{"0"});

  // global flags may also follow the subcommand
  r = call({"plan", "--config", cfg.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"format\": \"solenoid-plan\"") != std::string::npos);
}

TEST_CASE("cli usage and config errors exit 2") {
  fs::path bad = scratch("violating.json");
  write_file(bad, R"({"mode": "explicit", "k": 1, "q": 2, "r": 2, "delta": "1/2", "alphas": [[["1/2"]], [["1/3"]]]})");
  Result r = call({"--config", bad.string(), "plan"});
  CHECK(r.code == 2);
  CHECK(r.err.find("violates") != std::string::npos);

  CHECK(call({}).code == 2);
  CHECK(call({"frobnicate"}).code == 2);
  CHECK(call({"--plan", scratch("missing.json").string(), "certify"}).code == 2);
  fs::path junk = scratch("junk.json");
  write_file(junk, "{ not json");
  CHECK(call({"--config", junk.string(), "plan"}).code == 2);
  CHECK(call({"--help"}).code == 0);
}

TEST_CASE("cli certify exit codes") {
  fs::path plan = scratch("e5c.json");
  REQUIRE(call({"example5", "--out", plan.string()}).code == 0);
  fs::path report = scratch("report.json");
  Result r = call({"--plan", plan.string(), "--seed", "5", "--jobs", "4", "certify", "-r", "1", "--out", report.string()});
  CHECK(r.code == 0);
  auto rep = nlohmann::json::parse(read_file(report));
  CHECK(rep["passed"] == true);
  CHECK(rep["seed"] == 5);

  r = call({"--plan", plan.string(), "certify", "-r", "2"});
  CHECK(r.code == 2);
  CHECK(r.err.find("budget not enforced for requested order") != std::string::npos);

  auto j = nlohmann::json::parse(read_file(plan));
  j["geometry"][2]["epsilon"] = "1/48";
  fs::path tampered = scratch("tampered.json");
  write_file(tampered, j.dump());
  r = call({"--plan", tampered.string(), "certify", "--out", scratch("bad_report.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("FAIL nesting") != std::string::npos);
}

TEST_CASE("cli orbit, export-tree and classify") {
  fs::path plan = scratch("e5o.json");
  REQUIRE(call({"example5", "--ns", "2,3", "--out", plan.string()}).code == 0);

  Result r = call({"--plan", plan.string(), "orbit", "--point", "0.1,0.2", "--radius", "1"});
  REQUIRE(r.code == 0);
  CHECK(column("x\n" + r.out, 0).size() == 1 + 2);  // header and two distinct points
  CHECK(call({"--plan", plan.string(), "orbit", "--point", "2,0"}).code == 2);

  r = call({"--plan", plan.string(), "export-tree", "--level", "2", "--cantor"});
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(r.out).size() == 6);
  r = call({"--plan", plan.string(), "export-tree", "--level", "2"});
  CHECK(r.code == 0);

  fs::path a = scratch("deg_a.json"), b = scratch("deg_b.json"), c = scratch("deg_c.json");
  write_file(a, R"({"prefix": [2, 3], "tail": [6]})");
  write_file(b, R"({"prefix": [], "tail": [6]})");
  write_file(c, R"({"prefix": [], "tail": [2]})");
  r = call({"classify", a.string(), b.string()});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("equivalent\n", 0) == 0);
  r = call({"classify", a.string(), c.string()});
  CHECK(r.out.rfind("inequivalent\n", 0) == 0);
  r = call({"classify", plan.string()});
  CHECK(r.out == "invariant: 2^1 * 3^1\n");
}
