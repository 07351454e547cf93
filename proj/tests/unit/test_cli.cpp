#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "cli/config.hpp"
#include "cli/csv.hpp"
#include "cli/run.hpp"
#include "doctest.h"
#include "sipdyn/errors.hpp"

using namespace sipdyn;
using namespace sipdyn::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(SIPDYN_SOURCE_DIR) / "configs";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("sipdyn_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sip-dyn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  std::ofstream(dir / name, std::ios::binary) << text;
  return dir / name;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

Json summary(const fs::path& dir) { return Json::parse(slurp(dir / "summary.json")); }

}  // namespace

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(2.0) == "2");
  CHECK(format_number(-0.25) == "-0.25");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_short(0.1) == "0.1");
  CsvWriter w({"a", "b"});
  w.cell(1.0).cell("x");
  w.end_row();
  CHECK(w.text() == "a,b\n1,x\n");
}

TEST_CASE("config defaults and resolution") {
  const Json doc = Json::parse(R"({"schema": "sip-dyn/config/v1", "parameters": {"r": 0.8}})");
  const RunConfig c = parse_config(doc, Command::sweep);
  CHECK(c.params.r == 0.8);
  CHECK(c.params.a0 == 3.0);
  const auto& s = std::get<SweepConfig>(c.options);
  CHECK(s.parameter == ParamId::L);
  const Json resolved = to_json(c);
  CHECK(resolved["command"] == "sweep");
  CHECK(resolved["parameters"].size() == 11);
  const RunConfig again = parse_config(resolved, Command::sweep);
  CHECK(again.params == c.params);
  CHECK(to_json(again) == resolved);
}

TEST_CASE("config validation") {
  auto bad = [](const char* text, Command cmd = Command::simulate) {
    CHECK_THROWS_AS(parse_config(Json::parse(text), cmd), ValidationError);
  };
  bad(R"({"parameters": {}})");
  bad(R"({"schema": "sip-dyn/config/v2"})");
  bad(R"({"schema": "sip-dyn/config/v1", "parameters": {"r": 1.5}})");
  bad(R"({"schema": "sip-dyn/config/v1", "parameters": {"zeta": 1}})");
  bad(R"({"schema": "sip-dyn/config/v1", "parameters": {"a0": "three"}})");
  bad(R"({"schema": "sip-dyn/config/v1", "command": "sweep"})");
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"ic": [1, 2]}})");
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"ic": [-1, 2, 3]}})");
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"t_end": -5}})");
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"tend": 5}})");
  bad(R"({"schema": "sip-dyn/config/v1", "extra": 1})");
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"parameter": "q"}})", Command::sweep);
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"range": [1, -1]}})", Command::sweep);
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"n": 2.5}})", Command::sweep);
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"L_range": [-5, 1]}})", Command::scan);
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"kind": "cusp"}})", Command::curve);
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"p1": "L", "p2": "L"}})", Command::curve);
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"S_range": [0, 4]}})", Command::percapita);
  bad(R"({"schema": "sip-dyn/config/v1", "options": {"S_range": [0.1, 5]}})", Command::percapita);
  CHECK_THROWS_AS(parse_command("plot"), ValidationError);
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3, "7") == 3);
  CHECK(resolve_threads(std::nullopt, "7") == 7);
  CHECK(resolve_threads(std::nullopt, nullptr) >= 1);
  CHECK_THROWS_AS(resolve_threads(std::nullopt, "abc"), ValidationError);
  CHECK_THROWS_AS(resolve_threads(std::nullopt, "0"), ValidationError);
  CHECK_THROWS_AS(resolve_threads(0, nullptr), ValidationError);
}

TEST_CASE("invalid config exits 1 and writes nothing") {
  TempDir t("invalid");
  const fs::path cfg = write(t.path / "in", "bad.json", R"({"schema": "sip-dyn/config/v1", "parameters": {"r": 1.5}})");
  const fs::path out = t.path / "out";
  const Run r = run_cli({"simulate", "--config", cfg.string(), "--out", out.string()});
  CHECK(r.code == 1);
  CHECK_FALSE(fs::exists(out));
  CHECK(r.err.find('\n') == r.err.size() - 1);

  const fs::path broken = write(t.path / "in", "broken.json", "{not json");
  CHECK(run_cli({"simulate", "--config", broken.string(), "--out", out.string()}).code == 1);
  CHECK(run_cli({"simulate", "--config", (t.path / "missing.json").string(), "--out", out.string()}).code == 1);
  CHECK(run_cli({"frobnicate", "--config", cfg.string(), "--out", out.string()}).code == 1);
  CHECK(run_cli({"simulate", "--out", out.string()}).code == 1);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("numerical failure exits 2") {
  TempDir t("numerical");
  const fs::path cfg = write(t.path, "c.json", R"({"schema": "sip-dyn/config/v1", "options": {
      "rel_tol": 1e-15, "abs_tol": 1e-16, "min_step": 0.5, "initial_step": 0.5}})");
  const Run r = run_cli({"simulate", "--config", cfg.string(), "--out", (t.path / "out").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("underflow") != std::string::npos);
  CHECK(r.err.find('\n') == r.err.size() - 1);
  CHECK_FALSE(fs::exists(t.path / "out"));
}

TEST_CASE("simulate writes the trajectory and the outcome") {
  TempDir t("simulate");
  const Run r = run_cli({"simulate", "--config", (kConfigs / "fig6a_coexistence.json").string(), "--out",
                     t.path.string()});
  REQUIRE(r.code == 0);
  const std::string traj = slurp(t.path / "trajectory.csv");
  CHECK(first_line(traj) == "t,S,I,P");
  CHECK(traj.find('\r') == std::string::npos);
  const Json s = summary(t.path);
  CHECK(s["command"] == "simulate");
  CHECK(s["results"]["outcome"] == "converged");
  CHECK(s["results"]["kind"] == "E4");
  CHECK(s["version"].is_string());
  CHECK(s["parameters"]["r"] == 0.5);
  CHECK(s["parameters"].size() == 11);
  const auto last = rows(traj).back();
  CHECK(std::stod(last[1]) == doctest::Approx(2.61341).epsilon(1e-3));
}

TEST_CASE("sweep writes branches and events") {
  TempDir t("sweep");
  const Run r = run_cli({"sweep", "--config", (kConfigs / "fig3a_sweep_L.json").string(), "--out",
                     t.path.string(), "--threads", "2"});
  REQUIRE(r.code == 0);
  CHECK(first_line(slurp(t.path / "branches.csv")) == "param,S,I,P,stable,branch_id");
  const Json ev = summary(t.path)["results"]["events"];
  std::map<std::string, double> found;
  for (const auto& e : ev) found[e["label"].get<std::string>()] = e["value"].get<double>();
  REQUIRE(found.count("SN"));
  REQUIRE(found.count("H"));
  REQUIRE(found.count("TC"));
  CHECK(found["SN"] == doctest::Approx(0.2396).epsilon(1e-3));
  CHECK(found["H"] == doctest::Approx(0.2184).epsilon(1e-3));
}

TEST_CASE("percapita reproduces the three growth curves") {
  TempDir t("percapita");
  const fs::path cfg = write(t.path / "in", "c.json", R"({"schema": "sip-dyn/config/v1",
      "parameters": {"a0": 3, "K": 4, "L": 0.7},
      "options": {"I_values": [0, 0.5, 2], "S_range": [0.1, 4], "n": 40}})");
  REQUIRE(run_cli({"percapita", "--config", cfg.string(), "--out", (t.path / "out").string()}).code == 0);
  const auto table = rows(slurp(t.path / "out" / "percapita.csv"));
  REQUIRE(table.size() == 41);
  CHECK(table[0] == std::vector<std::string>{"S", "I=0", "I=0.5", "I=2"});
  // S = 0.1 + 0.1 k, so row k + 1 holds S = 0.1 (k + 1)
  auto at = [&](int row, int col) { return std::stod(table[row][col]); };
  CHECK(at(7, 0) == doctest::Approx(0.7));
  CHECK(std::abs(at(7, 1)) < 1e-12);
  CHECK(std::abs(at(7, 3)) < 1e-12);
  CHECK(std::abs(at(40, 1)) < 1e-12);
  CHECK(at(20, 0) == doctest::Approx(2.0));
  CHECK(std::abs(at(20, 3)) < 1e-12);
  CHECK(at(20, 2) == doctest::Approx(1.4625));
}

TEST_CASE("summary fed back as config reproduces identical files") {
  TempDir t("roundtrip");
  const fs::path cfg = write(t.path / "in", "scan.json", R"({"schema": "sip-dyn/config/v1",
      "options": {"nL": 9, "nr": 7}})");
  const fs::path a = t.path / "a", b = t.path / "b";
  REQUIRE(run_cli({"scan", "--config", cfg.string(), "--out", a.string(), "--threads", "4"}).code == 0);
  REQUIRE(run_cli({"scan", "--config", (a / "summary.json").string(), "--out", b.string(), "--threads", "1"}).code == 0);
  CHECK(slurp(a / "regions.csv") == slurp(b / "regions.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
  CHECK(first_line(slurp(a / "regions.csv")) == "L,r,label");

  const fs::path c = t.path / "c";
  const fs::path resolved = write(t.path / "in", "resolved.json", summary(a)["config"].dump());
  REQUIRE(run_cli({"scan", "--config", resolved.string(), "--out", c.string()}).code == 0);
  CHECK(slurp(a / "regions.csv") == slurp(c / "regions.csv"));
}

TEST_CASE("every shipped config runs") {
  TempDir t("shipped");
  int n = 0;
  for (const auto& entry : fs::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".json") continue;
    const Json doc = Json::parse(slurp(entry.path()));
    const std::string cmd = doc["command"];
    const fs::path out = t.path / entry.path().stem();
    const Run r = run_cli({cmd, "--config", entry.path().string(), "--out", out.string(), "--threads", "4"});
    CHECK_MESSAGE(r.code == 0, entry.path().filename().string(), ": ", r.err);
    CHECK(fs::exists(out / "summary.json"));
    for (const auto& f : summary(out)["files"]) {
      const std::string text = slurp(out / f.get<std::string>());
      CHECK(!text.empty());
      CHECK(text.back() == '\n');
    }
    ++n;
  }
  CHECK(n >= 10);
}
