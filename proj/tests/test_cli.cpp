#include "lyapcert/serialize.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// The test binary receives the CLI location and the shared data directory
// from the build system.
#ifndef LYAPCERT_CLI_PATH
#error "LYAPCERT_CLI_PATH must be defined"
#endif
#ifndef LYAPCERT_DATA_DIR
#error "LYAPCERT_DATA_DIR must be defined"
#endif

namespace {

namespace fs = std::filesystem;

struct CliRun {
  int exit_code = -1;
  std::string output; // stdout and stderr combined
};

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "lyapcert_cli_tests";
  fs::create_directories(dir);
  return dir;
}

CliRun run_cli(const std::string& args) {
  const fs::path out = work_dir() / "last_output.txt";
  const std::string cmd = std::string(LYAPCERT_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out);
  std::stringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  return r;
}

std::string data_file(const std::string& name) {
  return (fs::path(LYAPCERT_DATA_DIR) / name).string();
}

std::string write_temp(const std::string& name, const std::string& content) {
  const fs::path p = work_dir() / name;
  std::ofstream out(p);
  out << content;
  return p.string();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("compute emits a certified interval for the stable diagonal pair") {
  const auto r = run_cli("compute " + data_file("two_diag_stable.json") +
                         " --width 0.05 --n-grid 8");
  REQUIRE(r.exit_code == 0);
  const auto doc = lyapcert::json::parse(r.output);
  const double lo = doc["lo"].get<double>();
  const double hi = doc["hi"].get<double>();
  CHECK(lo <= -1.0 / 3.0 + 1e-9);
  CHECK(hi >= -1.0 / 3.0 - 1e-9);
  CHECK(hi - lo <= 0.05 + 1e-9);
  CHECK(doc["converged"].get<bool>());
}

TEST_CASE("check-stability labels the reference systems correctly") {
  const auto stable = run_cli("check-stability " + data_file("two_diag_stable.json") +
                              " --width 0.1 --n-grid 8");
  REQUIRE(stable.exit_code == 0);
  CHECK(stable.output.find("STABLE") != std::string::npos);

  const auto unstable = run_cli("check-stability " + data_file("cross_coupled_win2.json") +
                                " --width 0.1 --n-grid 8");
  REQUIRE(unstable.exit_code == 0);
  CHECK(unstable.output.find("UNSTABLE") != std::string::npos);
}

TEST_CASE("malformed input exits with the input-error code") {
  const std::string bad = write_temp("broken.json", "{ not json");
  CHECK(run_cli("compute " + bad).exit_code == 2);

  const std::string empty_modes =
      write_temp("empty_modes.json",
                 R"({"modes": [], "lower": [], "upper": []})");
  CHECK(run_cli("compute " + empty_modes).exit_code == 2);

  CHECK(run_cli("compute " + data_file("no_such_file.json")).exit_code == 2);
}

TEST_CASE("unbounded windows exit with the dedicated code and advice") {
  const std::string unbounded = write_temp(
      "unbounded.json",
      R"({"modes": [[1,0,0,-3],[-3,0,0,1]], "lower": [1,1], "upper": [2,"inf"]})");
  const auto r = run_cli("compute " + unbounded);
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("cut-tail") != std::string::npos);
}

TEST_CASE("export writes one angle-sorted CSV per space") {
  const fs::path report = work_dir() / "report.json";
  const auto computed = run_cli("compute " + data_file("two_diag_stable.json") +
                                " --width 0.1 --n-grid 6 -o " + report.string());
  REQUIRE(computed.exit_code == 0);

  const fs::path prefix = work_dir() / "poly";
  const auto exported = run_cli("export --report " + report.string() +
                                " --format csv -o " + prefix.string());
  REQUIRE(exported.exit_code == 0);

  const auto doc = lyapcert::json::parse(lyapcert::read_text_file(report.string()));
  REQUIRE(doc.contains("certificate"));
  const auto counts = doc["certificate"]["vertex_counts"];
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const std::string csv_path =
        prefix.string() + "_space" + std::to_string(j + 1) + ".csv";
    REQUIRE(fs::exists(csv_path));
    const std::string csv = lyapcert::read_text_file(csv_path);
    CHECK(csv.rfind("x,y\n", 0) == 0);
    const long rows = std::count(csv.begin(), csv.end(), '\n') - 1;
    CHECK(rows == counts[j].get<long>());
  }
}

TEST_CASE("export round-trips polytopes losslessly as JSON") {
  const fs::path report = work_dir() / "report_json_rt.json";
  REQUIRE(run_cli("compute " + data_file("two_diag_stable.json") +
                  " --width 0.1 --n-grid 6 -o " + report.string())
              .exit_code == 0);
  const fs::path prefix = work_dir() / "poly_rt";
  REQUIRE(run_cli("export --report " + report.string() + " --format json -o " +
                  prefix.string())
              .exit_code == 0);

  const auto original = lyapcert::polytopes_from_report_json(
      lyapcert::json::parse(lyapcert::read_text_file(report.string()))["certificate"]);
  for (std::size_t j = 0; j < original.spaces.size(); ++j) {
    const std::string path =
        prefix.string() + "_space" + std::to_string(j + 1) + ".json";
    REQUIRE(fs::exists(path));
    const auto doc = lyapcert::json::parse(lyapcert::read_text_file(path));
    REQUIRE(doc["vertices"].size() == original.spaces[j].vertices.size());
    for (std::size_t i = 0; i < original.spaces[j].vertices.size(); ++i) {
      const auto& v = original.spaces[j].vertices[i];
      for (Eigen::Index k = 0; k < v.size(); ++k) {
        CHECK(doc["vertices"][i][static_cast<std::size_t>(k)].get<double>() ==
              v(k));
      }
    }
  }
}

TEST_CASE("export without stored polytopes exits with the artifact code") {
  const std::string hollow = write_temp("hollow_report.json", R"({"lo": -1.0})");
  CHECK(run_cli("export --report " + hollow + " --format csv -o " +
                (work_dir() / "none").string())
            .exit_code == 4);
  CHECK(run_cli("export --report " + data_file("no_such_report.json") +
                " --format csv -o " + (work_dir() / "none").string())
            .exit_code == 4);
}

TEST_CASE("cut-tail prints closed-form thresholds and simplifies windows") {
  const std::string sys = write_temp(
      "cuttail_sys.json",
      R"({"modes": [[-1,0,0,-2],[0.1,0,0,0.2]], "lower": [1,1], "upper": [5,5]})");
  const auto table = run_cli("cut-tail " + sys);
  REQUIRE(table.exit_code == 0);
  CHECK(table.output.find("0.8813735") != std::string::npos);
  CHECK(table.output.find("mode 2") != std::string::npos);

  const auto reduced = run_cli("cut-tail " + sys + " --simplify reduce");
  REQUIRE(reduced.exit_code == 0);
  const auto doc = lyapcert::json::parse(reduced.output);
  CHECK(doc["system"]["upper"][0].get<double>() ==
        doctest::Approx(1.8813735870).epsilon(1e-6));
  CHECK(doc["log"][1]["action"] == "skipped-unstable");
}

TEST_CASE("the oracle subcommand reports the scalar alternation bound") {
  const std::string sys = write_temp(
      "scalar_pair.json",
      R"({"modes": [[1],[-3]], "lower": [1,1], "upper": [2,2]})");
  const auto r = run_cli("oracle " + sys + " --max-legs 2 --grid-points 3");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("lower bound") != std::string::npos);
  CHECK(r.output.find("-0.333333") != std::string::npos);
}

TEST_CASE("simulate emits an exact-endpoint CSV trajectory") {
  const std::string law = write_temp("alt_law.json", R"([[1, 1.0], [2, 2.0]])");
  const auto r = run_cli("simulate " + data_file("two_diag_stable.json") + " --law " +
                         law + " --x0 1,1 --step 0.5");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.rfind("t,x1,x2\n", 0) == 0);
  // Last row is the closed-form endpoint (e^{-5}, e^{-1}).
  const auto last_newline = r.output.find_last_of('\n', r.output.size() - 2);
  std::istringstream row(r.output.substr(last_newline + 1));
  std::string t_str, x1_str, x2_str;
  std::getline(row, t_str, ',');
  std::getline(row, x1_str, ',');
  std::getline(row, x2_str, ',');
  CHECK(std::stod(t_str) == doctest::Approx(3.0));
  CHECK(std::stod(x1_str) == doctest::Approx(std::exp(-5.0)).epsilon(1e-9));
  CHECK(std::stod(x2_str) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("simulate rejects inadmissible schedules") {
  const std::string law = write_temp("bad_law.json", R"([[1, 0.2], [2, 2.0]])");
  const auto r = run_cli("simulate " + data_file("two_diag_stable.json") + " --law " +
                         law + " --x0 1,1 --step 0.5");
  CHECK(r.exit_code == 2);
}

TEST_CASE("repeated runs produce byte-identical artifacts") {
  const fs::path a = work_dir() / "det_a.json";
  const fs::path b = work_dir() / "det_b.json";
  REQUIRE(run_cli("compute " + data_file("two_diag_stable.json") +
                  " --width 0.1 --n-grid 6 -o " + a.string())
              .exit_code == 0);
  REQUIRE(run_cli("compute " + data_file("two_diag_stable.json") +
                  " --width 0.1 --n-grid 6 -o " + b.string())
              .exit_code == 0);
  CHECK(lyapcert::read_text_file(a.string()) ==
        lyapcert::read_text_file(b.string()));
}

TEST_CASE("usage errors do not masquerade as internal failures") {
  CHECK(run_cli("").exit_code != 0);
  CHECK(run_cli("no-such-command").exit_code != 0);
  CHECK(run_cli("--version").exit_code == 0);
  CHECK(run_cli("--version").output.find("lyapcert") != std::string::npos);
}

} // TEST_SUITE
