#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "spreach/cli.hpp"
#include "spreach/config.hpp"
#include "spreach/field_io.hpp"
#include "test_helpers.hpp"

using namespace spreach;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("spreach_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_temp(const std::string& tag, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("spreach_cfg_" + tag + ".json");
  std::ofstream out(p);
  out << text;
  return p;
}

const char* kCircuitConfig = R"({
  "system": {"kind": "genetic_circuit", "alpha": 1.0},
  "grid": {
    "z": {"min": [0.0], "max": [1.0], "nodes": [51]},
    "y": {"min": [0.0], "max": [1.0], "nodes": [51]}
  },
  "payoff": {"lower": [0.25], "upper": [0.75], "slope": 10.0, "cap": 3.0},
  "solve": {"t_final": -0.2, "eta": 0.1, "eps": [1.0]},
  "verify": {"n_samples": 200, "seed": 5},
  "output": {"directory": "PLACEHOLDER"}
})";

std::string circuit_config(const fs::path& out_dir) {
  std::string text = kCircuitConfig;
  const std::string key = "PLACEHOLDER";
  text.replace(text.find(key), key.size(), out_dir.string());
  return text;
}

}  // namespace

TEST_CASE("config parsing is strict about unknown keys") {
  CHECK_THROWS_WITH(parse_config_text(R"({"sytem": {}})"),
                    Catch::Matchers::ContainsSubstring("sytem"));
  CHECK_THROWS_WITH(parse_config_text(R"({"system": {"kind": "mrn", "nodes": 3}})"),
                    Catch::Matchers::ContainsSubstring("nodes"));
  CHECK_THROWS_WITH(parse_config_text(R"({"solve": {"tfinal": -1}})"),
                    Catch::Matchers::ContainsSubstring("tfinal"));
  CHECK_THROWS_WITH(parse_config_text(R"({"output": {"formats": ["csv", "pdf"]}})"),
                    Catch::Matchers::ContainsSubstring("pdf"));
}

TEST_CASE("config scalar ranges are validated") {
  CHECK_THROWS_WITH(parse_config_text(R"({"solve": {"eta": 0.0}})"),
                    Catch::Matchers::ContainsSubstring("eta"));
  CHECK_THROWS_WITH(parse_config_text(R"({"solve": {"t_final": 0.5}})"),
                    Catch::Matchers::ContainsSubstring("t_final"));
  CHECK_THROWS_WITH(parse_config_text(R"({"solve": {"cfl": 1.5}})"),
                    Catch::Matchers::ContainsSubstring("cfl"));
  CHECK_THROWS_WITH(parse_config_text(R"({"system": {"kind": "genetic_circuit", "alpha": -1}})"),
                    Catch::Matchers::ContainsSubstring("alpha"));
  CHECK_THROWS_WITH(parse_config_text(R"({"grid": {"z": {"min": [0], "max": [1], "nodes": [2]}}})"),
                    Catch::Matchers::ContainsSubstring("nodes"));
}

TEST_CASE("malformed json reports a parse error") {
  CHECK_THROWS_AS(parse_config_text("{"), Error);
  try {
    parse_config_text("{\"system\": }");
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == errc::config);
  }
}

TEST_CASE("mrn config with explicit edges builds the stated matrices") {
  const auto rc = parse_config_text(R"({
    "system": {"kind": "mrn", "n": 2, "edges": [
      {"from": 0, "to": 1, "weight": 1.0},
      {"from": 1, "to": 2, "weight": 1.0}
    ]}
  })");
  const auto built = build_system(rc.system);
  REQUIRE(built.sp.has_value());
  CHECK(built.sp->n_y == 2);
  // chain: F1 = u1 - z1^2/(z1+1)
  const Eigen::VectorXd z = (Eigen::VectorXd(3) << 0.5, 0.1, 0.1).finished();
  const Eigen::VectorXd u = (Eigen::VectorXd(2) << 0.8, 0.0).finished();
  const double f1 = built.reduced.F(z, u, spreach::testing::vec1(1.0))[0];
  CHECK(f1 == Catch::Approx(0.8 - 0.25 / 1.5).margin(1e-12));
}

TEST_CASE("built-in custom system is registered") {
  register_builtin_customs();
  SystemConfig sc;
  sc.kind = "custom";
  sc.custom_name = "single_integrator";
  const auto built = build_system(sc);
  CHECK_FALSE(built.sp.has_value());
  CHECK(built.reduced.n_z == 1);
  CHECK_THROWS_AS(build_system([] {
                    SystemConfig bad;
                    bad.kind = "custom";
                    bad.custom_name = "no_such_system";
                    return bad;
                  }()),
                  Error);
}

TEST_CASE("cli: malformed config exits 2") {
  const auto cfg = write_temp("bad", R"({"solve": {"eta": -1}})");
  CHECK(run_command({"solve", "--config", cfg.string()}) == 2);
  const auto unknown = write_temp("unknown", R"({"extra_block": 1})");
  CHECK(run_command({"solve", "--config", unknown.string()}) == 2);
  CHECK(run_command({"solve", "--config", "/nonexistent/path.json"}) != 0);
}

TEST_CASE("cli: solve at t = 0 writes the payoff field") {
  const auto out = temp_dir("solve_t0");
  const auto cfg = write_temp("solve_t0", circuit_config(out));
  const int code = run_command({"solve", "--config", cfg.string(), "--t", "0"});
  REQUIRE(code == 0);
  REQUIRE(fs::exists(out / "vbar.csv"));
  const auto field = field_from_csv(read_file(out / "vbar.csv"));
  const auto ell = build_payoff_box(spreach::testing::vec1(0.25),
                                    spreach::testing::vec1(0.75), 10.0, 3.0);
  for (long i = 0; i < field.grid.size(); ++i)
    CHECK(field.values[i] == ell(field.grid.point(i)));
  REQUIRE(fs::exists(out / "manifest.json"));
}

TEST_CASE("cli: verify reports the hand-computed certificate") {
  const auto out = temp_dir("verify");
  const auto cfg = write_temp("verify", circuit_config(out));
  REQUIRE(run_command({"verify", "--config", cfg.string()}) == 0);
  const auto rep = nlohmann::json::parse(read_file(out / "verify_report.json"));
  CHECK(rep["all_pass"].get<bool>());
  CHECK(rep["stability"]["nu"].get<double>() == Catch::Approx(1.0).margin(1e-12));
  CHECK(rep["stability"]["kappa"].get<double>() == Catch::Approx(0.5).margin(1e-12));
  CHECK(rep["stability"]["alpha"].get<double>() == Catch::Approx(1.0).margin(1e-12));
  CHECK(rep["isaacs"]["max_gap"].get<double>() <= 1e-9);
  CHECK(rep["decay"]["pass"].get<bool>());
}

TEST_CASE("cli: bounds --expect-pass exits 4 when containment fails") {
  const auto out = temp_dir("bounds_fail");
  const auto cfg = write_temp("bounds_fail", circuit_config(out));
  // eps = 1 on a short horizon still violates containment on a coarse grid
  const int code =
      run_command({"bounds", "--config", cfg.string(), "--expect-pass", "--eps", "1.0"});
  CHECK(code == 4);
  REQUIRE(fs::exists(out / "bounds_report.json"));
  const auto rep = nlohmann::json::parse(read_file(out / "bounds_report.json"));
  CHECK(rep["eps_results"][0]["verdict"].get<std::string>() == "fail");
}

TEST_CASE("cli: identical runs produce byte-identical manifests and artifacts") {
  const auto out_a = temp_dir("det_a");
  const auto out_b = temp_dir("det_b");
  const auto cfg_a = write_temp("det_a", circuit_config(out_a));
  const auto cfg_b = write_temp("det_b", circuit_config(out_b));
  REQUIRE(run_command({"solve", "--config", cfg_a.string(), "--seed", "9"}) == 0);
  REQUIRE(run_command({"solve", "--config", cfg_b.string(), "--seed", "9"}) == 0);
  // artifact bytes must agree pairwise (manifests differ only via the
  // config fingerprint, which covers the output directory)
  for (const auto& entry : fs::directory_iterator(out_a)) {
    if (entry.path().filename() == "manifest.json") continue;
    const auto other = out_b / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(read_file(entry.path()) == read_file(other));
  }
  const auto man_a = nlohmann::json::parse(read_file(out_a / "manifest.json"));
  const auto man_b = nlohmann::json::parse(read_file(out_b / "manifest.json"));
  CHECK(man_a["artifacts"] == man_b["artifacts"]);
}

TEST_CASE("cli: solve exports the requested snapshot series") {
  const auto out = temp_dir("snapshots");
  std::string text = circuit_config(out);
  const std::string anchor = "\"eps\": [1.0]";
  text.replace(text.find(anchor), anchor.size(),
               "\"eps\": [1.0], \"snapshot_times\": [0.0, -0.1, -0.2]");
  const auto cfg = write_temp("snapshots", text);
  REQUIRE(run_command({"solve", "--config", cfg.string()}) == 0);
  for (int i : {0, 1, 2}) {
    const auto path = out / ("vbar_snap" + std::to_string(i) + ".csv");
    REQUIRE(fs::exists(path));
  }
  const auto snap1 = field_from_csv(read_file(out / "vbar_snap1.csv"));
  CHECK(snap1.time == Catch::Approx(-0.1).margin(1e-12));
}

TEST_CASE("cli: full-solve writes one field per timescale value") {
  const auto out = temp_dir("fullsolve");
  const auto cfg = write_temp("fullsolve", circuit_config(out));
  REQUIRE(run_command({"full-solve", "--config", cfg.string(), "--t", "-0.05"}) == 0);
  CHECK(fs::exists(out / "veps_1.csv"));
  const auto field = field_from_csv(read_file(out / "veps_1.csv"));
  CHECK(field.grid.dim() == 2);
  CHECK(field.time == -0.05);
}

TEST_CASE("cli: simulate runs the closed-loop experiment") {
  const auto out = temp_dir("simulate");
  std::string text = circuit_config(out);
  const std::string anchor = "\"verify\":";
  text.replace(text.find(anchor), anchor.size(),
               "\"experiment\": {\"initial_states\": [{\"z\": [0.5], \"y\": [0.5]}], "
               "\"n_disturbances\": 3, \"seed\": 2},\n  \"verify\":");
  const auto cfg = write_temp("simulate", text);
  REQUIRE(run_command({"simulate", "--config", cfg.string(), "--eps", "0.05", "--t",
                       "-0.2"}) == 0);
  REQUIRE(fs::exists(out / "experiment_report.json"));
  const auto rep = nlohmann::json::parse(read_file(out / "experiment_report.json"));
  CHECK(rep["states"].size() == 1);
  CHECK(rep["states"][0]["n_runs"].get<long>() == 3);
  CHECK(fs::exists(out / "trajectories/state0_run0.csv"));
}

TEST_CASE("cli: unknown subcommand or flag fails") {
  CHECK(run_command({"frobnicate"}) != 0);
  CHECK(run_command({"solve", "--no-such-flag"}) != 0);
}
