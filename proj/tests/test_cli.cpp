#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = std::string(CLI_PATH) + " " + args;
  if (stdout_file.empty()) {
    cmd += " >/dev/null 2>/dev/null";
  } else {
    cmd += " > " + stdout_file + " 2>/dev/null";
  }
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string fixture(const std::string& name) {
  return std::string(TEST_DATA_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("cli reports a version") {
  CHECK(run_cli("--version") == 0);
}

TEST_CASE("cli rejects unknown flags and missing subcommands") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("evaluate --no-such-flag") == 2);
  CHECK(run_cli("evaluate --ecd " + fixture("n50_kappa2.csv") +
                " --time 1 --grid 0:1:1") == 2);
}

TEST_CASE("cli rejects unreadable and malformed inputs") {
  fs::path dir = fresh_dir("spinweave_cli_bad_input");
  CHECK(run_cli("evaluate --ecd " + (dir / "missing.csv").string() +
                " --time 1") == 2);
  fs::path junk = dir / "junk.csv";
  std::ofstream(junk) << "not an ecd file\n";
  CHECK(run_cli("evaluate --ecd " + junk.string() + " --time 1") == 2);
}

TEST_CASE("evaluate reproduces a designed chain's population") {
  fs::path dir = fresh_dir("spinweave_cli_evaluate");
  fs::path captured = dir / "stdout.txt";
  REQUIRE(run_cli("evaluate --ecd " + fixture("n50_kappa2.csv") + " --time 2N",
                  captured.string()) == 0);
  auto cols = split(slurp(captured), ',');
  REQUIRE(cols.size() == 3);
  CHECK(std::stod(cols[0]) == 100.0);
  CHECK(std::abs(std::stod(cols[1]) - 0.9550) < 5e-4);
  double p = std::stod(cols[1]);
  double f = std::stod(cols[2]);
  CHECK(std::abs(f - (std::sqrt(p) / 3.0 + p / 6.0 + 0.5)) < 1e-12);

  REQUIRE(run_cli("evaluate --ecd " + fixture("n50_kappa2.csv") + " --time 0",
                  captured.string()) == 0);
  cols = split(slurp(captured), ',');
  REQUIRE(cols.size() == 3);
  CHECK(std::stod(cols[1]) < 1e-20);
  CHECK(std::stod(cols[2]) == Catch::Approx(0.5).margin(1e-10));
}

TEST_CASE("evaluate writes a grid file and its manifest replays identically") {
  fs::path dir = fresh_dir("spinweave_cli_eval_grid");
  fs::path out = dir / "scan.csv";
  REQUIRE(run_cli("evaluate --ecd " + fixture("n50_kappa1.csv") +
                  " --grid 0:2N:25 --out " + out.string()) == 0);
  std::string first = slurp(out);
  REQUIRE(split(first, '\n').size() == 5);

  fs::path replay_dir = fresh_dir("spinweave_cli_eval_grid_replay");
  REQUIRE(run_cli("replay " + out.string() + ".manifest.json --out-dir " +
                  replay_dir.string()) == 0);
  CHECK(slurp(replay_dir / "scan.csv") == first);
}

TEST_CASE("design emits one file per cube and replays byte for byte") {
  fs::path dir = fresh_dir("spinweave_cli_design");
  std::string budget =
      " --max-generations 60 --stall-generations 20 --seed 7";
  REQUIRE(run_cli("design --n 6 --time 9 --jmax-end 2" + budget +
                  " --out-dir " + dir.string()) == 0);
  std::vector<std::string> artifacts{
      "ecd_N6_d1_T9_k1.csv", "ecd_N6_d1_T9_k2.csv", "ecd_N6_d1_T9_k3.csv",
      "manifest_ecd_N6_d1_T9.json"};
  for (const auto& name : artifacts) {
    CAPTURE(name);
    REQUIRE(fs::exists(dir / name));
  }

  fs::path replay_dir = fresh_dir("spinweave_cli_design_replay");
  REQUIRE(run_cli("replay " + (dir / artifacts[3]).string() + " --out-dir " +
                  replay_dir.string()) == 0);
  for (int i = 0; i < 3; ++i) {
    CAPTURE(artifacts[i]);
    REQUIRE(slurp(replay_dir / artifacts[i]) == slurp(dir / artifacts[i]));
  }
}

TEST_CASE("seed falls back to the environment") {
  fs::path flag_dir = fresh_dir("spinweave_cli_seed_flag");
  fs::path env_dir = fresh_dir("spinweave_cli_seed_env");
  std::string base = "design --n 4 --time 6 --jmax-end 1"
                     " --max-generations 40 --stall-generations 15";
  REQUIRE(run_cli(base + " --seed 123 --out-dir " + flag_dir.string()) == 0);
  std::string env_cmd = "SPINWEAVE_SEED=123 " + std::string(CLI_PATH) + " " +
                        base + " --out-dir " + env_dir.string() +
                        " >/dev/null 2>/dev/null";
  int rc = std::system(env_cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WEXITSTATUS(rc) == 0);
  CHECK(slurp(env_dir / "ecd_N4_d1_T6_k1.csv") ==
        slurp(flag_dir / "ecd_N4_d1_T6_k1.csv"));
}

TEST_CASE("design reports an unreachable target") {
  fs::path dir = fresh_dir("spinweave_cli_design_target");
  CHECK(run_cli("design --n 8 --time 1 --jmax-start 0.5 --jmax-end 0.5"
                " --target 0.999 --max-generations 30 --stall-generations 10"
                " --out-dir " +
                dir.string()) == 4);
}

TEST_CASE("clean disorder matches the evaluated population") {
  fs::path dir = fresh_dir("spinweave_cli_disorder");
  fs::path scan = dir / "scan.csv";
  REQUIRE(run_cli("disorder --ecd " + fixture("n50_kappa2.csv") +
                  " --amplitudes 0 --nr 50 --seed 5 --out " + scan.string()) ==
          0);
  auto lines = split(slurp(scan), '\n');
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "# seed=5 n_r=50 law=uniform");
  auto row = split(lines[1], ',');
  REQUIRE(row.size() == 4);
  CHECK(row[0] == "0");
  CHECK(row[3] == "0");
  CHECK(row[1] == row[2]);

  fs::path captured = dir / "stdout.txt";
  REQUIRE(run_cli("evaluate --ecd " + fixture("n50_kappa2.csv") + " --time 100",
                  captured.string()) == 0);
  CHECK(row[1] == split(slurp(captured), ',')[1]);

  fs::path replay_dir = fresh_dir("spinweave_cli_disorder_replay");
  REQUIRE(run_cli("replay " + scan.string() + ".manifest.json --out-dir " +
                  replay_dir.string()) == 0);
  CHECK(slurp(replay_dir / "scan.csv") == slurp(scan));
}

TEST_CASE("multiple files produce grid rows") {
  fs::path dir = fresh_dir("spinweave_cli_disorder_grid");
  fs::path grid = dir / "grid.csv";
  REQUIRE(run_cli("disorder --ecd " + fixture("n50_kappa1.csv") + " --ecd " +
                  fixture("n50_kappa2.csv") +
                  " --amplitudes 0,0.02 --nr 20 --seed 9 --time 100 --out " +
                  grid.string()) == 0);
  auto lines = split(slurp(grid), '\n');
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "# seed=9 n_r=20 law=uniform");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(split(lines[i], ',').size() == 5);
  }
}

TEST_CASE("jmin finds an easy target and flags an impossible one") {
  fs::path dir = fresh_dir("spinweave_cli_jmin");
  fs::path found = dir / "found.csv";
  REQUIRE(run_cli("jmin --n 4 --time 10 --target 0.9 --jmax-end 3 --seed 2"
                  " --out " + found.string()) == 0);
  auto row = split(split(slurp(found), '\n')[0], ',');
  REQUIRE(row.size() == 4);
  CHECK(row[0] == "4");
  CHECK(std::stod(row[1]) == 10.0);
  CHECK(std::stod(row[3]) >= 0.9);

  fs::path missed = dir / "missed.csv";
  CHECK(run_cli("jmin --n 8 --time 2 --target 0.999 --jmax-end 0.5 --seed 2"
                " --max-generations 40 --stall-generations 15 --out " +
                missed.string()) == 4);
  CHECK(slurp(missed).rfind("# target unreached", 0) == 0);
}

TEST_CASE("fit recovers planted decay parameters") {
  fs::path dir = fresh_dir("spinweave_cli_fit");
  fs::path input = dir / "jmin.csv";
  {
    std::ofstream rows(input);
    rows << std::setprecision(17);
    for (double t : {5.0, 10.0, 15.0, 20.0, 30.0, 40.0}) {
      rows << t << "," << 1.5 + 4.0 * std::exp(-2.0 * t / 10.0) << "\n";
    }
  }
  fs::path out = dir / "fit.json";
  REQUIRE(run_cli("fit --input " + input.string() + " --n 10 --out " +
                  out.string()) == 0);
  auto j = nlohmann::json::parse(slurp(out));
  CHECK(std::abs(j.at("A").get<double>() - 1.5) < 1e-5);
  CHECK(std::abs(j.at("B").get<double>() - 4.0) < 1e-5);
  CHECK(std::abs(j.at("C").get<double>() - 2.0) < 1e-5);
  CHECK(j.at("rms").get<double>() < 1e-6);

  CHECK(run_cli("fit --input " + input.string() + " --out " +
                (dir / "nofit.json").string()) == 2);
}

TEST_CASE("peaks lands on the nominal arrival time") {
  fs::path dir = fresh_dir("spinweave_cli_peaks");
  fs::path out = dir / "peaks.csv";
  REQUIRE(run_cli("peaks --ecd " + fixture("n50_kappa1.csv") +
                  " --max-peaks 1 --out " + out.string()) == 0);
  auto row = split(split(slurp(out), '\n')[0], ',');
  REQUIRE(row.size() == 2);
  CHECK(std::abs(std::stod(row[0]) - 1.0) < 0.02);
  CHECK(std::stod(row[1]) > 0.9);
}

TEST_CASE("divergence of a distribution with itself is zero") {
  fs::path dir = fresh_dir("spinweave_cli_divergence");
  fs::path out = dir / "div.csv";
  REQUIRE(run_cli("divergence --ecd " + fixture("n50_kappa3.csv") + " --ecd " +
                  fixture("n50_kappa3.csv") + " --out " + out.string()) == 0);
  CHECK(slurp(out) == "0\n");

  fs::path out2 = dir / "div2.csv";
  REQUIRE(run_cli("divergence --ecd " + fixture("n50_kappa3.csv") + " --ecd " +
                  fixture("n50_kappa4.csv") + " --site 25 --out " +
                  out2.string()) == 0);
  CHECK(std::stod(split(slurp(out2), '\n')[0]) > 0.0);
}
