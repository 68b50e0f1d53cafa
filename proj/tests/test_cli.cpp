#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "curesieve/csv_io.hpp"
#include "curesieve/errors.hpp"
#include "curesieve/simulate.hpp"
#include "curesieve/stats.hpp"

using namespace curesieve;
namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* env = std::getenv("CURE_SIEVE_BIN");
  REQUIRE_MESSAGE(env != nullptr, "CURE_SIEVE_BIN must point at the binary");
  return env;
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cure_sieve_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Dataset example_dataset(int n, std::uint64_t seed) {
  const Scenario sc = Scenario::make(HazardId::H1, TruncMode::Light, n);
  Rng rng(seed);
  Dataset d = gen_dataset(sc, rng);
  while (d.count(Status::Exact) == 0) d = gen_dataset(sc, rng);
  return d;
}

}  // namespace

TEST_CASE("csv round-trip preserves the dataset exactly") {
  const Dataset data = example_dataset(120, 301);
  std::ostringstream out;
  write_dataset_csv(out, data, {"age", "arm"});
  std::istringstream in(out.str());
  const CsvDataset back = read_dataset_csv(in, data.tau);
  REQUIRE(back.data.n() == data.n());
  CHECK(back.covariate_names == std::vector<std::string>{"age", "arm"});
  for (int i = 0; i < data.n(); ++i) {
    const Subject& a = data.subjects[i];
    const Subject& b = back.data.subjects[i];
    REQUIRE(a.status == b.status);
    REQUIRE(a.entry == b.entry);
    REQUIRE(a.time1 == b.time1);
    if (a.status == Status::Interval) REQUIRE(a.time2 == b.time2);
    REQUIRE((a.z - b.z).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("csv reader: line-numbered failures") {
  const std::string header = "entry,status,time1,time2,z1\n";
  SUBCASE("bad status token") {
    std::istringstream in(header + "0,exact,1,,0\n0,banana,1,,0\n");
    try {
      read_dataset_csv(in, 4.0);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 3);
      CHECK(std::string(e.what()).find("banana") != std::string::npos);
    }
  }
  SUBCASE("missing interval endpoint") {
    std::istringstream in(header + "0,interval,1,,0\n");
    try {
      read_dataset_csv(in, 4.0);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }
  SUBCASE("unparseable number") {
    std::istringstream in(header + "0,exact,oops,,0\n");
    CHECK_THROWS_AS(read_dataset_csv(in, 4.0), ParseError);
  }
  SUBCASE("subject invariant violated") {
    std::istringstream in(header + "2,exact,1,,0\n");
    try {
      read_dataset_csv(in, 4.0);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }
  SUBCASE("empty input") {
    std::istringstream in("");
    try {
      read_dataset_csv(in, 4.0);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("no records") != std::string::npos);
    }
  }
  SUBCASE("header only") {
    std::istringstream in(header);
    try {
      read_dataset_csv(in, 4.0);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("no records") != std::string::npos);
    }
  }
  SUBCASE("time2 on a right-censored row") {
    std::istringstream in(header + "0,right,1,2,0\n");
    CHECK_THROWS_AS(read_dataset_csv(in, 4.0), ParseError);
  }
}

TEST_CASE("cli fit: outputs, shapes and exit code") {
  const fs::path dir = fresh_dir("fit");
  const Dataset data = example_dataset(200, 302);
  {
    std::ofstream out(dir / "input.csv", std::ios::binary);
    write_dataset_csv(out, data, {"x_norm", "x_bin"});
  }
  const int code = run_cli("fit --input " + (dir / "input.csv").string() +
                           " --tau 4 --seed 3 --functional 1,2.5 " +
                           "--functional 0.5,3 --out-dir " + dir.string());
  CHECK(code == 0);
  const std::string estimates = slurp(dir / "estimates.csv");
  CHECK(count_lines(estimates) == 3);  // header + 2 covariates
  CHECK(estimates.find("covariate,estimate,se,p_value\n") == 0);
  CHECK(estimates.find("x_norm") != std::string::npos);
  const std::string functionals = slurp(dir / "functionals.csv");
  CHECK(count_lines(functionals) == 3);
  CHECK(functionals.find("q,t,estimate,se\n") == 0);
  const std::string hazard = slurp(dir / "hazard.csv");
  CHECK(count_lines(hazard) == 202);  // header + 201 grid points
  const auto j = nlohmann::json::parse(slurp(dir / "fit.json"));
  CHECK(j["converged"].get<bool>());
  CHECK(j.contains("loglik"));
  CHECK(j.contains("knots"));
  CHECK(j.contains("ridge_used"));
}

TEST_CASE("cli fit: input errors exit 1") {
  const fs::path dir = fresh_dir("fit_err");
  {
    std::ofstream out(dir / "empty.csv", std::ios::binary);
  }
  CHECK(run_cli("fit --input " + (dir / "empty.csv").string() + " --tau 4") ==
        1);
  {
    std::ofstream out(dir / "right_only.csv", std::ios::binary);
    out << "entry,status,time1,time2,z1\n";
    out << "0,right,2,,0.3\n0.5,right,3,,-1\n";
  }
  CHECK(run_cli("fit --input " + (dir / "right_only.csv").string() +
                " --tau 4") == 1);
  CHECK(run_cli("fit --input /nonexistent.csv --tau 4") == 1);
  CHECK(run_cli("fit --tau 4") == 1);  // missing required flag
}

TEST_CASE("cli fit: exit 2 on non-convergence, outputs still written") {
  const fs::path dir = fresh_dir("fit_nc");
  const Dataset data = example_dataset(150, 303);
  {
    std::ofstream out(dir / "input.csv", std::ios::binary);
    write_dataset_csv(out, data);
  }
  const int code = run_cli("fit --input " + (dir / "input.csv").string() +
                           " --tau 4 --max-iter 2 --out-dir " + dir.string());
  CHECK(code == 2);
  CHECK(fs::exists(dir / "estimates.csv"));
  CHECK(fs::exists(dir / "hazard.csv"));
  const auto j = nlohmann::json::parse(slurp(dir / "fit.json"));
  CHECK_FALSE(j["converged"].get<bool>());
}

TEST_CASE("cli simulate: usage errors and determinism across thread counts") {
  CHECK(run_cli("simulate --scenario h9 --trunc light --n 10 --reps 2") == 1);
  CHECK(run_cli("simulate --scenario h1 --trunc sideways --n 10 --reps 2") ==
        1);

  const fs::path a = fresh_dir("sim_a");
  const fs::path b = fresh_dir("sim_b");
  const std::string flags =
      "simulate --scenario h3 --trunc light --n 70 --reps 4 --seed 11 ";
  setenv("CURE_SIEVE_THREADS", "1", 1);
  CHECK(run_cli(flags + "--out-dir " + a.string()) == 0);
  setenv("CURE_SIEVE_THREADS", "3", 1);
  CHECK(run_cli(flags + "--out-dir " + b.string()) == 0);
  unsetenv("CURE_SIEVE_THREADS");
  CHECK(slurp(a / "mc_summary.csv") == slurp(b / "mc_summary.csv"));
  CHECK(slurp(a / "hazard_curve.csv") == slurp(b / "hazard_curve.csv"));
  CHECK(count_lines(slurp(a / "mc_summary.csv")) == 6);
  CHECK(slurp(a / "hazard_curve.csv").find("t,true_hazard,mean_fitted_hazard\n") ==
        0);
}

TEST_CASE("cli check: exit codes") {
  CHECK(run_cli("check --rate-draws 150000") == 0);
  CHECK(run_cli("check --rate-draws 1000 --inject-gradient-fault") == 3);
}

TEST_CASE("format_double: shortest round-trip text") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-3.0) == "-3");
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
