#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curesieve/checks.hpp"
#include "curesieve/csv_io.hpp"
#include "curesieve/errors.hpp"
#include "curesieve/inference.hpp"
#include "curesieve/optimizer.hpp"
#include "curesieve/simulate.hpp"

namespace fs = std::filesystem;
using namespace curesieve;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitOracleFailure = 3;

struct FitArgs {
  std::string input;
  double tau = 0.0;
  int order = 3;
  std::vector<std::string> functionals;
  double a0 = 1e-6;
  double b0 = 0.0;  // 0 = data-scaled default
  double c0 = 10.0;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  double level = 0.95;
  int max_iter = 5000;
};

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw Error("cannot write " + (dir / name).string());
  return out;
}

std::pair<double, double> parse_functional(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw Error("--functional expects \"q,t\", got '" + text + "'");
  try {
    const double q = std::stod(text.substr(0, comma));
    const double t = std::stod(text.substr(comma + 1));
    if (q > t) throw Error("--functional requires q <= t in '" + text + "'");
    return {q, t};
  } catch (const std::invalid_argument&) {
    throw Error("--functional expects \"q,t\", got '" + text + "'");
  }
}

int cmd_fit(const FitArgs& args) {
  const CsvDataset input = read_dataset_csv_file(args.input, args.tau);
  if (input.data.count(Status::Exact) == 0) {
    std::cerr << "error: the file contains no exact event rows; the baseline "
                 "hazard is not identifiable without at least one exactly "
                 "observed event time\n";
    return kExitInputError;
  }

  const KnotSequence ks = knots_for_dataset(input.data, args.order);
  const double b0 = args.b0 > 0.0 ? args.b0 : default_b0(input.data);
  const Constraints cs = make_constraints(ks, args.a0, b0, args.c0);
  FitConfig cfg;
  cfg.seed = args.seed;
  cfg.max_iter = args.max_iter;
  const FitResult result = fit(input.data, ks, cs, cfg);
  const ScoreMatrix sm = score_matrix(result, input.data);
  const InfoBlocks blocks = observed_information(sm);
  const auto cis = beta_ci(blocks, result, args.level);

  std::vector<FunctionalRow> functionals;
  for (const auto& text : args.functionals) {
    const auto [q, t] = parse_functional(text);
    const auto [est, se] = cumhaz_increment(result, blocks, q, t);
    functionals.push_back({q, t, est, se});
  }

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  {
    auto out = open_output(dir, "estimates.csv");
    write_estimates_csv(out, input.covariate_names, cis);
  }
  {
    auto out = open_output(dir, "functionals.csv");
    write_functionals_csv(out, functionals);
  }
  {
    std::vector<double> grid, values;
    for (int i = 0; i <= 200; ++i) {
      grid.push_back(args.tau * i / 200.0);
      values.push_back(hazard(result.params, ks, grid.back()));
    }
    auto out = open_output(dir, "hazard.csv");
    write_hazard_csv(out, grid, values);
  }
  {
    nlohmann::json j;
    j["loglik"] = result.loglik;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    j["knots"] = {{"order", ks.order()},
                  {"tau", ks.tau()},
                  {"interior", ks.interior()},
                  {"full", std::vector<double>(
                               ks.full().data(),
                               ks.full().data() + ks.full().size())}};
    j["constraints"] = {{"a0", cs.a0},
                        {"b0", cs.b0},
                        {"c0", cs.c0},
                        {"sum_cap", cs.sum_cap}};
    j["ridge_used"] = blocks.ridge_used;
    auto out = open_output(dir, "fit.json");
    out << j.dump(2) << '\n';
  }

  if (!result.converged) {
    std::cerr << "warning: optimizer did not converge within the iteration "
                 "budget; outputs were still written\n";
    return kExitNonConvergence;
  }
  std::cout << "fit converged: loglik=" << format_double(result.loglik)
            << " iterations=" << result.iterations << '\n';
  return kExitOk;
}

struct SimArgs {
  std::string scenario = "h1";
  std::string trunc = "light";
  int n = 200;
  int reps = 100;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

int cmd_simulate(const SimArgs& args) {
  HazardId id;
  if (args.scenario == "h1")
    id = HazardId::H1;
  else if (args.scenario == "h2")
    id = HazardId::H2;
  else if (args.scenario == "h3")
    id = HazardId::H3;
  else
    throw Error("unknown scenario '" + args.scenario +
                "' (expected h1, h2 or h3)");
  TruncMode mode;
  if (args.trunc == "light")
    mode = TruncMode::Light;
  else if (args.trunc == "heavy")
    mode = TruncMode::Heavy;
  else
    throw Error("unknown truncation mode '" + args.trunc +
                "' (expected light or heavy)");

  const Scenario sc = Scenario::make(id, mode, args.n);
  FitConfig cfg;
  const McSummary summary = run_mc(sc, args.reps, args.seed, cfg);
  std::vector<double> grid;
  for (int i = 0; i <= 39; ++i) grid.push_back(i / 10.0);
  const auto curve = hazard_curve(sc, args.reps, grid, args.seed, cfg);

  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  {
    auto out = open_output(dir, "mc_summary.csv");
    write_mc_summary_csv(out, summary);
  }
  {
    auto out = open_output(dir, "hazard_curve.csv");
    write_hazard_curve_csv(out, curve);
  }

  std::cout << "scenario " << args.scenario << "/" << args.trunc
            << " n=" << args.n << " reps=" << args.reps
            << " converged=" << summary.n_converged << "\n";
  std::cout << std::left << std::setw(26) << "target" << std::right
            << std::setw(10) << "truth" << std::setw(10) << "mean"
            << std::setw(10) << "sd" << std::setw(10) << "mean_se"
            << std::setw(10) << "coverage" << '\n';
  std::cout << std::fixed << std::setprecision(4);
  for (const auto& row : summary.rows)
    std::cout << std::left << std::setw(26) << row.target << std::right
              << std::setw(10) << row.truth << std::setw(10) << row.mean
              << std::setw(10) << row.sd << std::setw(10) << row.mean_se
              << std::setw(10) << row.coverage << '\n';
  return kExitOk;
}

int cmd_check(const CheckOptions& opts) {
  const auto results = run_checks(opts);
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) std::cout << ": " << r.detail;
    std::cout << '\n';
  }
  return all_passed(results) ? kExitOk : kExitOracleFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sieve maximum-likelihood fitting of the bounded-hazard Cox "
               "cure model for left-truncated, partly interval-censored "
               "survival data"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the model to a CSV file");
  fit_cmd->add_option("--input", fit_args.input, "Input CSV path")->required();
  fit_cmd->add_option("--tau", fit_args.tau, "Cure threshold")->required();
  fit_cmd->add_option("--order", fit_args.order, "Spline order (default 3)");
  fit_cmd->add_option("--functional", fit_args.functionals,
                      "Cumulative-hazard increment \"q,t\" (repeatable)");
  fit_cmd->add_option("--a0", fit_args.a0, "Hazard lower bound");
  fit_cmd->add_option("--b0", fit_args.b0, "Hazard upper bound");
  fit_cmd->add_option("--c0", fit_args.c0, "Coefficient norm bound");
  fit_cmd->add_option("--seed", fit_args.seed, "Random seed");
  fit_cmd->add_option("--out-dir", fit_args.out_dir, "Output directory");
  fit_cmd->add_option("--level", fit_args.level, "Confidence level");
  fit_cmd->add_option("--max-iter", fit_args.max_iter,
                      "Iteration budget per start");

  SimArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo study");
  sim_cmd->add_option("--scenario", sim_args.scenario, "h1, h2 or h3")
      ->required();
  sim_cmd->add_option("--trunc", sim_args.trunc, "light or heavy")->required();
  sim_cmd->add_option("--n", sim_args.n, "Sample size")->required();
  sim_cmd->add_option("--reps", sim_args.reps, "Replications")->required();
  sim_cmd->add_option("--seed", sim_args.seed, "Random seed");
  sim_cmd->add_option("--out-dir", sim_args.out_dir, "Output directory");

  CheckOptions check_opts;
  auto* check_cmd = app.add_subcommand("check", "Run the oracle harness");
  check_cmd->add_option("--seed", check_opts.seed, "Random seed");
  check_cmd->add_option("--rate-draws", check_opts.rate_draws,
                        "Draws per scenario for the rate oracle");
  check_cmd
      ->add_flag("--inject-gradient-fault", check_opts.inject_gradient_fault,
                 "Test fixture: corrupt the gradient so the oracle must fail")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_args);
    if (sim_cmd->parsed()) return cmd_simulate(sim_args);
    if (check_cmd->parsed()) return cmd_check(check_opts);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const McError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}
