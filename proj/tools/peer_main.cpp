#include "peer/driver.hpp"
#include "peer/parallel.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

// --threads accepts a count or "auto"; the PEER_THREADS environment
// variable is the fallback when the flag is absent.
peer::Index parse_threads(const std::string& flag_value) {
  std::string value = flag_value;
  if (value.empty()) {
    if (const char* env = std::getenv("PEER_THREADS")) value = env;
  }
  if (value.empty() || value == "auto") {
    return peer::resolve_thread_count(std::nullopt);
  }
  try {
    const long parsed = std::stol(value);
    return peer::resolve_thread_count(static_cast<peer::Index>(parsed));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--threads", "expected a positive count or 'auto'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "PEER: parallel integrative learning for multi-response regression "
      "with incomplete outcomes"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string x_path;
  std::string y_path;
  std::string out_dir = ".";
  std::string threads_flag;
  peer::Index rank = 0;
  double svt_tol = 1e-4;
  peer::Index lasso_grid = 100;
  std::optional<std::uint64_t> seed;
  bool center = false;
  bool tidy = false;
  bool no_timing = false;

  auto* sim = app.add_subcommand("simulate", "Generate a dataset from a scenario file");
  sim->add_option("--scenario", scenario_path, "Scenario JSON path")->required();
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--seed", seed, "Override the scenario seed");

  auto* fit = app.add_subcommand("fit", "Fit PEER to X.csv / Y.csv");
  fit->add_option("--x", x_path, "Design matrix CSV")->required();
  fit->add_option("--y", y_path, "Response CSV (empty field or NA = missing)")->required();
  fit->add_option("--rank", rank, "Initial rank r")->required();
  fit->add_option("--svt-tol", svt_tol, "SVT relative-change tolerance");
  fit->add_option("--lasso-grid", lasso_grid, "Lambda grid size");
  fit->add_option("--threads", threads_flag, "Worker count or 'auto'");
  fit->add_option("--out", out_dir, "Output directory");
  fit->add_flag("--center", center, "Center responses by observed column means");

  auto* bench = app.add_subcommand("benchmark", "Run a replicated simulation sweep");
  bench->add_option("--scenario", scenario_path, "Sweep JSON path")->required();
  bench->add_option("--out", out_dir, "Output directory");
  bench->add_option("--threads", threads_flag, "Worker count or 'auto'");
  bench->add_option("--seed", seed, "Override the sweep seed");
  bench->add_option("--rank", rank, "Override the initial rank");
  bench->add_option("--svt-tol", svt_tol, "SVT relative-change tolerance");
  bench->add_option("--lasso-grid", lasso_grid, "Lambda grid size");
  bench->add_flag("--tidy", tidy, "Also write per-replicate replicates.csv");
  bench->add_flag("--no-timing", no_timing,
                  "Write 0 for time_s so results.csv is reproducible");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      peer::SimulateConfig config;
      config.scenario_path = scenario_path;
      config.out_dir = out_dir;
      config.seed = seed;
      return peer::cmd_simulate(config);
    }
    if (fit->parsed()) {
      peer::FitCommandConfig config;
      config.x_path = x_path;
      config.y_path = y_path;
      config.out_dir = out_dir;
      config.settings.rank = rank;
      config.settings.svt_tolerance = svt_tol;
      config.settings.lambda_grid_size = lasso_grid;
      config.settings.center_responses = center;
      config.settings.threads = parse_threads(threads_flag);
      return peer::cmd_fit(config);
    }
    peer::BenchmarkConfig config;
    config.sweep_path = scenario_path;
    config.out_dir = out_dir;
    config.threads = parse_threads(threads_flag);
    config.seed = seed;
    if (rank > 0) config.rank = rank;
    config.svt_tolerance = svt_tol;
    config.lambda_grid_size = lasso_grid;
    config.write_replicates = tidy;
    config.include_timing = !no_timing;
    return peer::cmd_benchmark(config);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const peer::InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
