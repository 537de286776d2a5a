#include "peer/driver.hpp"

#include "peer/csv.hpp"
#include "peer/model_io.hpp"
#include "peer/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

namespace peer {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string table_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

template <typename F>
int run_command(F&& body) {
  try {
    body();
    return 0;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw InvalidInputError("cannot create output directory " + dir + ": " +
                            ec.message());
  }
}

std::string join_path(const std::string& dir, const char* file) {
  return (fs::path(dir) / file).string();
}

}  // namespace

PeerOptions FitSettings::to_peer_options() const {
  PeerOptions opts;
  opts.rank = rank;
  opts.svt_tolerance = svt_tolerance;
  opts.svt_max_iterations = svt_max_iterations;
  opts.lasso = lasso;
  opts.lambda_grid_size = lambda_grid_size;
  opts.lambda_grid_ratio = lambda_grid_ratio;
  opts.threads = threads;
  opts.center_responses = center_responses;
  return opts;
}

std::vector<std::vector<Index>> true_supports_effective_order(
    const GroundTruth& truth) {
  const Index r_star = truth.d_star.size();
  std::vector<Index> order(static_cast<std::size_t>(r_star));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<double> effective(static_cast<std::size_t>(r_star));
  for (Index k = 0; k < r_star; ++k) {
    effective[static_cast<std::size_t>(k)] =
        truth.d_star(k) * truth.v_star.col(k).norm();
  }
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return effective[static_cast<std::size_t>(a)] >
           effective[static_cast<std::size_t>(b)];
  });
  std::vector<std::vector<Index>> supports;
  supports.reserve(order.size());
  for (Index k : order) {
    supports.push_back(truth.supports[static_cast<std::size_t>(k)]);
  }
  return supports;
}

std::vector<std::vector<Index>> estimated_supports(const PeerModel& model,
                                                   Index r_star) {
  std::vector<std::vector<Index>> supports(static_cast<std::size_t>(r_star));
  const Index usable = std::min<Index>(
      model.estimated_rank, static_cast<Index>(model.layers.size()));
  for (Index k = 0; k < std::min(r_star, usable); ++k) {
    const auto& u = model.layers[static_cast<std::size_t>(k)].u_hat;
    for (Index j = 0; j < u.size(); ++j) {
      if (u(j) != 0.0) supports[static_cast<std::size_t>(k)].push_back(j);
    }
  }
  return supports;
}

ReplicateRecord run_replicate(const SimScenario& scn, const FitSettings& fit) {
  ReplicateRecord record;
  record.p = scn.p;
  record.snr = scn.snr;
  record.missing_rate = scn.missing_rate;
  record.replicate = scn.replicate_id;
  try {
    const SimDataset data = generate(scn);
    const auto t0 = std::chrono::steady_clock::now();
    const PeerModel model = fit_peer(data.obs, data.x, fit.to_peer_options());
    record.score.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    record.score.er_c = estimation_error(model.c_hat, data.truth.c_star);
    record.score.er_xc =
        prediction_error(data.x, model.c_hat, data.truth.c_star);
    const auto [fpr, fnr] =
        selection_rates(estimated_supports(model, scn.r_star),
                        true_supports_effective_order(data.truth), scn.p);
    record.score.fpr = fpr;
    record.score.fnr = fnr;
    record.r_hat = model.estimated_rank;
  } catch (const std::exception& e) {
    record.failed = true;
    record.error = e.what();
  }
  return record;
}

SweepResult run_sweep(const SweepConfig& sweep, const FitSettings& fit,
                      Index threads) {
  if (sweep.replicates < 1) {
    throw InvalidInputError("sweep: replicates must be >= 1");
  }
  if (sweep.p_values.empty() || sweep.snr_values.empty() ||
      sweep.missing_rates.empty()) {
    throw InvalidInputError("sweep: p, snr and missing_rate lists must be nonempty");
  }

  struct Cell {
    Index p;
    double snr;
    double rate;
  };
  std::vector<Cell> cells;
  for (Index p : sweep.p_values) {
    for (double snr : sweep.snr_values) {
      for (double rate : sweep.missing_rates) {
        cells.push_back({p, snr, rate});
      }
    }
  }

  FitSettings per_fit = fit;
  per_fit.threads = 1;  // replicate-level parallelism takes precedence
  per_fit.rank = sweep.rank > 0 ? sweep.rank : sweep.base.r_star + 1;

  const Index tasks = static_cast<Index>(cells.size()) * sweep.replicates;
  SweepResult result;
  result.replicates.resize(static_cast<std::size_t>(tasks));
  parallel_for(threads, tasks, [&](Index task) {
    const auto& cell = cells[static_cast<std::size_t>(task / sweep.replicates)];
    SimScenario scn = sweep.base;
    scn.p = cell.p;
    scn.snr = cell.snr;
    scn.missing_rate = cell.rate;
    scn.replicate_id = task % sweep.replicates;
    result.replicates[static_cast<std::size_t>(task)] =
        run_replicate(scn, per_fit);
  });

  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellResult cell_result;
    cell_result.p = cells[c].p;
    cell_result.snr = cells[c].snr;
    cell_result.missing_rate = cells[c].rate;
    std::vector<FitScore> scores;
    for (Index rep = 0; rep < sweep.replicates; ++rep) {
      const auto& record =
          result.replicates[c * static_cast<std::size_t>(sweep.replicates) +
                            static_cast<std::size_t>(rep)];
      if (record.failed) {
        ++cell_result.failures;
        log_warning("replicate " + std::to_string(record.replicate) +
                    " failed: " + record.error);
      } else {
        scores.push_back(record.score);
      }
    }
    cell_result.replicates = sweep.replicates;
    if (!scores.empty()) {
      cell_result.stats = summarize(scores);
    }
    result.cells.push_back(std::move(cell_result));
  }
  return result;
}

void write_results_csv(const std::string& path,
                       const std::vector<CellResult>& cells,
                       bool include_timing) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidInputError("cannot write " + path);
  }
  out << "method,p,snr,missing_rate,er_c_e3,er_xc,fpr_pct,fnr_pct,time_s\n";
  for (const auto& cell : cells) {
    const auto& mean = cell.stats.mean;
    out << "PEER," << cell.p << ',' << table_number(cell.snr) << ','
        << table_number(cell.missing_rate) << ','
        << table_number(mean.er_c * 1e3) << ',' << table_number(mean.er_xc)
        << ',' << table_number(mean.fpr * 100.0) << ','
        << table_number(mean.fnr * 100.0) << ','
        << table_number(include_timing ? mean.runtime_seconds : 0.0) << '\n';
  }
  if (!out) {
    throw NumericError("write failed for " + path);
  }
}

void write_replicates_csv(const std::string& path,
                          const std::vector<ReplicateRecord>& records) {
  std::ofstream out(path);
  if (!out) {
    throw InvalidInputError("cannot write " + path);
  }
  out << "method,p,snr,missing_rate,replicate,er_c,er_xc,fpr,fnr,r_hat,"
         "time_s,failed\n";
  for (const auto& r : records) {
    out << "PEER," << r.p << ',' << table_number(r.snr) << ','
        << table_number(r.missing_rate) << ',' << r.replicate << ','
        << format_double(r.score.er_c) << ',' << format_double(r.score.er_xc)
        << ',' << format_double(r.score.fpr) << ','
        << format_double(r.score.fnr) << ',' << r.r_hat << ','
        << table_number(r.score.runtime_seconds) << ','
        << (r.failed ? 1 : 0) << '\n';
  }
  if (!out) {
    throw NumericError("write failed for " + path);
  }
}

SweepConfig load_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInputError("sweep: cannot open " + path);
  }
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw InvalidInputError("sweep: parse error in " + path + ": " + e.what());
  }

  SweepConfig sweep;
  auto index_list = [&](const char* key, Index fallback) {
    std::vector<Index> values;
    if (!doc.contains(key)) {
      values.push_back(fallback);
    } else if (doc[key].is_array()) {
      for (const auto& v : doc[key]) values.push_back(v.get<Index>());
    } else {
      values.push_back(doc[key].get<Index>());
    }
    return values;
  };
  auto double_list = [&](const char* key, double fallback) {
    std::vector<double> values;
    if (!doc.contains(key)) {
      values.push_back(fallback);
    } else if (doc[key].is_array()) {
      for (const auto& v : doc[key]) values.push_back(v.get<double>());
    } else {
      values.push_back(doc[key].get<double>());
    }
    return values;
  };

  try {
    if (doc.contains("study")) sweep.base.study = doc["study"].get<int>();
    if (doc.contains("n")) sweep.base.n = doc["n"].get<Index>();
    if (doc.contains("q")) sweep.base.q = doc["q"].get<Index>();
    if (doc.contains("r_star")) sweep.base.r_star = doc["r_star"].get<Index>();
    if (doc.contains("s")) sweep.base.s = doc["s"].get<Index>();
    if (doc.contains("s_u")) sweep.base.s_u = doc["s_u"].get<Index>();
    if (doc.contains("s_v")) sweep.base.s_v = doc["s_v"].get<Index>();
    if (doc.contains("seed")) sweep.base.seed = doc["seed"].get<std::uint64_t>();
    sweep.p_values = index_list("p", sweep.base.p);
    sweep.snr_values = double_list("snr", sweep.base.snr);
    sweep.missing_rates = double_list("missing_rate", sweep.base.missing_rate);
    if (doc.contains("replicates")) {
      sweep.replicates = doc["replicates"].get<Index>();
    }
    if (doc.contains("rank")) sweep.rank = doc["rank"].get<Index>();
  } catch (const json::exception& e) {
    throw InvalidInputError("sweep: malformed field in " + path + ": " +
                            e.what());
  }

  // Validate every cell configuration up front.
  for (Index p : sweep.p_values) {
    for (double snr : sweep.snr_values) {
      for (double rate : sweep.missing_rates) {
        SimScenario scn = sweep.base;
        scn.p = p;
        scn.snr = snr;
        scn.missing_rate = rate;
        scn.validate();
      }
    }
  }
  return sweep;
}

int cmd_simulate(const SimulateConfig& config) {
  return run_command([&] {
    SimScenario scn = load_scenario(config.scenario_path);
    if (config.seed.has_value()) scn.seed = *config.seed;
    const SimDataset data = generate(scn);
    ensure_directory(config.out_dir);
    write_matrix_csv(join_path(config.out_dir, "X.csv"), data.x);
    write_observed_csv(join_path(config.out_dir, "Y.csv"), data.y_full,
                       data.obs.mask);
    write_matrix_csv(join_path(config.out_dir, "C_star.csv"),
                     data.truth.c_star);
    write_truth_json(join_path(config.out_dir, "truth.json"), data.truth, scn,
                     data.sigma);
  });
}

int cmd_fit(const FitCommandConfig& config) {
  return run_command([&] {
    const Matrix x = read_matrix_csv(config.x_path);
    const ObservedMatrix obs = read_observed_csv(config.y_path);
    if (x.rows() != obs.rows()) {
      throw InvalidInputError(
          "fit: X and Y are not conformable (" + std::to_string(x.rows()) +
          " vs " + std::to_string(obs.rows()) + " rows)");
    }
    const PeerOptions opts = config.settings.to_peer_options();
    const PeerModel model = fit_peer(obs, x, opts);
    ensure_directory(config.out_dir);
    write_model_json(join_path(config.out_dir, "model.json"), model, opts);
    write_matrix_csv(join_path(config.out_dir, "fitted.csv"),
                     predict(model, x));
  });
}

int cmd_benchmark(const BenchmarkConfig& config) {
  return run_command([&] {
    SweepConfig sweep = load_sweep(config.sweep_path);
    if (config.seed.has_value()) sweep.base.seed = *config.seed;
    if (config.rank.has_value()) sweep.rank = *config.rank;

    FitSettings fit;
    fit.svt_tolerance = config.svt_tolerance;
    fit.lambda_grid_size = config.lambda_grid_size;

    const SweepResult result = run_sweep(sweep, fit, config.threads);
    ensure_directory(config.out_dir);
    write_results_csv(join_path(config.out_dir, "results.csv"), result.cells,
                      config.include_timing);
    if (config.write_replicates) {
      write_replicates_csv(join_path(config.out_dir, "replicates.csv"),
                           result.replicates);
    }
  });
}

}  // namespace peer
