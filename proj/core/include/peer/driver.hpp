#pragma once

#include "peer/metrics.hpp"
#include "peer/peer.hpp"
#include "peer/simgen.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace peer {

/// Shared fitting knobs for the file-based commands.
struct FitSettings {
  Index rank = 1;
  double svt_tolerance = 1e-4;
  Index svt_max_iterations = 500;
  Index lambda_grid_size = 100;
  double lambda_grid_ratio = 1e-3;
  LassoOptions lasso;
  bool center_responses = false;
  Index threads = 1;

  PeerOptions to_peer_options() const;
};

struct SimulateConfig {
  std::string scenario_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;  // overrides the scenario's seed
};

struct FitCommandConfig {
  std::string x_path;
  std::string y_path;
  std::string out_dir;
  FitSettings settings;
};

/// Benchmark sweep: the base scenario crossed with lists of p, snr and
/// missing rate, each cell repeated `replicates` times.
struct SweepConfig {
  SimScenario base;
  std::vector<Index> p_values;
  std::vector<double> snr_values;
  std::vector<double> missing_rates;
  Index replicates = 1;
  Index rank = 0;  // 0 means r* + 1
};

struct BenchmarkConfig {
  std::string sweep_path;
  std::string out_dir;
  Index threads = 1;
  std::optional<std::uint64_t> seed;
  std::optional<Index> rank;
  double svt_tolerance = 1e-4;
  Index lambda_grid_size = 100;
  /// Also write replicates.csv with one row per replicate (boxplot data).
  bool write_replicates = false;
  /// Wall time is not reproducible; disable to make results.csv a pure
  /// function of (config, seed).
  bool include_timing = true;
};

struct ReplicateRecord {
  Index p = 0;
  double snr = 0.0;
  double missing_rate = 0.0;
  Index replicate = 0;
  FitScore score;
  Index r_hat = 0;
  bool failed = false;
  std::string error;
};

struct CellResult {
  Index p = 0;
  double snr = 0.0;
  double missing_rate = 0.0;
  SummaryStats stats;
  Index replicates = 0;
  Index failures = 0;
};

struct SweepResult {
  std::vector<CellResult> cells;
  std::vector<ReplicateRecord> replicates;
};

/// True supports ordered the way the estimator can recover them: by
/// descending effective singular value d_k * ||v*_k||_2. A no-op for
/// study 1 where the right factors are orthonormal.
std::vector<std::vector<Index>> true_supports_effective_order(
    const GroundTruth& truth);

/// Supports of the first r_star estimated layers, empty-padded when
/// r_hat < r_star.
std::vector<std::vector<Index>> estimated_supports(const PeerModel& model,
                                                   Index r_star);

/// Generate, fit and score one replicate.
ReplicateRecord run_replicate(const SimScenario& scn, const FitSettings& fit);

/// Run every (cell, replicate) task on `threads` workers; per-fit layer
/// parallelism is disabled so replicate-level parallelism wins. Failed
/// replicates are recorded and excluded from the cell summaries.
SweepResult run_sweep(const SweepConfig& sweep, const FitSettings& fit,
                      Index threads);

/// results.csv: method,p,snr,missing_rate,er_c_e3,er_xc,fpr_pct,fnr_pct,time_s
void write_results_csv(const std::string& path,
                       const std::vector<CellResult>& cells,
                       bool include_timing);

/// One row per replicate, tidy layout for external plotting.
void write_replicates_csv(const std::string& path,
                          const std::vector<ReplicateRecord>& records);

/// Commands behind the CLI. All return a process exit code: 0 on success,
/// 2 for invalid input or non-conformable data, 1 for any other failure.
int cmd_simulate(const SimulateConfig& config);
int cmd_fit(const FitCommandConfig& config);
int cmd_benchmark(const BenchmarkConfig& config);

/// Sweep description from JSON (scalar or list values for p, snr,
/// missing_rate; replicate count; optional rank).
SweepConfig load_sweep(const std::string& path);

}  // namespace peer
