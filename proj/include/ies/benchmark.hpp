#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ies/backfit.hpp"
#include "ies/bandwidth.hpp"
#include "ies/dataset.hpp"
#include "ies/generators.hpp"
#include "ies/metrics.hpp"
#include "ies/sampler.hpp"

namespace ies {

/// Settings shared by the simulation and real-data harnesses.
struct BenchmarkOptions {
  std::size_t n = 500;
  int q = 16;
  std::vector<Method> methods{Method::kIes, Method::kRandom};
  int replications = 50;
  std::uint64_t seed = 0;
  int grid_per_axis = 40;
  /// Choose bandwidths by cross-validation; otherwise use `bandwidths`.
  bool cv = true;
  CvSpec cv_spec{};
  /// Fixed bandwidths when cv is off: one value for all predictors or one per predictor.
  std::vector<double> bandwidths{0.2};
  FitConfig fit{};
  LowConOptions lowcon{};
  int cdf_grid = 64;
  /// Replications run concurrently on this many threads.
  int threads = 1;

  void validate(std::size_t N, std::size_t p) const;
};

struct MetricRecord {
  std::string method;
  int replication = 0;
  double mee = 0.0;
  double ase = 0.0;
  std::vector<double> cdf_deviation;  // per column pair, on scaled predictors
  double max_abs_correlation = 0.0;
  std::optional<double> ave_pred_error;  // real data: mean squared error over all rows
  std::optional<double> max_pred_error;  // real data: max absolute error over all rows
  std::vector<double> bandwidths;
  std::optional<double> cv_error;
  int iterations = 0;
  bool converged = false;
  std::size_t distinct_rows = 0;
  double subsample_seconds = 0.0;
  double cv_seconds = 0.0;
  double fit_seconds = 0.0;
  double total_seconds = 0.0;
};

struct BenchmarkReport {
  /// Descriptive fields copied into every JSON record (case, N, n, q, ...).
  std::vector<std::pair<std::string, std::string>> labels;
  /// Ordered by (replication, method index); the real-data surrogate comes first.
  std::vector<MetricRecord> records;
};

/// Simulation study: per replication, generate data, select a subsample with
/// each method, choose bandwidths, fit, and score against the true regression
/// function on the test grid.
BenchmarkReport run_benchmark(const SimScenario& scenario, const BenchmarkOptions& options);

/// Real-data study: the model fitted on all rows is the reference. Records
/// carry grid ASE/MEE against that reference (grid spans each predictor's
/// observed range) and prediction errors over all rows. The reference itself
/// is reported with method "full".
BenchmarkReport run_real_benchmark(const Dataset& data, const BenchmarkOptions& options);

/// Writes `path` (one JSON record per line, no timings), plus
/// `<stem>.timings.jsonl` and `<stem>.summary.csv` alongside it.
void write_report(const BenchmarkReport& report, const std::filesystem::path& path);

std::filesystem::path timings_path(const std::filesystem::path& report_path);
std::filesystem::path summary_path(const std::filesystem::path& report_path);

}  // namespace ies
