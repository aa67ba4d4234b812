#include "ies/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "ies/error.hpp"
#include "ies/parallel.hpp"

namespace ies {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Stream bases keep simulation and real-data draws apart.
constexpr std::uint64_t kSimulationBase = 1;
constexpr std::uint64_t kRealDataBase = 2;
constexpr std::uint64_t kDataRole = 0;
constexpr std::uint64_t kSelectRole = 1;
constexpr std::uint64_t kCvRole = 64;

std::vector<double> expand_bandwidths(const std::vector<double>& h, std::size_t p) {
  if (h.size() == p) return h;
  if (h.size() == 1) return std::vector<double>(p, h[0]);
  throw Error("expected 1 or " + std::to_string(p) + " bandwidths, got " + std::to_string(h.size()));
}

AxisScaling scaling_of(const ScaledView& view) {
  return AxisScaling{view.col_min(), view.col_max() - view.col_min()};
}

Subsample select(Method m, const ScaledView& view, const BenchmarkOptions& o, SeededRng& rng) {
  switch (m) {
    case Method::kIes: return ies_select(view, o.n, o.q, rng);
    case Method::kRandom: return random_select(view.n_rows(), o.n, rng);
    case Method::kLowCon: return lowcon_select(view, o.n, rng, o.lowcon);
  }
  throw Error("unknown subsampling method");
}

struct TrainedModel {
  AdditiveFit fit;
  std::optional<double> cv_error;
  double cv_seconds = 0.0;
  double fit_seconds = 0.0;
};

TrainedModel train(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const BenchmarkOptions& o, SeededRng& cv_rng,
                   int cv_threads) {
  TrainedModel out;
  std::vector<double> h = expand_bandwidths(o.bandwidths, static_cast<std::size_t>(x.cols()));
  if (o.cv) {
    const auto start = Clock::now();
    CvSpec spec = o.cv_spec;
    spec.threads = cv_threads;
    const CvResult cv = cv_select(x, y, spec, o.fit, cv_rng);
    h = cv.bandwidths;
    out.cv_error = cv.error;
    out.cv_seconds = seconds_since(start);
  }
  const auto start = Clock::now();
  out.fit = backfit(x, y, h, o.fit);
  out.fit_seconds = seconds_since(start);
  return out;
}

MetricRecord base_record(std::string method, int rep, const TrainedModel& model, const Eigen::MatrixXd& scaled_sub,
                         const Eigen::MatrixXd& raw_sub, int cdf_grid) {
  MetricRecord r;
  r.method = std::move(method);
  r.replication = rep;
  r.cdf_deviation = scaled_sub.cols() >= 2 ? metric_cdf_deviation(scaled_sub, cdf_grid) : std::vector<double>{};
  r.max_abs_correlation = max_abs_correlation(raw_sub);
  r.bandwidths = model.fit.bandwidths;
  r.cv_error = model.cv_error;
  r.iterations = model.fit.iterations;
  r.converged = model.fit.converged;
  r.cv_seconds = model.cv_seconds;
  r.fit_seconds = model.fit_seconds;
  return r;
}

void prediction_errors(MetricRecord& r, const AdditiveFit& fit, const ScaledView& view) {
  const Eigen::MatrixXd& x = view.values();
  const Eigen::VectorXd& y = view.source().response();
  double sse = 0.0, worst = 0.0;
  std::vector<double> point(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) point[static_cast<std::size_t>(j)] = x(i, j);
    const double e = predict(fit, point) - y(i);
    sse += e * e;
    worst = std::max(worst, std::abs(e));
  }
  r.ave_pred_error = sse / static_cast<double>(x.rows());
  r.max_pred_error = worst;
}

std::size_t count_distinct(const std::vector<std::size_t>& idx) {
  return std::set<std::size_t>(idx.begin(), idx.end()).size();
}

// Labels are stored as text; numbers and booleans are written as JSON values.
nlohmann::ordered_json label_value(const std::string& v) {
  if (v == "true" || v == "false") return v == "true";
  if (!v.empty() && std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return std::stoull(v);
  return v;
}

std::string format_number(double v) {
  return nlohmann::json(v).dump();
}

}  // namespace

void BenchmarkOptions::validate(std::size_t N, std::size_t p) const {
  if (n < 2 || n > N) throw Error("subsample size n must lie in [2, " + std::to_string(N) + "], got " + std::to_string(n));
  if (q < 2) throw Error("q must be at least 2");
  if (methods.empty()) throw Error("at least one subsampling method is required");
  if (replications < 1) throw Error("replications must be at least 1");
  if (grid_per_axis < 2) throw Error("grid needs at least 2 points per axis");
  if (cdf_grid < 2) throw Error("CDF grid resolution must be at least 2");
  fit.validate();
  if (cv)
    cv_spec.validate(p);
  else
    for (double h : expand_bandwidths(bandwidths, p))
      if (!(h > 0.0)) throw Error("bandwidths must be positive");
}

BenchmarkReport run_benchmark(const SimScenario& scenario, const BenchmarkOptions& options) {
  scenario.validate();
  if (scenario.p != 3) throw Error("the simulation study uses p = 3 predictors");
  options.validate(scenario.N, scenario.p);
  const GridSpec grid = GridSpec::simulation(scenario.p, options.grid_per_axis);
  const std::vector<double> dom_lo(scenario.p, -2.0), dom_hi(scenario.p, 2.0);
  grid.validate(dom_lo, dom_hi);
  const Eigen::VectorXd truth = evaluate_on_grid(
      [&](std::span<const double> x) { return true_regression(x, scenario.misspecify); }, grid);

  const auto reps = static_cast<std::size_t>(options.replications);
  const std::size_t n_methods = options.methods.size();
  std::vector<MetricRecord> records(reps * n_methods);
  const int threads = resolve_threads(options.threads);

  parallel_for(reps, threads, [&](std::size_t rep) {
    SeededRng data_rng(scenario.seed, derive_stream(kSimulationBase, rep, kDataRole));
    const Dataset data = generate(scenario, data_rng);
    const ScaledView view(data);
    for (std::size_t m = 0; m < n_methods; ++m) {
      const auto start = Clock::now();
      SeededRng select_rng(scenario.seed, derive_stream(kSimulationBase, rep, kSelectRole + m));
      const Subsample sub = select(options.methods[m], view, options, select_rng);
      const double select_seconds = seconds_since(start);
      const Eigen::MatrixXd x = view.take_rows(sub.indices);
      const Eigen::VectorXd y = take_rows(data.response(), sub.indices);
      SeededRng cv_rng(scenario.seed, derive_stream(kSimulationBase, rep, kCvRole + m));
      const TrainedModel model = train(x, y, options, cv_rng, 1);
      MetricRecord r = base_record(std::string(method_name(options.methods[m])), static_cast<int>(rep), model, x,
                                   take_rows(data.predictors(), sub.indices), options.cdf_grid);
      const MeeAse e = metric_mee_ase(evaluate_on_grid(model.fit, scaling_of(view), grid), truth);
      r.mee = e.mee;
      r.ase = e.ase;
      r.distinct_rows = count_distinct(sub.indices);
      r.subsample_seconds = select_seconds;
      r.total_seconds = seconds_since(start);
      records[rep * n_methods + m] = std::move(r);
    }
  });

  BenchmarkReport report;
  report.labels = {{"case", std::string(case_name(scenario.tag))},
                   {"N", std::to_string(scenario.N)},
                   {"n", std::to_string(options.n)},
                   {"q", std::to_string(options.q)},
                   {"misspecify", scenario.misspecify ? "true" : "false"}};
  report.records = std::move(records);
  return report;
}

BenchmarkReport run_real_benchmark(const Dataset& data, const BenchmarkOptions& options) {
  options.validate(data.n_rows(), data.n_cols());
  const ScaledView view(data);
  const AxisScaling scaling = scaling_of(view);
  GridSpec grid;
  grid.per_axis = options.grid_per_axis;
  for (std::size_t j = 0; j < data.n_cols(); ++j) {
    grid.lo.push_back(view.col_min()(static_cast<Eigen::Index>(j)));
    grid.hi.push_back(view.col_max()(static_cast<Eigen::Index>(j)));
  }
  const int threads = resolve_threads(options.threads);

  BenchmarkReport report;
  report.labels = {{"dataset", "csv"},
                   {"response", data.response_name()},
                   {"N", std::to_string(data.n_rows())},
                   {"n", std::to_string(options.n)},
                   {"q", std::to_string(options.q)}};

  const auto start = Clock::now();
  SeededRng full_cv_rng(options.seed, derive_stream(kRealDataBase, 0, kCvRole - 1));
  const TrainedModel reference = train(view.values(), data.response(), options, full_cv_rng, threads);
  const Eigen::VectorXd reference_grid = evaluate_on_grid(reference.fit, scaling, grid);
  MetricRecord full = base_record("full", 0, reference, view.values(), data.predictors(), options.cdf_grid);
  prediction_errors(full, reference.fit, view);
  full.distinct_rows = data.n_rows();
  full.total_seconds = seconds_since(start);
  report.records.push_back(std::move(full));

  const auto reps = static_cast<std::size_t>(options.replications);
  const std::size_t n_methods = options.methods.size();
  std::vector<MetricRecord> records(reps * n_methods);
  parallel_for(reps, threads, [&](std::size_t rep) {
    for (std::size_t m = 0; m < n_methods; ++m) {
      const auto t0 = Clock::now();
      SeededRng select_rng(options.seed, derive_stream(kRealDataBase, rep, kSelectRole + m));
      const Subsample sub = select(options.methods[m], view, options, select_rng);
      const double select_seconds = seconds_since(t0);
      const Eigen::MatrixXd x = view.take_rows(sub.indices);
      const Eigen::VectorXd y = take_rows(data.response(), sub.indices);
      SeededRng cv_rng(options.seed, derive_stream(kRealDataBase, rep, kCvRole + m));
      const TrainedModel model = train(x, y, options, cv_rng, 1);
      MetricRecord r = base_record(std::string(method_name(options.methods[m])), static_cast<int>(rep), model, x,
                                   take_rows(data.predictors(), sub.indices), options.cdf_grid);
      const MeeAse e = metric_mee_ase(evaluate_on_grid(model.fit, scaling, grid), reference_grid);
      r.mee = e.mee;
      r.ase = e.ase;
      prediction_errors(r, model.fit, view);
      r.distinct_rows = count_distinct(sub.indices);
      r.subsample_seconds = select_seconds;
      r.total_seconds = seconds_since(t0);
      records[rep * n_methods + m] = std::move(r);
    }
  });
  for (auto& r : records) report.records.push_back(std::move(r));
  return report;
}

std::filesystem::path timings_path(const std::filesystem::path& report_path) {
  auto p = report_path;
  return p.replace_extension(".timings.jsonl");
}

std::filesystem::path summary_path(const std::filesystem::path& report_path) {
  auto p = report_path;
  return p.replace_extension(".summary.csv");
}

void write_report(const BenchmarkReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  std::ofstream timings(timings_path(path), std::ios::binary);
  if (!out || !timings) throw Error("cannot open report file '" + path.string() + "' for writing");

  std::vector<std::string> method_order;
  std::map<std::string, std::map<std::string, std::vector<double>>> by_method;
  auto collect = [&](const std::string& method, const std::string& metric, double v) {
    if (std::find(method_order.begin(), method_order.end(), method) == method_order.end())
      method_order.push_back(method);
    by_method[method][metric].push_back(v);
  };

  for (const auto& r : report.records) {
    nlohmann::ordered_json j;
    for (const auto& [key, value] : report.labels) j[key] = label_value(value);
    j["method"] = r.method;
    j["replication"] = r.replication;
    j["mee"] = r.mee;
    j["ase"] = r.ase;
    j["cdf_deviation"] = r.cdf_deviation;
    j["max_abs_correlation"] = r.max_abs_correlation;
    if (r.ave_pred_error) j["ave_pred_error"] = *r.ave_pred_error;
    if (r.max_pred_error) j["max_pred_error"] = *r.max_pred_error;
    j["bandwidths"] = r.bandwidths;
    if (r.cv_error) j["cv_error"] = *r.cv_error;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["distinct_rows"] = r.distinct_rows;
    out << j.dump() << '\n';

    nlohmann::ordered_json t;
    t["method"] = r.method;
    t["replication"] = r.replication;
    t["subsample_seconds"] = r.subsample_seconds;
    t["cv_seconds"] = r.cv_seconds;
    t["fit_seconds"] = r.fit_seconds;
    t["total_seconds"] = r.total_seconds;
    timings << t.dump() << '\n';

    collect(r.method, "mee", r.mee);
    collect(r.method, "ase", r.ase);
    collect(r.method, "max_abs_correlation", r.max_abs_correlation);
    if (!r.cdf_deviation.empty())
      collect(r.method, "max_cdf_deviation", *std::max_element(r.cdf_deviation.begin(), r.cdf_deviation.end()));
    if (r.ave_pred_error) collect(r.method, "ave_pred_error", *r.ave_pred_error);
    if (r.max_pred_error) collect(r.method, "max_pred_error", *r.max_pred_error);
  }
  if (!out || !timings) throw Error("failed writing report file '" + path.string() + "'");

  std::ofstream summary(summary_path(path), std::ios::binary);
  if (!summary) throw Error("cannot open summary file '" + summary_path(path).string() + "' for writing");
  summary << "method,metric,count,q1,median,q3\n";
  for (const auto& method : method_order)
    for (const auto& [metric, values] : by_method[method]) {
      const Quartiles qs = quartiles(values);
      summary << method << ',' << metric << ',' << values.size() << ',' << format_number(qs.q1) << ','
              << format_number(qs.median) << ',' << format_number(qs.q3) << '\n';
    }
  if (!summary) throw Error("failed writing summary file");
}

}  // namespace ies
