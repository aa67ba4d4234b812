// ies: subsampling, additive-model fitting and benchmarks from the command line.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "ies/backfit.hpp"
#include "ies/bandwidth.hpp"
#include "ies/benchmark.hpp"
#include "ies/criterion.hpp"
#include "ies/dataset.hpp"
#include "ies/error.hpp"
#include "ies/orthogonal_array.hpp"
#include "ies/parallel.hpp"
#include "ies/sampler.hpp"

namespace {

using nlohmann::ordered_json;

struct Globals {
  std::uint64_t seed = 0;
  int threads = 0;
  int verbosity = 0;
};

struct CvFlags {
  bool cv = false;
  int folds = 5;
  std::string grid = "0.05:0.95:0.05";
  bool full_grid = false;

  ies::CvSpec spec(int threads) const {
    ies::CvSpec s;
    s.folds = folds;
    s.grid = ies::parse_grid(grid);
    s.search = full_grid ? ies::CvSearch::kFullGrid : ies::CvSearch::kCoordinateDescent;
    s.threads = threads;
    return s;
  }
};

void add_cv_flags(CLI::App* cmd, CvFlags& f) {
  cmd->add_option("--cv-folds", f.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  cmd->add_option("--cv-grid", f.grid, "Bandwidth grid as lo:hi:step or a comma list (scaled units)");
  cmd->add_flag("--full-grid", f.full_grid, "Search the full product grid instead of coordinate descent");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string rational_text(const ies::Rational& r) {
  return std::to_string(r.numerator()) + (r.denominator() == 1 ? "" : "/" + std::to_string(r.denominator()));
}

double to_double(const ies::Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ies::Error("cannot open '" + path + "' for writing");
  return out;
}

// Writes to the named file, or standard output when the name is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  auto out = open_output(path);
  out << text;
  if (!out) throw ies::Error("failed writing '" + path + "'");
}

std::vector<double> expand(const std::vector<double>& h, std::size_t p) {
  if (h.size() == p) return h;
  if (h.size() == 1) return std::vector<double>(p, h[0]);
  throw ies::Error("expected 1 or " + std::to_string(p) + " bandwidths, got " + std::to_string(h.size()));
}

// ---- oa-gen ----

struct OaGenArgs {
  int q = 2;
  std::size_t p = 0;
  int lambda = 1;
  bool random = false;
  std::string out;
};

void run_oa_gen(const OaGenArgs& a, const Globals& g) {
  const std::size_t p = a.p == 0 ? static_cast<std::size_t>(a.q) + 1 : a.p;
  const ies::OrthogonalArray oa = ies::construct_oa(a.q, p, a.lambda);
  const auto report = ies::verify_strength(oa.levels);
  if (!report.pass) throw ies::Error("constructed array failed its strength check");
  spdlog::info("OA({}, {}, {}, 2) with lambda {}", oa.levels.rows(), p, a.q, a.lambda);
  std::ostringstream s;
  for (std::size_t j = 0; j < p; ++j) s << (j ? "," : "") << 'c' << j + 1;
  s << '\n';
  if (a.random) {
    ies::SeededRng rng(g.seed);
    const Eigen::MatrixXd x = ies::random_oa(oa, rng);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) s << (j ? "," : "") << fmt(x(i, j));
      s << '\n';
    }
  } else {
    for (std::size_t i = 0; i < oa.levels.rows(); ++i) {
      for (std::size_t j = 0; j < p; ++j) s << (j ? "," : "") << oa.levels(i, j);
      s << '\n';
    }
  }
  emit(a.out, s.str());
}

// ---- criterion ----

struct CriterionArgs {
  std::string input;
  std::string response;
  int q = 0;
  std::string indices;
  std::string out;
};

std::vector<std::size_t> read_indices(const std::string& path, std::size_t N) {
  std::ifstream in(path);
  if (!in) throw ies::Error("cannot open index file '" + path + "'");
  std::vector<std::size_t> idx;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc() || (ptr != line.data() + line.size() && *ptr != '\r'))
      throw ies::Error("index file '" + path + "' line " + std::to_string(line_no) + ": not a row index");
    if (v >= N)
      throw ies::Error("index file '" + path + "' line " + std::to_string(line_no) + ": row " + std::to_string(v) +
                       " is out of range for " + std::to_string(N) + " rows");
    idx.push_back(v);
  }
  return idx;
}

void run_criterion(const CriterionArgs& a) {
  const ies::Dataset data = ies::load_csv(a.input, a.response);
  const ies::ScaledView view(data);
  Eigen::MatrixXd x = view.values();
  if (!a.indices.empty()) x = view.take_rows(read_indices(a.indices, data.n_rows()));
  const int q = a.q > 0 ? a.q : ies::default_q(static_cast<std::size_t>(x.rows()));
  const ies::CriterionValue v = ies::criterion_l(ies::membership_matrix(x, q));
  ordered_json j;
  j["L"] = v.L;
  j["n"] = v.n;
  j["p"] = v.p;
  j["q"] = v.q;
  j["lower_bound_weak"] = to_double(v.lower_bound);
  j["lower_bound_weak_exact"] = rational_text(v.lower_bound);
  if (v.lower_bound_exact) {
    j["lower_bound_exact"] = to_double(*v.lower_bound_exact);
    j["lower_bound_exact_exact"] = rational_text(*v.lower_bound_exact);
  } else {
    j["lower_bound_exact"] = nullptr;
  }
  j["gap"] = to_double(v.gap);
  j["gap_exact"] = rational_text(v.gap);
  emit(a.out, j.dump(2) + "\n");
}

// ---- subsample ----

struct SubsampleArgs {
  std::string input;
  std::string response;
  std::size_t n = 0;
  int q = 0;
  std::string method = "ies";
  std::string output;
  std::string indices;
  bool audit = false;
};

void run_subsample(const SubsampleArgs& a, const Globals& g) {
  const ies::Dataset data = ies::load_csv(a.input, a.response);
  const ies::ScaledView view(data);
  const ies::Method method = ies::parse_method(a.method);
  ies::SeededRng rng(g.seed);
  ies::Subsample sub;
  int q_used = 0;
  switch (method) {
    case ies::Method::kIes:
      q_used = a.q > 0 ? a.q : ies::default_q(a.n);
      sub = ies::ies_select(view, a.n, q_used, rng, ies::IesOptions{a.audit});
      break;
    case ies::Method::kRandom:
      sub = ies::random_select(data.n_rows(), a.n, rng);
      break;
    case ies::Method::kLowCon:
      sub = ies::lowcon_select(view, a.n, rng);
      break;
  }
  spdlog::info("selected {} of {} rows with {}{}", sub.indices.size(), data.n_rows(), a.method,
               q_used ? " (q = " + std::to_string(q_used) + ")" : std::string());
  if (a.audit) {
    if (method != ies::Method::kIes) throw ies::Error("--audit applies to the ies method only");
    const auto result = ies::audit_scores(sub, view);
    if (!result.pass) throw ies::Error("score audit failed at step " + std::to_string(*result.failed_step));
    spdlog::info("score audit passed for all {} steps", sub.indices.size());
  }
  if (!a.output.empty()) ies::save_csv(data.take_rows(sub.indices), a.output);
  std::ostringstream s;
  for (std::size_t i : sub.indices) s << i << '\n';
  if (!a.indices.empty())
    emit(a.indices, s.str());
  else if (a.output.empty())
    std::cout << s.str();
}

// ---- fit ----

struct FitArgs {
  std::string input;
  std::string response;
  std::vector<double> bandwidths;
  CvFlags cv;
  std::string kernel = "epanechnikov";
  int max_iter = 200;
  double tol = 1e-6;
  std::string out;
  std::string components;
};

void run_fit(const FitArgs& a, const Globals& g) {
  const ies::Dataset data = ies::load_csv(a.input, a.response);
  const ies::ScaledView view(data);
  ies::FitConfig cfg;
  cfg.max_iterations = a.max_iter;
  cfg.tolerance = a.tol;
  cfg.kernel = ies::Kernel::from_name(a.kernel);
  cfg.validate();

  std::vector<double> h;
  std::optional<ies::CvResult> cv;
  if (a.cv.cv) {
    ies::SeededRng rng(g.seed);
    cv = ies::cv_select(view.values(), data.response(), a.cv.spec(ies::resolve_threads(g.threads)), cfg, rng);
    h = cv->bandwidths;
    spdlog::info("cross-validation chose bandwidths with error {}", cv->error);
  } else {
    if (a.bandwidths.empty()) throw ies::Error("give --bandwidths or --cv");
    h = expand(a.bandwidths, data.n_cols());
  }
  const ies::AdditiveFit fit = ies::backfit(view.values(), data.response(), h, cfg);
  if (!fit.converged) spdlog::warn("backfitting stopped after {} sweeps without converging", fit.iterations);

  ordered_json j;
  j["n"] = fit.n();
  j["p"] = fit.p();
  j["predictors"] = data.column_names();
  j["response"] = data.response_name();
  j["mu_hat"] = fit.mu_hat;
  j["bandwidths"] = fit.bandwidths;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["max_update"] = fit.max_update;
  j["kernel"] = std::string(cfg.kernel.name());
  std::vector<double> lo, hi;
  for (Eigen::Index k = 0; k < view.col_min().size(); ++k) {
    lo.push_back(view.col_min()(k));
    hi.push_back(view.col_max()(k));
  }
  j["scale_min"] = lo;
  j["scale_max"] = hi;
  double sse = 0.0;
  Eigen::VectorXd fitted = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(fit.n()), fit.mu_hat);
  for (const auto& c : fit.components) fitted += c;
  sse = (fitted - data.response()).squaredNorm();
  j["residual_mse"] = sse / static_cast<double>(fit.n());
  if (cv) {
    j["cv_error"] = cv->error;
    ordered_json table = ordered_json::array();
    for (const auto& e : cv->table) {
      // JSON has no infinity; singular candidates are written as null.
      table.push_back({{"bandwidths", e.bandwidths}, {"error", std::isfinite(e.error) ? ordered_json(e.error) : ordered_json()}});
    }
    j["cv_table"] = table;
  }
  emit(a.out, j.dump(2) + "\n");

  if (!a.components.empty()) {
    std::ostringstream s;
    const auto& names = data.column_names();
    for (const auto& name : names) s << name << ',';
    for (const auto& name : names) s << "m_" << name << ',';
    s << "fitted," << (data.response_name().empty() ? "y" : data.response_name()) << '\n';
    const auto& x = data.predictors();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index k = 0; k < x.cols(); ++k) s << fmt(x(i, k)) << ',';
      for (const auto& c : fit.components) s << fmt(c(i)) << ',';
      s << fmt(fitted(i)) << ',' << fmt(data.response()(i)) << '\n';
    }
    emit(a.components, s.str());
  }
}

// ---- benchmark ----

struct BenchmarkArgs {
  int case_id = 1;
  bool misspecify = false;
  std::size_t N = 10000;
  std::size_t n = 1000;
  int q = 16;
  std::vector<std::string> methods{"ies", "rand", "lowcon"};
  int reps = 50;
  int grid_per_axis = 40;
  int cdf_grid = 64;
  double rho = 0.3;
  double noise_variance = 0.25;
  std::string out = "report.jsonl";
  std::string real_data;
  std::string response;
  bool cv = true;
  CvFlags cv_flags;
  std::vector<double> bandwidths{0.2};
  int max_iter = 200;
  double tol = 1e-6;
};

void run_benchmark_cmd(const BenchmarkArgs& a, const Globals& g) {
  ies::BenchmarkOptions o;
  o.n = a.n;
  o.q = a.q;
  o.methods.clear();
  for (const auto& m : a.methods) o.methods.push_back(ies::parse_method(m));
  o.replications = a.reps;
  o.seed = g.seed;
  o.grid_per_axis = a.grid_per_axis;
  o.cdf_grid = a.cdf_grid;
  o.cv = a.cv;
  o.cv_spec = a.cv_flags.spec(1);
  o.bandwidths = a.bandwidths;
  o.fit.max_iterations = a.max_iter;
  o.fit.tolerance = a.tol;
  o.threads = ies::resolve_threads(g.threads);

  ies::BenchmarkReport report;
  if (!a.real_data.empty()) {
    if (a.response.empty()) throw ies::Error("--real-data needs --response");
    const ies::Dataset data = ies::load_csv(a.real_data, a.response);
    spdlog::info("real data: {} rows, {} predictors", data.n_rows(), data.n_cols());
    report = ies::run_real_benchmark(data, o);
  } else {
    ies::SimScenario s;
    s.tag = a.case_id == 1 ? ies::CaseTag::kNormal : ies::CaseTag::kCopulaExponential;
    s.N = a.N;
    s.rho = a.rho;
    s.noise_variance = a.noise_variance;
    s.misspecify = a.misspecify;
    s.seed = g.seed;
    spdlog::info("simulation case {}: N = {}, n = {}, q = {}, {} replications", a.case_id, a.N, a.n, a.q, a.reps);
    report = ies::run_benchmark(s, o);
  }
  ies::write_report(report, a.out);
  spdlog::info("wrote {} records to {}", report.records.size(), a.out);
}

std::uint64_t default_seed() {
  const char* env = std::getenv("IES_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t v = 0;
  const std::string s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw CLI::ValidationError("IES_SEED", "must be a nonnegative integer, got '" + s + "'");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-orthogonal-array subsampling and additive-model fitting"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  app.set_config("--config", "", "TOML configuration file; explicit flags take precedence");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the effective configuration as TOML and exit");

  Globals g;
  app.add_option("--seed", g.seed, "Random seed (default: IES_SEED or 0)");
  app.add_option("--threads", g.threads, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  app.add_flag("-v,--verbose", g.verbosity, "More log output on standard error (repeatable)");

  OaGenArgs oa;
  auto* oa_cmd = app.add_subcommand("oa-gen", "Emit a strength-2 orthogonal array as CSV")->configurable();
  oa_cmd->add_option("--q", oa.q, "Number of levels (prime power up to 32)")->required();
  oa_cmd->add_option("--p", oa.p, "Columns (default q + 1)");
  oa_cmd->add_option("--lambda", oa.lambda, "Stacked copies")->check(CLI::PositiveNumber);
  oa_cmd->add_flag("--random", oa.random, "Emit a jittered sample in [0,1]^p instead of levels");
  oa_cmd->add_option("--out", oa.out, "Output CSV (default standard output)");

  CriterionArgs cr;
  auto* cr_cmd = app.add_subcommand("criterion", "Print the similarity criterion and its bounds as JSON")->configurable();
  cr_cmd->add_option("--input", cr.input, "Input CSV")->required();
  cr_cmd->add_option("--response", cr.response, "Response column to exclude (default: none)");
  cr_cmd->add_option("--q", cr.q, "Levels per predictor (default from n)");
  cr_cmd->add_option("--indices", cr.indices, "Evaluate only these rows (one 0-based index per line)");
  cr_cmd->add_option("--out", cr.out, "Output JSON (default standard output)");

  SubsampleArgs ss;
  auto* ss_cmd = app.add_subcommand("subsample", "Select a subsample of rows")->configurable();
  ss_cmd->add_option("--input", ss.input, "Input CSV")->required();
  ss_cmd->add_option("--response", ss.response, "Response column")->required();
  ss_cmd->add_option("--n", ss.n, "Subsample size")->required();
  ss_cmd->add_option("--q", ss.q, "Levels per predictor for ies (default from n)");
  ss_cmd->add_option("--method", ss.method, "ies, rand or lowcon")->check(CLI::IsMember({"ies", "rand", "lowcon"}));
  ss_cmd->add_option("--output", ss.output, "CSV of the selected rows");
  ss_cmd->add_option("--emit-indices", ss.indices, "File of selected 0-based row indices, one per line");
  ss_cmd->add_flag("--audit", ss.audit, "Recompute every ies step from scratch and check it");

  FitArgs ft;
  auto* ft_cmd = app.add_subcommand("fit", "Fit an additive model by local-linear backfitting")->configurable();
  ft_cmd->add_option("--input", ft.input, "Input CSV")->required();
  ft_cmd->add_option("--response", ft.response, "Response column")->required();
  auto* bw = ft_cmd->add_option("--bandwidths", ft.bandwidths, "Bandwidths on [0,1]-scaled predictors (one, or one per predictor)")
                 ->delimiter(',');
  auto* cv_flag = ft_cmd->add_flag("--cv", ft.cv.cv, "Choose bandwidths by cross-validation");
  bw->excludes(cv_flag);
  add_cv_flags(ft_cmd, ft.cv);
  ft_cmd->add_option("--kernel", ft.kernel, "epanechnikov or triangular")->check(CLI::IsMember({"epanechnikov", "triangular"}));
  ft_cmd->add_option("--max-iter", ft.max_iter, "Maximum backfitting sweeps")->check(CLI::PositiveNumber);
  ft_cmd->add_option("--tol", ft.tol, "Convergence tolerance")->check(CLI::PositiveNumber);
  ft_cmd->add_option("--out", ft.out, "Fit summary JSON (default standard output)");
  ft_cmd->add_option("--components", ft.components, "CSV of fitted component values per row");

  BenchmarkArgs bm;
  auto* bm_cmd = app.add_subcommand("benchmark", "Run the simulation or real-data benchmark")->configurable();
  bm_cmd->add_option("--case", bm.case_id, "1: truncated normal, 2: copula exponential")->check(CLI::IsMember({1, 2}));
  bm_cmd->add_flag("--misspecify", bm.misspecify, "Add the interaction term to the true regression function");
  bm_cmd->add_option("--N", bm.N, "Full data size")->check(CLI::PositiveNumber);
  bm_cmd->add_option("--n", bm.n, "Subsample size")->check(CLI::PositiveNumber);
  bm_cmd->add_option("--q", bm.q, "Levels per predictor for ies");
  bm_cmd->add_option("--methods", bm.methods, "Comma list of ies, rand, lowcon")
      ->delimiter(',')
      ->check(CLI::IsMember({"ies", "rand", "lowcon"}));
  bm_cmd->add_option("--reps", bm.reps, "Replications")->check(CLI::PositiveNumber);
  bm_cmd->add_option("--grid-per-axis", bm.grid_per_axis, "Test grid points per predictor")->check(CLI::Range(2, 1000));
  bm_cmd->add_option("--cdf-grid", bm.cdf_grid, "Resolution of the CDF deviation grid")->check(CLI::Range(2, 4096));
  bm_cmd->add_option("--rho", bm.rho, "Latent correlation");
  bm_cmd->add_option("--noise-variance", bm.noise_variance, "Noise variance");
  bm_cmd->add_option("--out", bm.out, "JSON-lines report path");
  bm_cmd->add_option("--real-data", bm.real_data, "CSV to benchmark instead of simulated data");
  bm_cmd->add_option("--response", bm.response, "Response column of --real-data");
  bm_cmd->add_flag("--cv,!--no-cv", bm.cv, "Choose bandwidths by cross-validation (default on)");
  add_cv_flags(bm_cmd, bm.cv_flags);
  bm_cmd->add_option("--bandwidths", bm.bandwidths, "Fixed bandwidths with --no-cv")->delimiter(',');
  bm_cmd->add_option("--max-iter", bm.max_iter, "Maximum backfitting sweeps")->check(CLI::PositiveNumber);
  bm_cmd->add_option("--tol", bm.tol, "Convergence tolerance")->check(CLI::PositiveNumber);

  try {
    g.seed = default_seed();
    app.parse(argc, argv);
    if (app.get_subcommands().empty() && !print_config)
      throw CLI::RequiredError("a subcommand");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (print_config) {
    std::cout << app.config_to_str(false, false);
    return 0;
  }

  auto logger = spdlog::stderr_logger_st("ies");
  logger->set_pattern("[%l] %v");
  logger->set_level(g.verbosity >= 2 ? spdlog::level::debug
                    : g.verbosity == 1 ? spdlog::level::info
                                       : spdlog::level::warn);
  spdlog::set_default_logger(logger);
  spdlog::debug("seed {}, threads {}", g.seed, ies::resolve_threads(g.threads));

  try {
    if (oa_cmd->parsed()) run_oa_gen(oa, g);
    if (cr_cmd->parsed()) run_criterion(cr);
    if (ss_cmd->parsed()) run_subsample(ss, g);
    if (ft_cmd->parsed()) run_fit(ft, g);
    if (bm_cmd->parsed()) run_benchmark_cmd(bm, g);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
