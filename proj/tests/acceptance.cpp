// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ies/backfit.hpp"
#include "ies/benchmark.hpp"
#include "ies/criterion.hpp"
#include "ies/dataset.hpp"
#include "ies/galois_field.hpp"
#include "ies/generators.hpp"
#include "ies/metrics.hpp"
#include "ies/orthogonal_array.hpp"
#include "ies/parallel.hpp"
#include "ies/sampler.hpp"
#include "ies/smoother.hpp"

namespace {

using Clock = std::chrono::steady_clock;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kFail;
  std::string detail;
};

std::string num(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

double median(std::vector<double> v) { return ies::quartiles(std::move(v)).median; }

// ---------------------------------------------------------------- 1

Outcome oa_correctness() {
  std::size_t checked = 0;
  for (int q : ies::GaloisField::supported_orders()) {
    const auto oa = ies::construct_oa(q, static_cast<std::size_t>(q) + 1, 1);
    if (!ies::verify_strength(oa.levels).pass) return {Status::kFail, "strength check failed for q = " + std::to_string(q)};
    ++checked;
  }
  const auto small = ies::construct_oa(2, 3);
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < small.levels.rows(); ++i)
    rows.push_back({small.levels(i, 0), small.levels(i, 1), small.levels(i, 2)});
  std::sort(rows.begin(), rows.end());
  const std::vector<std::vector<int>> expected{{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  if (rows != expected) return {Status::kFail, "q = 2, p = 3 array differs from the reference OA(4, 3, 2, 2)"};
  return {Status::kPass, std::to_string(checked) + " fields, all strength 2; q = 2 array matches the reference"};
}

// ---------------------------------------------------------------- 2

// Every t-column projection has level-combination counts (absent ones count
// as zero) differing by at most one.
bool weak_strength_oracle(const ies::LevelMatrix& m, int t) {
  const std::size_t p = m.cols();
  const int q = m.q();
  std::vector<std::vector<std::size_t>> subsets;
  if (t == 1)
    for (std::size_t j = 0; j < p; ++j) subsets.push_back({j});
  else
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = j + 1; k < p; ++k) subsets.push_back({j, k});
  for (const auto& cols : subsets) {
    std::size_t cells = 1;
    for (std::size_t c = 0; c < cols.size(); ++c) cells *= static_cast<std::size_t>(q);
    std::vector<std::size_t> counts(cells, 0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      std::size_t code = 0;
      for (std::size_t c : cols) code = code * static_cast<std::size_t>(q) + static_cast<std::size_t>(m(i, c));
      ++counts[code];
    }
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    if (*hi - *lo > 1) return false;
  }
  return true;
}

ies::LevelMatrix random_matrix(ies::SeededRng& rng) {
  const std::size_t n = 1 + rng.uniform_index(12);
  const std::size_t p = 1 + rng.uniform_index(4);
  const int q = 2 + static_cast<int>(rng.uniform_index(2));
  ies::LevelMatrix m(n, p, q);
  switch (rng.uniform_index(3)) {
    case 0:  // unstructured
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) m(i, j) = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(q)));
      break;
    case 1: {  // balanced columns, independently shuffled
      for (std::size_t j = 0; j < p; ++j) {
        std::vector<int> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = static_cast<int>(i % static_cast<std::size_t>(q));
        for (std::size_t k = n; k > 1; --k) std::swap(col[k - 1], col[rng.uniform_index(k)]);
        for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
      }
      break;
    }
    default: {  // rows of a stacked orthogonal array
      const std::size_t cols = std::min<std::size_t>(p, static_cast<std::size_t>(q) + 1);
      const auto oa = ies::construct_oa(q, cols, 3);
      std::vector<std::size_t> order(oa.levels.rows());
      std::iota(order.begin(), order.end(), 0);
      for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.uniform_index(k)]);
      ies::LevelMatrix sub(n, cols, q);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < cols; ++j) sub(i, j) = oa.levels(order[i], j);
      return sub;
    }
  }
  return m;
}

Outcome criterion_bound() {
  ies::SeededRng rng(2024);
  const int trials = 20000;
  int equal_cases = 0;
  for (int t = 0; t < trials; ++t) {
    const auto m = random_matrix(rng);
    const auto v = ies::criterion_l(m);
    if (ies::Rational(v.L) < v.lower_bound)
      return {Status::kFail, "L below the weak bound on trial " + std::to_string(t)};
    const bool w1 = weak_strength_oracle(m, 1), w2 = weak_strength_oracle(m, 2);
    if (w1 != ies::verify_weak_strength(m, 1) || w2 != ies::verify_weak_strength(m, 2))
      return {Status::kFail, "library weak-strength check disagrees with the oracle on trial " + std::to_string(t)};
    const bool equal = ies::Rational(v.L) == v.lower_bound;
    if (equal != (w1 && w2))
      return {Status::kFail, "equality/weak-strength mismatch on trial " + std::to_string(t)};
    equal_cases += equal;
  }
  return {Status::kPass, std::to_string(trials) + " matrices, bound never violated, " + std::to_string(equal_cases) +
                             " equality cases all weak strength 1 and 2"};
}

// ---------------------------------------------------------------- 3

Outcome greedy_vs_brute_force() {
  int zero_gap = 0;
  const int seeds = 100;
  const ies::Rational bound = ies::lower_bound_exact(4, 2, 2);
  for (int seed = 0; seed < seeds; ++seed) {
    ies::SeededRng rng(static_cast<std::uint64_t>(seed), 3);
    // One point per quadrant guarantees an OA(4, 2, 2, 2) subset; the rest
    // crowd the lower-left quadrant.
    Eigen::MatrixXd x(16, 2);
    for (int i = 0; i < 16; ++i) {
      const int cell = i < 4 ? i : (rng.uniform() < 0.7 ? 0 : static_cast<int>(rng.uniform_index(4)));
      x(i, 0) = (cell / 2 + rng.uniform()) / 2.0;
      x(i, 1) = (cell % 2 + rng.uniform()) / 2.0;
    }
    for (std::size_t k = 16; k > 1; --k) x.row(static_cast<Eigen::Index>(k - 1)).swap(x.row(static_cast<Eigen::Index>(rng.uniform_index(k))));
    const auto cells = ies::membership_matrix(x, 2);
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::size_t subsets = 0;
    for (std::size_t a = 0; a < 16; ++a)
      for (std::size_t b = a + 1; b < 16; ++b)
        for (std::size_t c = b + 1; c < 16; ++c)
          for (std::size_t d = c + 1; d < 16; ++d) {
            ies::LevelMatrix m(4, 2, 2);
            const std::size_t rows[4] = {a, b, c, d};
            for (std::size_t i = 0; i < 4; ++i)
              for (std::size_t j = 0; j < 2; ++j) m(i, j) = cells(rows[i], j);
            best = std::min(best, ies::criterion_l(m).L);
            ++subsets;
          }
    if (subsets != 1820) return {Status::kFail, "enumerated " + std::to_string(subsets) + " subsets"};
    if (ies::Rational(best) != bound)
      return {Status::kFail, "exhaustive minimum " + std::to_string(best) + " differs from the bound on seed " + std::to_string(seed)};
    ies::SeededRng pick(static_cast<std::uint64_t>(seed), 4);
    const auto s = ies::ies_select(cells, 4, pick);
    ies::LevelMatrix m(4, 2, 2);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 2; ++j) m(i, j) = cells(s.indices[i], j);
    zero_gap += ies::criterion_l(m).gap == ies::Rational(0);
  }
  const bool ok = zero_gap >= 90;
  return {ok ? Status::kPass : Status::kFail, "exhaustive minimum equals the bound on all seeds; greedy zero gap on " +
                                                  std::to_string(zero_gap) + "/" + std::to_string(seeds) + " (need >= 90)"};
}

// ---------------------------------------------------------------- 4

Outcome uniformity() {
  std::vector<double> dev_ies, dev_rand, cor_ies, cor_rand;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    ies::SimScenario s;
    s.N = 2000;
    s.p = 2;
    ies::SeededRng data_rng(seed, 10);
    const Eigen::MatrixXd x = ies::gen_case1_predictors(s, data_rng);
    const ies::Dataset d(x, Eigen::VectorXd::Zero(x.rows()), {});
    const ies::ScaledView view(d);
    ies::SeededRng r1(seed, 11), r2(seed, 12);
    const auto a = ies::ies_select(view, 250, 16, r1);
    const auto b = ies::random_select(2000, 250, r2);
    dev_ies.push_back(ies::metric_cdf_deviation(view.take_rows(a.indices))[0]);
    dev_rand.push_back(ies::metric_cdf_deviation(view.take_rows(b.indices))[0]);
    cor_ies.push_back(ies::max_abs_correlation(ies::take_rows(x, a.indices)));
    cor_rand.push_back(ies::max_abs_correlation(ies::take_rows(x, b.indices)));
  }
  const double di = median(dev_ies), dr = median(dev_rand), ci = median(cor_ies), cr = median(cor_rand);
  const bool ok = di < dr && ci < cr && ci < 0.10;
  return {ok ? Status::kPass : Status::kFail,
          "median sup-CDF deviation IES " + num(di) + " vs rand " + num(dr) + "; median max|corr| IES " + num(ci) +
              " vs rand " + num(cr) + " (IES must be < 0.10)"};
}

// ---------------------------------------------------------------- 5

Outcome smoother_identities() {
  ies::SeededRng rng(55);
  double worst_one = 0.0, worst_x = 0.0, worst_row = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 20 + rng.uniform_index(180);
    std::vector<double> x(n);
    const bool ties = t % 3 == 0;
    for (auto& v : x) v = ties ? std::round(rng.uniform() * 25.0) / 25.0 : rng.uniform();
    x[0] = 0.0;
    x[1] = 1.0;
    const double h = 0.12 + 0.6 * rng.uniform();
    const ies::Kernel k(t % 2 ? ies::KernelType::kTriangular : ies::KernelType::kEpanechnikov);
    const ies::LocalLinearSmoother s(x, h, k);
    const auto nn = static_cast<Eigen::Index>(n);
    const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), nn);
    worst_one = std::max(worst_one, (s.apply(Eigen::VectorXd::Ones(nn)).array() - 1.0).abs().maxCoeff());
    worst_x = std::max(worst_x, (s.apply(xv) - xv).cwiseAbs().maxCoeff());
    const Eigen::MatrixXd dense = s.dense();
    for (Eigen::Index i = 0; i < nn; ++i) {
      // Weighted least squares for (intercept, slope) at x_i.
      Eigen::MatrixXd design(nn, 2);
      Eigen::VectorXd w(nn);
      for (Eigen::Index r = 0; r < nn; ++r) {
        design(r, 0) = 1.0;
        design(r, 1) = xv(r) - xv(i);
        w(r) = k((xv(r) - xv(i)) / h);
      }
      const Eigen::MatrixXd xtw = design.transpose() * w.asDiagonal();
      const Eigen::RowVectorXd oracle = (xtw * design).fullPivLu().solve(xtw).row(0);
      worst_row = std::max(worst_row, (dense.row(i) - oracle).cwiseAbs().maxCoeff());
    }
  }
  const bool ok = worst_one <= 1e-10 && worst_x <= 1e-8 && worst_row <= 1e-10;
  return {ok ? Status::kPass : Status::kFail, "100 configurations: max |S1 - 1| " + num(worst_one, 3) +
                                                  ", max |Sx - x| " + num(worst_x, 3) + ", max row error vs WLS " +
                                                  num(worst_row, 3)};
}

// ---------------------------------------------------------------- 6

Outcome backfit_uniqueness() {
  double worst_norm = 0.0, worst_diff = 0.0;
  int unconverged = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ies::SimScenario s;
    s.N = 5000;
    s.p = 2;
    ies::SeededRng rng(seed, 60);
    const Eigen::MatrixXd x = ies::gen_case1_predictors(s, rng);
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      y(i) = ies::true_component(0, x(i, 0)) + ies::true_component(1, x(i, 1)) + 0.5 * rng.normal();
    const ies::Dataset d(x, y, {});
    const ies::ScaledView view(d);
    ies::SeededRng pick(seed, 61);
    const auto sub = ies::ies_select(view, 256, 16, pick);
    const Eigen::MatrixXd xs = view.take_rows(sub.indices);
    const Eigen::VectorXd ys = ies::take_rows(y, sub.indices);
    const std::vector<double> h{0.2, 0.2};
    ies::FitConfig cfg;
    cfg.tolerance = 1e-12;
    cfg.max_iterations = 5000;
    const auto it = ies::backfit(xs, ys, h, cfg);
    const auto direct = ies::solve_p2(xs, ys, h, cfg);
    unconverged += !it.converged;
    worst_norm = std::max(worst_norm, direct.product_norms[0]);
    for (std::size_t j = 0; j < 2; ++j)
      worst_diff = std::max(worst_diff, (it.components[j] - direct.components[j]).cwiseAbs().maxCoeff());
  }
  const bool ok = worst_norm < 1.0 && worst_diff <= 1e-8 && unconverged == 0;
  return {ok ? Status::kPass : Status::kFail, "20 subsamples: max ||S1* S2*||_inf " + num(worst_norm) +
                                                  ", max |backfit - direct| " + num(worst_diff, 3) +
                                                  (unconverged ? ", " + std::to_string(unconverged) + " unconverged" : "")};
}

// ---------------------------------------------------------------- 7

struct MethodMedians {
  double ase = 0.0;
  double mee = 0.0;
};

std::map<std::string, MethodMedians> medians_by_method(const ies::BenchmarkReport& r) {
  std::map<std::string, std::vector<double>> ase, mee;
  for (const auto& rec : r.records) {
    ase[rec.method].push_back(rec.ase);
    mee[rec.method].push_back(rec.mee);
  }
  std::map<std::string, MethodMedians> out;
  for (const auto& [m, v] : ase) out[m] = {median(v), median(mee[m])};
  return out;
}

Outcome simulation_superiority() {
  struct Setting {
    const char* name;
    ies::CaseTag tag;
    bool misspecify;
  };
  const Setting settings[] = {{"case1", ies::CaseTag::kNormal, false},
                              {"case2", ies::CaseTag::kCopulaExponential, false},
                              {"case2+misspecified", ies::CaseTag::kCopulaExponential, true}};
  bool ok = true;
  std::string detail;
  for (const auto& st : settings) {
    ies::SimScenario s;
    s.tag = st.tag;
    s.N = 5000;
    s.misspecify = st.misspecify;
    s.seed = 7;
    ies::BenchmarkOptions o;
    o.n = 500;
    o.q = 16;
    o.replications = 30;
    o.methods = {ies::Method::kIes, ies::Method::kRandom};
    o.threads = ies::resolve_threads(0);
    const auto med = medians_by_method(ies::run_benchmark(s, o));
    const auto& a = med.at("ies");
    const auto& b = med.at("rand");
    const bool this_ok = a.ase < b.ase && a.mee < b.mee;
    ok = ok && this_ok;
    detail += std::string(detail.empty() ? "" : "; ") + st.name + ": ASE " + num(a.ase, 3) + " vs " + num(b.ase, 3) +
              ", MEE " + num(a.mee, 3) + " vs " + num(b.mee, 3) + (this_ok ? "" : " [order violated]");
  }
  return {ok ? Status::kPass : Status::kFail, "median IES vs rand, " + detail};
}

// ---------------------------------------------------------------- 8

Outcome real_data() {
  const char* path = std::getenv("IES_DIAMONDS_CSV");
  if (path == nullptr || *path == '\0')
    return {Status::kSkip, "set IES_DIAMONDS_CSV to a prepared diamonds CSV (see tools/prepare_diamonds.py)"};
  const ies::Dataset data = ies::load_csv(path, "price");
  if (data.n_rows() != 53940 || data.n_cols() != 3)
    return {Status::kFail, "expected 53940 rows and 3 predictors, got " + std::to_string(data.n_rows()) + " x " +
                               std::to_string(data.n_cols())};
  ies::BenchmarkOptions o;
  o.n = 5000;
  o.q = 16;
  o.replications = 3;
  o.seed = 8;
  o.methods = {ies::Method::kIes, ies::Method::kRandom};
  o.threads = ies::resolve_threads(0);
  const auto report = ies::run_real_benchmark(data, o);
  const auto out = std::filesystem::temp_directory_path() / "ies_acceptance_real.jsonl";
  ies::write_report(report, out);
  std::ifstream in(out);
  std::string line;
  std::map<std::string, std::vector<double>> ase;
  std::map<std::string, std::vector<double>> mee, ape, mpe;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"ase", "mee", "ave_pred_error", "max_pred_error"})
      if (!j.contains(key)) return {Status::kFail, std::string("report record lacks ") + key};
    const std::string m = j["method"];
    ase[m].push_back(j["ase"]);
    mee[m].push_back(j["mee"]);
    ape[m].push_back(j["ave_pred_error"]);
    mpe[m].push_back(j["max_pred_error"]);
  }
  const double ai = median(ase["ies"]), ar = median(ase["rand"]);
  const bool ok = ai < ar;
  return {ok ? Status::kPass : Status::kFail,
          "median ASE IES " + num(ai, 3) + " vs rand " + num(ar, 3) + "; MEE " + num(median(mee["ies"]), 3) + " vs " +
              num(median(mee["rand"]), 3) + "; AvePredError " + num(median(ape["ies"]), 3) + " vs " +
              num(median(ape["rand"]), 3) + "; MaxPredError " + num(median(mpe["ies"]), 3) + " vs " +
              num(median(mpe["rand"]), 3)};
}

// ---------------------------------------------------------------- 9

Outcome scaling() {
  auto per_point = [](std::size_t N) {
    ies::SimScenario s;
    s.N = N;
    ies::SeededRng data_rng(9, N);
    const Eigen::MatrixXd x = ies::gen_case1_predictors(s, data_rng);
    const ies::Dataset d(x, Eigen::VectorXd::Zero(x.rows()), {});
    const ies::ScaledView view(d);
    const auto cells = ies::membership_matrix(view.values(), 16);
    std::vector<double> times;
    for (int rep = 0; rep < 7; ++rep) {
      ies::SeededRng rng(static_cast<std::uint64_t>(rep), 90);
      const auto start = Clock::now();
      const auto sub = ies::ies_select(cells, 400, rng);
      times.push_back(std::chrono::duration<double>(Clock::now() - start).count() / static_cast<double>(sub.indices.size()));
    }
    return median(times);
  };
  const double t1 = per_point(10000), t2 = per_point(20000);
  const double ratio = t2 / t1;
  const bool ok = ratio >= 1.5 && ratio <= 3.0;
  return {ok ? Status::kPass : Status::kFail, "per-point time " + num(t1 * 1e6, 3) + " us at N=1e4, " + num(t2 * 1e6, 3) +
                                                  " us at N=2e4, ratio " + num(ratio, 3) + " (need [1.5, 3.0])"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "OA correctness", 5, oa_correctness},
      {2, "criterion lower bound and equality", 60, criterion_bound},
      {3, "greedy vs brute force", 30, greedy_vs_brute_force},
      {4, "subsample uniformity", 300, uniformity},
      {5, "smoother identities", 30, smoother_identities},
      {6, "backfitting uniqueness", 120, backfit_uniqueness},
      {7, "simulation superiority", 7200, simulation_superiority},
      {8, "real-data pipeline", 3600, real_data},
      {9, "selection time scaling", 120, scaling},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (o.status == Status::kPass && secs > c.limit_seconds) {
      o.status = Status::kFail;
      o.detail += "; took longer than " + num(c.limit_seconds) + " s";
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kSkip ? "SKIP" : "FAIL";
    failures += o.status == Status::kFail;
    std::printf("[%s] %d %s: %s (%.1f s)\n", tag, c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
