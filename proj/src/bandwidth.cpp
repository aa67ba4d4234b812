#include "ies/bandwidth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <string>

#include "ies/dataset.hpp"
#include "ies/error.hpp"
#include "ies/parallel.hpp"

namespace ies {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error("cannot parse '" + std::string(s) + "' as a number");
  return v;
}

// Candidate as grid indices, one per predictor.
using Candidate = std::vector<std::size_t>;

struct FoldData {
  Eigen::MatrixXd train_x;
  Eigen::VectorXd train_y;
  Eigen::MatrixXd test_x;
  Eigen::VectorXd test_y;
};

std::vector<FoldData> split_folds(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                  const std::vector<int>& labels, int folds) {
  std::vector<FoldData> out(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == f ? test : train).push_back(i);
    auto& fd = out[static_cast<std::size_t>(f)];
    fd.train_x = take_rows(x, train);
    fd.train_y = take_rows(y, train);
    fd.test_x = take_rows(x, test);
    fd.test_y = take_rows(y, test);
  }
  return out;
}

class CvEvaluator {
 public:
  CvEvaluator(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const CvSpec& spec,
              const FitConfig& cfg, SeededRng& rng)
      : spec_(spec), cfg_(cfg), p_(static_cast<std::size_t>(x.cols())) {
    const auto labels = assign_folds(static_cast<std::size_t>(x.rows()), spec.folds, rng);
    folds_ = split_folds(x, y, labels, spec.folds);
  }

  // Errors for a batch of candidates, in batch order.
  std::vector<double> evaluate(const std::vector<Candidate>& batch) const {
    std::vector<double> sse(batch.size(), 0.0);
    for (const auto& fold : folds_) {
      // Smoothers needed by this batch, built once per fold.
      std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<LocalLinearSmoother>> cache;
      for (const auto& c : batch)
        for (std::size_t j = 0; j < p_; ++j) cache.try_emplace({j, c[j]});
      std::vector<std::pair<std::size_t, std::size_t>> keys;
      for (const auto& [key, value] : cache) keys.push_back(key);
      std::vector<std::unique_ptr<LocalLinearSmoother>> built(keys.size());
      parallel_for(keys.size(), spec_.threads, [&](std::size_t k) {
        const auto [j, g] = keys[k];
        const auto col = fold.train_x.col(static_cast<Eigen::Index>(j));
        try {
          built[k] = std::make_unique<LocalLinearSmoother>(
              std::span<const double>(col.data(), static_cast<std::size_t>(col.size())),
              spec_.grid_for(j)[g], cfg_.kernel);
        } catch (const SingularSmootherError&) {
          built[k] = nullptr;
        }
      });
      for (std::size_t k = 0; k < keys.size(); ++k) cache[keys[k]] = std::move(built[k]);

      parallel_for(batch.size(), spec_.threads, [&](std::size_t b) {
        if (!std::isfinite(sse[b])) return;
        std::vector<const LocalLinearSmoother*> smoothers(p_);
        for (std::size_t j = 0; j < p_; ++j) {
          smoothers[j] = cache.at({j, batch[b][j]}).get();
          if (smoothers[j] == nullptr) {
            sse[b] = kInf;
            return;
          }
        }
        const AdditiveFit fit = backfit(smoothers, fold.train_x, fold.train_y, cfg_);
        double err = 0.0;
        std::vector<double> point(p_);
        for (Eigen::Index i = 0; i < fold.test_x.rows(); ++i) {
          for (std::size_t j = 0; j < p_; ++j) point[j] = fold.test_x(i, static_cast<Eigen::Index>(j));
          const double r = predict(fit, point) - fold.test_y(i);
          err += r * r;
        }
        sse[b] += err / static_cast<double>(fold.test_x.rows());
      });
    }
    for (auto& e : sse) e /= static_cast<double>(folds_.size());
    return sse;
  }

  std::vector<double> bandwidths(const Candidate& c) const {
    std::vector<double> h(p_);
    for (std::size_t j = 0; j < p_; ++j) h[j] = spec_.grid_for(j)[c[j]];
    return h;
  }

 private:
  const CvSpec& spec_;
  const FitConfig& cfg_;
  std::size_t p_;
  std::vector<FoldData> folds_;
};

}  // namespace

std::vector<double> CvSpec::default_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 19; ++k) g.push_back(k * 5 / 100.0);
  return g;
}

const std::vector<double>& CvSpec::grid_for(std::size_t predictor) const {
  return per_predictor_grid.empty() ? grid : per_predictor_grid.at(predictor);
}

void CvSpec::validate(std::size_t p) const {
  if (folds < 2) throw Error("cross-validation needs at least 2 folds");
  if (cycles < 1) throw Error("coordinate descent needs at least one cycle");
  if (!per_predictor_grid.empty() && per_predictor_grid.size() != p)
    throw Error("per-predictor grid count does not match the number of predictors");
  for (std::size_t j = 0; j < p; ++j) {
    const auto& g = grid_for(j);
    if (g.empty()) throw Error("bandwidth grid is empty");
    for (double h : g)
      if (!(h > 0.0 && h <= 1.0)) throw Error("bandwidth grid values must lie in (0, 1]");
  }
}

std::vector<double> parse_grid(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos) {
    // Also accept a comma-separated list.
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
      values.push_back(parse_number(piece));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return values;
  }
  const double lo = parse_number(text.substr(0, c1));
  const double hi = parse_number(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = parse_number(text.substr(c2 + 1));
  if (!(step > 0.0) || hi < lo) throw Error("grid must be lo:hi:step with step > 0 and hi >= lo");
  const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> values;
  for (int k = 0; k < count; ++k) values.push_back(std::round((lo + k * step) * 1e12) / 1e12);
  return values;
}

std::vector<int> assign_folds(std::size_t n, int folds, SeededRng& rng) {
  if (folds < 1) throw Error("fold count must be positive");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng.uniform_index(k)]);
  std::vector<int> labels(n);
  for (std::size_t r = 0; r < n; ++r) labels[order[r]] = static_cast<int>(r % static_cast<std::size_t>(folds));
  return labels;
}

CvResult cv_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const CvSpec& spec,
                   const FitConfig& cfg, SeededRng& rng) {
  const auto p = static_cast<std::size_t>(x.cols());
  spec.validate(p);
  cfg.validate();
  const auto n = static_cast<std::size_t>(x.rows());
  if (n < static_cast<std::size_t>(spec.folds) * spec.min_points_per_fold)
    throw Error("cross-validation with " + std::to_string(spec.folds) + " folds needs at least " +
                std::to_string(static_cast<std::size_t>(spec.folds) * spec.min_points_per_fold) +
                " observations, got " + std::to_string(n));

  const CvEvaluator evaluator(x, y, spec, cfg, rng);
  std::map<Candidate, double> seen;
  CvResult result;
  auto run = [&](const std::vector<Candidate>& batch) {
    std::vector<Candidate> fresh;
    for (const auto& c : batch)
      if (!seen.contains(c) && std::find(fresh.begin(), fresh.end(), c) == fresh.end()) fresh.push_back(c);
    const auto errors = evaluator.evaluate(fresh);
    for (std::size_t k = 0; k < fresh.size(); ++k) {
      seen[fresh[k]] = errors[k];
      result.table.push_back({evaluator.bandwidths(fresh[k]), errors[k]});
    }
  };

  if (spec.search == CvSearch::kFullGrid) {
    std::vector<Candidate> all{Candidate(p, 0)};
    for (std::size_t j = 0; j < p; ++j) {
      std::vector<Candidate> next;
      for (const auto& c : all)
        for (std::size_t g = 0; g < spec.grid_for(j).size(); ++g) {
          auto d = c;
          d[j] = g;
          next.push_back(std::move(d));
        }
      all = std::move(next);
    }
    run(all);
  } else {
    // Start from the widest bandwidths, which are the least likely to be singular.
    Candidate current(p);
    for (std::size_t j = 0; j < p; ++j) {
      const auto& g = spec.grid_for(j);
      current[j] = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
    }
    for (int cycle = 0; cycle < spec.cycles; ++cycle) {
      for (std::size_t j = 0; j < p; ++j) {
        std::vector<Candidate> batch;
        for (std::size_t g = 0; g < spec.grid_for(j).size(); ++g) {
          auto c = current;
          c[j] = g;
          batch.push_back(std::move(c));
        }
        run(batch);
        for (const auto& c : batch) {
          const double e = seen.at(c);
          const double best = seen.at(current);
          if (e < best || (e == best && evaluator.bandwidths(c) < evaluator.bandwidths(current)))
            current = c;
        }
      }
    }
  }

  const CvEntry* best = nullptr;
  for (const auto& entry : result.table) {
    if (!std::isfinite(entry.error)) continue;
    if (best == nullptr || entry.error < best->error ||
        (entry.error == best->error && entry.bandwidths < best->bandwidths))
      best = &entry;
  }
  if (best == nullptr)
    throw Error("every bandwidth candidate produced a singular smoother; use a grid with larger bandwidths");
  result.bandwidths = best->bandwidths;
  result.error = best->error;
  return result;
}

}  // namespace ies
