#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ies/backfit.hpp"
#include "ies/rng.hpp"

namespace ies {

enum class CvSearch { kCoordinateDescent, kFullGrid };

struct CvSpec {
  int folds = 5;
  /// Candidate bandwidths on scaled coordinates, shared by every predictor
  /// unless per_predictor_grid is set.
  std::vector<double> grid = default_grid();
  std::vector<std::vector<double>> per_predictor_grid;
  CvSearch search = CvSearch::kCoordinateDescent;
  int cycles = 2;
  std::size_t min_points_per_fold = 10;
  int threads = 1;

  /// {0.05, 0.10, ..., 0.95}
  static std::vector<double> default_grid();
  const std::vector<double>& grid_for(std::size_t predictor) const;
  void validate(std::size_t p) const;
};

/// Parses "lo:hi:step" into an inclusive arithmetic grid.
std::vector<double> parse_grid(std::string_view text);

struct CvEntry {
  std::vector<double> bandwidths;
  /// Mean over folds of held-out mean squared error; +inf when a smoother
  /// was singular for some fold.
  double error = 0.0;
};

struct CvResult {
  std::vector<double> bandwidths;
  double error = 0.0;
  /// Every evaluated candidate, in evaluation order.
  std::vector<CvEntry> table;
};

/// Shuffled fold labels: fold sizes differ by at most one.
std::vector<int> assign_folds(std::size_t n, int folds, SeededRng& rng);

/// K-fold cross-validated bandwidth choice. Ties go to the lexicographically
/// smallest bandwidth vector. Throws if every candidate is singular.
CvResult cv_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const CvSpec& spec,
                   const FitConfig& cfg, SeededRng& rng);

}  // namespace ies
