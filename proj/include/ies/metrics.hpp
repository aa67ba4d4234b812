#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ies/backfit.hpp"

namespace ies {

/// Tensor test grid: `per_axis` evenly spaced points from lo[j] to hi[j] on
/// each predictor, in original units.
struct GridSpec {
  std::vector<double> lo;
  std::vector<double> hi;
  int per_axis = 40;

  /// The simulation grid: [-1.8, 1.8] on every axis.
  static GridSpec simulation(std::size_t p, int per_axis = 40);

  std::size_t dims() const { return lo.size(); }
  std::size_t size() const;
  std::vector<double> axis(std::size_t j) const;
  /// Throws if lo/hi disagree in length, per_axis < 2, lo > hi, or the grid
  /// leaves the box [domain_lo, domain_hi].
  void validate(std::span<const double> domain_lo, std::span<const double> domain_hi) const;
};

/// Maps original predictor units onto the scale a fit was trained on.
struct AxisScaling {
  Eigen::VectorXd offset;
  Eigen::VectorXd width;  // scaled = (x - offset) / width; width 0 maps to 0

  double scale(std::size_t j, double x) const;
};

/// Values of an additive fit at every grid point (last axis fastest), using
/// one evaluation per axis value and the additive structure.
Eigen::VectorXd evaluate_on_grid(const AdditiveFit& fit, const AxisScaling& scaling, const GridSpec& grid);

/// Values of an arbitrary function of the original predictors at every grid point.
Eigen::VectorXd evaluate_on_grid(const std::function<double(std::span<const double>)>& f, const GridSpec& grid);

struct MeeAse {
  double mee = 0.0;  // max |fit - truth|
  double ase = 0.0;  // mean (fit - truth)^2
};

MeeAse metric_mee_ase(const Eigen::VectorXd& fitted, const Eigen::VectorXd& truth);
MeeAse metric_mee_ase(const AdditiveFit& fit, const AxisScaling& scaling,
                      const std::function<double(std::span<const double>)>& truth, const GridSpec& grid);
MeeAse metric_mee_ase(const AdditiveFit& fit, const AxisScaling& fit_scaling, const AdditiveFit& reference,
                      const AxisScaling& reference_scaling, const GridSpec& grid);

/// For each column pair (j < k, row-major), the largest |F_n(a, b) - a b| over
/// a, b in {0, 1/g, ..., 1}, where F_n is the empirical joint CDF of the
/// points (assumed in [0, 1]^p).
std::vector<double> metric_cdf_deviation(const Eigen::MatrixXd& points, int g = 64);

/// Pearson correlation of every column pair (j < k, row-major); 0 for a constant column.
std::vector<double> pairwise_correlations(const Eigen::MatrixXd& x);
double max_abs_correlation(const Eigen::MatrixXd& x);

/// Median and quartiles by linear interpolation between order statistics.
struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
};
Quartiles quartiles(std::vector<double> values);

}  // namespace ies
