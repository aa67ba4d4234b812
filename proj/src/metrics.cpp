#include "ies/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ies/error.hpp"

namespace ies {
namespace {

// Calls fn(flat index, per-axis indices) over the grid, last axis fastest.
template <typename Fn>
void for_each_grid_point(const GridSpec& grid, Fn&& fn) {
  const std::size_t p = grid.dims();
  const auto m = static_cast<std::size_t>(grid.per_axis);
  std::vector<std::size_t> idx(p, 0);
  const std::size_t total = grid.size();
  for (std::size_t flat = 0; flat < total; ++flat) {
    fn(flat, idx);
    for (std::size_t j = p; j-- > 0;) {
      if (++idx[j] < m) break;
      idx[j] = 0;
    }
  }
}

}  // namespace

GridSpec GridSpec::simulation(std::size_t p, int per_axis) {
  return GridSpec{std::vector<double>(p, -1.8), std::vector<double>(p, 1.8), per_axis};
}

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (std::size_t j = 0; j < dims(); ++j) total *= static_cast<std::size_t>(per_axis);
  return total;
}

std::vector<double> GridSpec::axis(std::size_t j) const {
  std::vector<double> a(static_cast<std::size_t>(per_axis));
  for (int k = 0; k < per_axis; ++k) {
    const double t = static_cast<double>(k) / (per_axis - 1);
    a[static_cast<std::size_t>(k)] = k == per_axis - 1 ? hi[j] : lo[j] + t * (hi[j] - lo[j]);
  }
  return a;
}

void GridSpec::validate(std::span<const double> domain_lo, std::span<const double> domain_hi) const {
  if (lo.size() != hi.size() || lo.empty()) throw Error("grid bounds must be non-empty and of equal length");
  if (per_axis < 2) throw Error("grid needs at least 2 points per axis");
  if (domain_lo.size() != lo.size() || domain_hi.size() != lo.size())
    throw Error("grid has " + std::to_string(lo.size()) + " axes but the domain has " +
                std::to_string(domain_lo.size()));
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (!(lo[j] <= hi[j])) throw Error("grid axis " + std::to_string(j) + " has lo > hi");
    if (lo[j] < domain_lo[j] || hi[j] > domain_hi[j])
      throw Error("grid axis " + std::to_string(j) + " [" + std::to_string(lo[j]) + ", " + std::to_string(hi[j]) +
                  "] leaves the domain [" + std::to_string(domain_lo[j]) + ", " + std::to_string(domain_hi[j]) + "]");
  }
}

double AxisScaling::scale(std::size_t j, double x) const {
  const auto k = static_cast<Eigen::Index>(j);
  return width(k) > 0.0 ? (x - offset(k)) / width(k) : 0.0;
}

Eigen::VectorXd evaluate_on_grid(const AdditiveFit& fit, const AxisScaling& scaling, const GridSpec& grid) {
  if (grid.dims() != fit.p()) throw Error("grid and fit disagree on the number of predictors");
  std::vector<std::vector<double>> tables(grid.dims());
  for (std::size_t j = 0; j < grid.dims(); ++j)
    for (double v : grid.axis(j)) tables[j].push_back(fit.curves[j](scaling.scale(j, v)));
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  for_each_grid_point(grid, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
    double v = fit.mu_hat;
    for (std::size_t j = 0; j < idx.size(); ++j) v += tables[j][idx[j]];
    out(static_cast<Eigen::Index>(flat)) = v;
  });
  return out;
}

Eigen::VectorXd evaluate_on_grid(const std::function<double(std::span<const double>)>& f, const GridSpec& grid) {
  std::vector<std::vector<double>> axes(grid.dims());
  for (std::size_t j = 0; j < grid.dims(); ++j) axes[j] = grid.axis(j);
  Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
  std::vector<double> point(grid.dims());
  for_each_grid_point(grid, [&](std::size_t flat, const std::vector<std::size_t>& idx) {
    for (std::size_t j = 0; j < idx.size(); ++j) point[j] = axes[j][idx[j]];
    out(static_cast<Eigen::Index>(flat)) = f(point);
  });
  return out;
}

MeeAse metric_mee_ase(const Eigen::VectorXd& fitted, const Eigen::VectorXd& truth) {
  if (fitted.size() != truth.size() || fitted.size() == 0)
    throw Error("fitted and true grid values must be non-empty and of equal length");
  const Eigen::ArrayXd diff = (fitted - truth).array();
  return {diff.abs().maxCoeff(), diff.square().mean()};
}

MeeAse metric_mee_ase(const AdditiveFit& fit, const AxisScaling& scaling,
                      const std::function<double(std::span<const double>)>& truth, const GridSpec& grid) {
  return metric_mee_ase(evaluate_on_grid(fit, scaling, grid), evaluate_on_grid(truth, grid));
}

MeeAse metric_mee_ase(const AdditiveFit& fit, const AxisScaling& fit_scaling, const AdditiveFit& reference,
                      const AxisScaling& reference_scaling, const GridSpec& grid) {
  return metric_mee_ase(evaluate_on_grid(fit, fit_scaling, grid), evaluate_on_grid(reference, reference_scaling, grid));
}

std::vector<double> metric_cdf_deviation(const Eigen::MatrixXd& points, int g) {
  if (g < 2) throw Error("CDF grid resolution must be at least 2");
  const auto n = points.rows();
  const auto p = points.cols();
  const auto side = static_cast<std::size_t>(g) + 1;
  // Bin b holds values in ((b-1)/g, b/g], so the cumulative count at b is F_n(b/g).
  auto bin = [g](double v) {
    const double c = std::ceil(v * g);
    return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(g)));
  };
  std::vector<double> out;
  std::vector<double> counts(side * side);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = j + 1; k < p; ++k) {
      std::fill(counts.begin(), counts.end(), 0.0);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double a = points(i, j), b = points(i, k);
        if (a > 1.0 || b > 1.0) continue;  // never counted at any grid point
        counts[bin(a) * side + bin(b)] += 1.0;
      }
      for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b) {
          double c = counts[a * side + b];
          if (a > 0) c += counts[(a - 1) * side + b];
          if (b > 0) c += counts[a * side + b - 1];
          if (a > 0 && b > 0) c -= counts[(a - 1) * side + b - 1];
          counts[a * side + b] = c;
        }
      double worst = 0.0;
      for (std::size_t a = 0; a < side; ++a)
        for (std::size_t b = 0; b < side; ++b) {
          const double fa = static_cast<double>(a) / g, fb = static_cast<double>(b) / g;
          worst = std::max(worst, std::abs(counts[a * side + b] / static_cast<double>(n) - fa * fb));
        }
      out.push_back(worst);
    }
  }
  return out;
}

std::vector<double> pairwise_correlations(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  const Eigen::VectorXd norms = c.colwise().norm();
  std::vector<double> out;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index k = j + 1; k < x.cols(); ++k) {
      const double d = norms(j) * norms(k);
      out.push_back(d > 0.0 ? std::clamp(c.col(j).dot(c.col(k)) / d, -1.0, 1.0) : 0.0);
    }
  return out;
}

double max_abs_correlation(const Eigen::MatrixXd& x) {
  double m = 0.0;
  for (double r : pairwise_correlations(x)) m = std::max(m, std::abs(r));
  return m;
}

Quartiles quartiles(std::vector<double> values) {
  if (values.empty()) throw Error("quartiles of an empty sample");
  std::sort(values.begin(), values.end());
  auto at = [&](double prob) {
    const double pos = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

}  // namespace ies
