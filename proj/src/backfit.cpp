#include "ies/backfit.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "ies/error.hpp"

namespace ies {
namespace {

std::span<const double> column_span(const Eigen::MatrixXd& x, Eigen::Index j) {
  return {x.col(j).data(), static_cast<std::size_t>(x.rows())};
}

void check_inputs(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::size_t n_bandwidths) {
  if (x.rows() < 2) throw Error("fitting needs at least two observations");
  if (y.size() != x.rows()) throw Error("response length does not match predictor rows");
  if (n_bandwidths != static_cast<std::size_t>(x.cols()))
    throw Error("expected " + std::to_string(x.cols()) + " bandwidths, got " +
                std::to_string(n_bandwidths));
}

std::vector<double> product_norms(const std::vector<Eigen::MatrixXd>& centered) {
  std::vector<double> norms;
  for (std::size_t j = 0; j < centered.size(); ++j)
    for (std::size_t k = j + 1; k < centered.size(); ++k)
      norms.push_back(norm_inf_product(centered[j], centered[k]));
  return norms;
}

}  // namespace

void FitConfig::validate() const {
  if (max_iterations < 1) throw Error("max iterations must be at least 1");
  if (!(tolerance > 0.0)) throw Error("convergence tolerance must be positive");
}

ComponentCurve::ComponentCurve(std::span<const double> column, const Eigen::VectorXd& fitted,
                               const Eigen::VectorXd& partial_residual, double h, Kernel kernel,
                               double centering)
    : n_(static_cast<double>(column.size())), h_(h), kernel_(kernel), centering_(centering) {
  std::vector<std::size_t> order(column.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });
  for (std::size_t i : order) {
    const double v = column[i];
    if (unique_.empty() || v != unique_.back()) {
      unique_.push_back(v);
      counts_.push_back(0.0);
      residual_sums_.push_back(0.0);
      knot_values_.push_back(fitted(static_cast<Eigen::Index>(i)));
    }
    counts_.back() += 1.0;
    residual_sums_.back() += partial_residual(static_cast<Eigen::Index>(i));
  }
}

double ComponentCurve::nearest_knot_value(double x) const {
  const auto it = std::lower_bound(unique_.begin(), unique_.end(), x);
  if (it == unique_.begin()) return knot_values_.front();
  if (it == unique_.end()) return knot_values_.back();
  const auto hi = static_cast<std::size_t>(it - unique_.begin());
  const std::size_t lo = hi - 1;
  return (x - unique_[lo] <= unique_[hi] - x) ? knot_values_[lo] : knot_values_[hi];
}

double ComponentCurve::operator()(double x) const {
  if (x <= unique_.front()) return knot_values_.front();
  if (x >= unique_.back()) return knot_values_.back();
  const auto it = std::lower_bound(unique_.begin(), unique_.end(), x);
  if (*it == x) return knot_values_[static_cast<std::size_t>(it - unique_.begin())];
  std::size_t lo, hi;
  thread_local std::vector<double> w;
  if (!local_linear_weights(x, unique_, counts_, n_, h_, kernel_, lo, hi, w))
    return nearest_knot_value(x);
  double acc = 0.0;
  for (std::size_t b = lo; b < hi; ++b) acc += w[b - lo] * residual_sums_[b];
  return acc - centering_;
}

AdditiveFit backfit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const double> h,
                    const FitConfig& cfg) {
  check_inputs(x, y, h.size());
  std::vector<std::unique_ptr<LocalLinearSmoother>> owned;
  std::vector<const LocalLinearSmoother*> smoothers;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    owned.push_back(std::make_unique<LocalLinearSmoother>(column_span(x, j),
                                                          h[static_cast<std::size_t>(j)], cfg.kernel));
    smoothers.push_back(owned.back().get());
  }
  return backfit(smoothers, x, y, cfg);
}

AdditiveFit backfit(std::span<const LocalLinearSmoother* const> smoothers, const Eigen::MatrixXd& x,
                    const Eigen::VectorXd& y, const FitConfig& cfg) {
  cfg.validate();
  check_inputs(x, y, smoothers.size());
  const auto n = x.rows();
  const auto p = static_cast<std::size_t>(x.cols());
  for (const auto* s : smoothers)
    if (s == nullptr || s->size() != static_cast<std::size_t>(n))
      throw Error("smoother does not match the subsample size");

  AdditiveFit fit;
  fit.mu_hat = y.mean();
  const Eigen::VectorXd yc = y.array() - fit.mu_hat;
  fit.components.assign(p, Eigen::VectorXd::Zero(n));
  std::vector<Eigen::VectorXd> residuals(p, Eigen::VectorXd::Zero(n));
  std::vector<double> centering(p, 0.0);
  for (const auto* s : smoothers) fit.bandwidths.push_back(s->bandwidth());

  Eigen::VectorXd total = Eigen::VectorXd::Zero(n);
  for (int sweep = 1; sweep <= cfg.max_iterations; ++sweep) {
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      auto& m = fit.components[j];
      residuals[j] = yc - (total - m);
      Eigen::VectorXd updated = smoothers[j]->apply(residuals[j]);
      centering[j] = updated.mean();
      updated.array() -= centering[j];
      max_change = std::max(max_change, (updated - m).cwiseAbs().maxCoeff());
      total += updated - m;
      m = std::move(updated);
    }
    // Refresh the running sum so rounding does not accumulate across sweeps.
    total.setZero();
    for (const auto& m : fit.components) total += m;
    fit.iterations = sweep;
    fit.max_update = max_change;
    if (p == 1 || max_change < cfg.tolerance) {
      fit.converged = true;
      break;
    }
  }

  for (std::size_t j = 0; j < p; ++j)
    fit.curves.emplace_back(column_span(x, static_cast<Eigen::Index>(j)), fit.components[j],
                            residuals[j], fit.bandwidths[j], cfg.kernel, centering[j]);
  if (cfg.diagnostics) {
    std::vector<Eigen::MatrixXd> centered;
    for (const auto* s : smoothers) centered.push_back(center(s->dense()));
    fit.product_norms = product_norms(centered);
  }
  return fit;
}

AdditiveFit solve_p2(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const double> h,
                     const FitConfig& cfg) {
  if (x.cols() != 2) throw Error("the direct solve handles exactly two predictors");
  check_inputs(x, y, h.size());
  const auto n = x.rows();
  const LocalLinearSmoother s1(column_span(x, 0), h[0], cfg.kernel);
  const LocalLinearSmoother s2(column_span(x, 1), h[1], cfg.kernel);
  const Eigen::MatrixXd c1 = center(s1.dense());
  const Eigen::MatrixXd c2 = center(s2.dense());
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);

  AdditiveFit fit;
  fit.mu_hat = y.mean();
  const Eigen::VectorXd yc = y.array() - fit.mu_hat;

  auto solve = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) -> Eigen::VectorXd {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(identity - a * b);
    if (!(lu.rcond() > 1e-12))
      throw Error("backfitting system I - S1* S2* is numerically singular; increase the bandwidths");
    return lu.solve(a * (yc - b * yc));
  };
  fit.components = {solve(c1, c2), solve(c2, c1)};
  fit.bandwidths = {h[0], h[1]};
  fit.iterations = 0;
  fit.converged = true;
  fit.product_norms = {norm_inf_product(c1, c2)};

  const Eigen::VectorXd r1 = yc - fit.components[1];
  const Eigen::VectorXd r2 = yc - fit.components[0];
  fit.curves.emplace_back(column_span(x, 0), fit.components[0], r1, h[0], cfg.kernel,
                          s1.apply(r1).mean());
  fit.curves.emplace_back(column_span(x, 1), fit.components[1], r2, h[1], cfg.kernel,
                          s2.apply(r2).mean());
  return fit;
}

double norm_inf_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.rows()) throw Error("norm_inf_product: dimension mismatch");
  if (a.rows() == 0) return 0.0;
  return (a * b).cwiseAbs().rowwise().sum().maxCoeff();
}

double predict(const AdditiveFit& fit, std::span<const double> x_new) {
  if (x_new.size() != fit.curves.size())
    throw Error("prediction point has " + std::to_string(x_new.size()) + " coordinates, model has " +
                std::to_string(fit.curves.size()));
  double value = fit.mu_hat;
  for (std::size_t j = 0; j < x_new.size(); ++j) value += fit.curves[j](x_new[j]);
  return value;
}

}  // namespace ies
