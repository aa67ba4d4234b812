#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ies/smoother.hpp"

namespace ies {

struct FitConfig {
  int max_iterations = 200;
  /// Stop once the largest absolute change of any fitted component value
  /// during a sweep falls below this.
  double tolerance = 1e-6;
  Kernel kernel{};
  /// Compute ||S_j* S_k*||_inf for every predictor pair (dense, O(n^3)).
  bool diagnostics = false;

  void validate() const;
};

/// One fitted component m_j as a function of its scaled predictor.
///
/// At a subsample value it returns the fitted component exactly. Between
/// subsample values it re-smooths the component's partial residuals with the
/// local-linear weights at the query point. Outside the subsample's range,
/// or where the local design is singular, it returns the value at the nearest
/// subsample point.
class ComponentCurve {
 public:
  ComponentCurve(std::span<const double> column, const Eigen::VectorXd& fitted,
                 const Eigen::VectorXd& partial_residual, double h, Kernel kernel,
                 double centering);

  double operator()(double x) const;
  double min_knot() const { return unique_.front(); }
  double max_knot() const { return unique_.back(); }

 private:
  double nearest_knot_value(double x) const;

  std::vector<double> unique_;
  std::vector<double> counts_;
  std::vector<double> residual_sums_;
  std::vector<double> knot_values_;
  double n_;
  double h_;
  Kernel kernel_;
  double centering_;
};

struct AdditiveFit {
  double mu_hat = 0.0;
  std::vector<Eigen::VectorXd> components;  // m_j at the subsample points
  std::vector<double> bandwidths;
  int iterations = 0;
  bool converged = false;
  double max_update = 0.0;
  /// ||S_j* S_k*||_inf for j < k in row-major pair order; empty unless requested.
  std::vector<double> product_norms;
  std::vector<ComponentCurve> curves;

  std::size_t n() const { return components.empty() ? 0 : static_cast<std::size_t>(components[0].size()); }
  std::size_t p() const { return components.size(); }
};

/// Gauss-Seidel backfitting with local-linear smoothers on scaled predictors
/// x (n x p). mu is the response mean; every update is centered.
/// Non-convergence is reported through `converged`, not thrown.
/// Throws SingularSmootherError if a smoother cannot be built.
AdditiveFit backfit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const double> h,
                    const FitConfig& cfg = {});

/// Same, with smoothers already built (one per column of x).
AdditiveFit backfit(std::span<const LocalLinearSmoother* const> smoothers, const Eigen::MatrixXd& x,
                    const Eigen::VectorXd& y, const FitConfig& cfg = {});

/// Direct solution of the two-predictor estimation equation:
/// (I - S1* S2*) m1 = S1* (I - S2*) Y and symmetrically for m2.
AdditiveFit solve_p2(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const double> h,
                     const FitConfig& cfg = {});

/// Maximum absolute row sum of a * b.
double norm_inf_product(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// mu + sum_j m_j(x_new[j]) on scaled coordinates.
double predict(const AdditiveFit& fit, std::span<const double> x_new);

}  // namespace ies
