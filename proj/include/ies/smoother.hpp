#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ies/error.hpp"

namespace ies {

enum class KernelType { kEpanechnikov, kTriangular };

/// Symmetric density supported on [-1, 1].
class Kernel {
 public:
  constexpr Kernel(KernelType type = KernelType::kEpanechnikov) : type_(type) {}

  double operator()(double u) const;
  KernelType type() const { return type_; }
  std::string_view name() const;

  /// "epanechnikov" or "triangular".
  static Kernel from_name(std::string_view name);

 private:
  KernelType type_;
};

/// 0.75 (1 - u^2)_+
double epanechnikov(double u);
/// (1 - |u|)_+
double triangular(double u);

struct KernelMoments {
  double v0 = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
};

/// V_t(x) = (1/n) sum_i (1/h) K((x_i - x)/h) (x_i - x)^t for t = 0, 1, 2.
KernelMoments kernel_moments(std::span<const double> points, double x, double h,
                             Kernel kernel = {});
double kernel_moment(std::span<const double> points, double x, double h, int t,
                     Kernel kernel = {});

/// Raised when the local design at some point cannot support a linear fit
/// (too few distinct values inside the bandwidth).
class SingularSmootherError : public Error {
 public:
  SingularSmootherError(double location, double bandwidth);
  double location() const { return location_; }
  double bandwidth() const { return bandwidth_; }

 private:
  double location_;
  double bandwidth_;
};

/// Relative floor on the local-design determinant V0 V2 - V1^2.
inline constexpr double kSingularityEpsilon = 1e-12;

/// Local-linear weights at x over sorted distinct values `uniq` (with
/// multiplicities `counts`, n observations in total). On success fills
/// `weights` for the contiguous index range [lo, hi) of values within one
/// bandwidth of x; each weight applies to a single observation at that value.
bool local_linear_weights(double x, std::span<const double> uniq, std::span<const double> counts,
                          double n, double h, Kernel kernel, std::size_t& lo, std::size_t& hi,
                          std::vector<double>& weights);

/// Local-linear smoother S for one predictor column: (S v)_i is the
/// degree-one kernel-weighted fit of v at x_i, with all moments evaluated at
/// the fit point x_i.
///
/// Rows depend only on the value x_i, so weights are stored once per distinct
/// value and only over the band |x_j - x_i| <= h. Applying S costs O(n) plus
/// the band size. Immutable after construction.
class LocalLinearSmoother {
 public:
  /// Throws SingularSmootherError if any fit point has a singular local design.
  LocalLinearSmoother(std::span<const double> values, double h, Kernel kernel = {});

  std::size_t size() const { return group_.size(); }
  double bandwidth() const { return h_; }
  Kernel kernel() const { return kernel_; }
  std::span<const double> unique_values() const { return unique_; }
  std::span<const double> counts() const { return counts_; }
  /// Index into unique_values() of each observation.
  std::span<const std::size_t> group() const { return group_; }

  /// Sum of v over each distinct value.
  std::vector<double> group_sums(std::span<const double> v) const;

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  /// (I - 11'/n) S v
  Eigen::VectorXd apply_centered(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd dense() const;

 private:
  double h_;
  Kernel kernel_;
  std::vector<double> unique_;
  std::vector<double> counts_;
  std::vector<std::size_t> group_;
  std::vector<std::size_t> band_lo_;
  std::vector<std::size_t> band_offset_;  // into weights_, size unique_+1
  std::vector<double> weights_;
};

/// Dense smoother matrix for diagnostics and the direct two-predictor solve.
struct SmootherMatrix {
  Eigen::MatrixXd entries;
  double bandwidth = 0.0;
  std::size_t column = 0;
  bool centered = false;
};

SmootherMatrix smoother_matrix(std::span<const double> values, double h, Kernel kernel = {},
                               std::size_t column = 0);

/// Premultiplies by the centering projector I - 11'/n.
Eigen::MatrixXd center(const Eigen::MatrixXd& s);
SmootherMatrix center(const SmootherMatrix& s);

}  // namespace ies
