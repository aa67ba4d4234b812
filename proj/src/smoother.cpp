#include "ies/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace ies {

double epanechnikov(double u) { return 0.75 * std::max(0.0, 1.0 - u * u); }

double triangular(double u) { return std::max(0.0, 1.0 - std::abs(u)); }

double Kernel::operator()(double u) const {
  return type_ == KernelType::kEpanechnikov ? epanechnikov(u) : triangular(u);
}

std::string_view Kernel::name() const {
  return type_ == KernelType::kEpanechnikov ? "epanechnikov" : "triangular";
}

Kernel Kernel::from_name(std::string_view name) {
  if (name == "epanechnikov") return Kernel(KernelType::kEpanechnikov);
  if (name == "triangular") return Kernel(KernelType::kTriangular);
  throw Error("unknown kernel '" + std::string(name) + "' (expected epanechnikov or triangular)");
}

KernelMoments kernel_moments(std::span<const double> points, double x, double h, Kernel kernel) {
  if (!(h > 0.0)) throw Error("bandwidth must be positive");
  if (points.empty()) throw Error("kernel moments need at least one point");
  KernelMoments m;
  for (double xi : points) {
    const double d = xi - x;
    const double k = kernel(d / h) / h;
    m.v0 += k;
    m.v1 += k * d;
    m.v2 += k * d * d;
  }
  const auto n = static_cast<double>(points.size());
  m.v0 /= n;
  m.v1 /= n;
  m.v2 /= n;
  return m;
}

double kernel_moment(std::span<const double> points, double x, double h, int t, Kernel kernel) {
  const auto m = kernel_moments(points, x, h, kernel);
  switch (t) {
    case 0: return m.v0;
    case 1: return m.v1;
    case 2: return m.v2;
    default: throw Error("kernel moment order must be 0, 1 or 2");
  }
}

namespace {

std::string singular_message(double location, double bandwidth) {
  std::ostringstream os;
  os << "local-linear design is singular at x=" << location << " with bandwidth h=" << bandwidth
     << "; too few distinct points within h (try a larger bandwidth)";
  return os.str();
}

}  // namespace

SingularSmootherError::SingularSmootherError(double location, double bandwidth)
    : Error(singular_message(location, bandwidth)), location_(location), bandwidth_(bandwidth) {}

bool local_linear_weights(double x, std::span<const double> uniq, std::span<const double> counts,
                          double n, double h, Kernel kernel, std::size_t& lo, std::size_t& hi,
                          std::vector<double>& weights) {
  lo = static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), x - h) - uniq.begin());
  hi = static_cast<std::size_t>(std::upper_bound(uniq.begin(), uniq.end(), x + h) - uniq.begin());
  weights.resize(hi - lo);
  // Moments in the dimensionless offset s = (x_j - x) / h; the common
  // factors of h cancel in the weight ratio.
  double v0 = 0.0, v1 = 0.0, v2 = 0.0;
  const double scale = 1.0 / (n * h);
  for (std::size_t b = lo; b < hi; ++b) {
    const double s = (uniq[b] - x) / h;
    const double k = kernel(s) * scale;
    weights[b - lo] = k;
    const double ck = counts[b] * k;
    v0 += ck;
    v1 += ck * s;
    v2 += ck * s * s;
  }
  const double det = v0 * v2 - v1 * v1;
  if (!(v0 > 0.0) || !(det > kSingularityEpsilon * v0 * v2)) return false;
  for (std::size_t b = lo; b < hi; ++b) {
    const double s = (uniq[b] - x) / h;
    weights[b - lo] *= (v2 - s * v1) / det;
  }
  return true;
}

LocalLinearSmoother::LocalLinearSmoother(std::span<const double> values, double h, Kernel kernel)
    : h_(h), kernel_(kernel) {
  if (!(h > 0.0)) throw Error("bandwidth must be positive, got " + std::to_string(h));
  if (values.empty()) throw Error("smoother needs at least one point");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  group_.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double v = values[order[r]];
    if (unique_.empty() || v != unique_.back()) {
      unique_.push_back(v);
      counts_.push_back(0.0);
    }
    counts_.back() += 1.0;
    group_[order[r]] = unique_.size() - 1;
  }

  const std::size_t u = unique_.size();
  band_lo_.resize(u);
  band_offset_.assign(u + 1, 0);
  std::vector<double> w;
  for (std::size_t a = 0; a < u; ++a) {
    std::size_t lo, hi;
    if (!local_linear_weights(unique_[a], unique_, counts_, static_cast<double>(n), h_, kernel_,
                              lo, hi, w))
      throw SingularSmootherError(unique_[a], h_);
    band_lo_[a] = lo;
    band_offset_[a + 1] = band_offset_[a] + (hi - lo);
    weights_.insert(weights_.end(), w.begin(), w.end());
  }
}

std::vector<double> LocalLinearSmoother::group_sums(std::span<const double> v) const {
  if (v.size() != group_.size()) throw Error("smoother applied to a vector of the wrong length");
  std::vector<double> sums(unique_.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) sums[group_[i]] += v[i];
  return sums;
}

Eigen::VectorXd LocalLinearSmoother::apply(const Eigen::VectorXd& v) const {
  const auto sums = group_sums(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
  std::vector<double> fitted(unique_.size());
  for (std::size_t a = 0; a < unique_.size(); ++a) {
    const double* w = weights_.data() + band_offset_[a];
    const double* r = sums.data() + band_lo_[a];
    const std::size_t len = band_offset_[a + 1] - band_offset_[a];
    double acc = 0.0;
    for (std::size_t b = 0; b < len; ++b) acc += w[b] * r[b];
    fitted[a] = acc;
  }
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < group_.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = fitted[group_[i]];
  return out;
}

Eigen::VectorXd LocalLinearSmoother::apply_centered(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out = apply(v);
  out.array() -= out.mean();
  return out;
}

Eigen::MatrixXd LocalLinearSmoother::dense() const {
  const auto n = static_cast<Eigen::Index>(group_.size());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t a = group_[static_cast<std::size_t>(i)];
    const std::size_t lo = band_lo_[a];
    const std::size_t len = band_offset_[a + 1] - band_offset_[a];
    for (Eigen::Index j = 0; j < n; ++j) {
      const std::size_t b = group_[static_cast<std::size_t>(j)];
      if (b >= lo && b < lo + len) s(i, j) = weights_[band_offset_[a] + (b - lo)];
    }
  }
  return s;
}

SmootherMatrix smoother_matrix(std::span<const double> values, double h, Kernel kernel,
                               std::size_t column) {
  return {LocalLinearSmoother(values, h, kernel).dense(), h, column, false};
}

Eigen::MatrixXd center(const Eigen::MatrixXd& s) {
  return s.rowwise() - s.colwise().mean();
}

SmootherMatrix center(const SmootherMatrix& s) {
  return {center(s.entries), s.bandwidth, s.column, true};
}

}  // namespace ies
