#include "ies/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ies/error.hpp"

namespace ies {
namespace {

inline int cell_of(double x, int q) {
  return std::min(static_cast<int>(std::floor(x * q)), q - 1);
}

}  // namespace

std::vector<int> membership(std::span<const double> x, int q) {
  if (q < 1) throw Error("membership resolution q must be positive");
  std::vector<int> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!(x[j] >= 0.0 && x[j] <= 1.0))
      throw Error("coordinate " + std::to_string(j) + " = " + std::to_string(x[j]) +
                  " lies outside [0, 1]; scale predictors first");
    z[j] = cell_of(x[j], q);
  }
  return z;
}

MembershipMatrix membership_matrix(const Eigen::MatrixXd& scaled, int q) {
  if (q < 1) throw Error("membership resolution q must be positive");
  const auto n = static_cast<std::size_t>(scaled.rows());
  const auto p = static_cast<std::size_t>(scaled.cols());
  MembershipMatrix m(n, p, q);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double x = scaled(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (!(x >= 0.0 && x <= 1.0))
        throw Error("scaled value outside [0, 1] at row " + std::to_string(i) + ", column " +
                    std::to_string(j));
      m(i, j) = cell_of(x, q);
    }
  }
  return m;
}

int delta(std::span<const int> z, std::span<const int> w) {
  if (z.size() != w.size())
    throw Error("delta: cell vectors have different lengths (" + std::to_string(z.size()) +
                " vs " + std::to_string(w.size()) + ")");
  int count = 0;
  for (std::size_t j = 0; j < z.size(); ++j) count += static_cast<int>(z[j] == w[j]);
  return count;
}

CriterionValue criterion_l(const MembershipMatrix& m) {
  CriterionValue v;
  v.n = m.rows();
  v.p = m.cols();
  v.q = m.q();
  const std::size_t p = m.cols();
  const int* data = m.data().data();
  std::int64_t total = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const int* zi = data + i * p;
    for (std::size_t k = i + 1; k < m.rows(); ++k) {
      const int* zk = data + k * p;
      std::int64_t d = 0;
      for (std::size_t j = 0; j < p; ++j) d += (zi[j] == zk[j]);
      total += d * d;
    }
  }
  v.L = total;
  const auto n = static_cast<std::int64_t>(v.n);
  const auto pp = static_cast<std::int64_t>(v.p);
  v.lower_bound = lower_bound_weak(n, pp, v.q);
  if (n % (static_cast<std::int64_t>(v.q) * v.q) == 0)
    v.lower_bound_exact = lower_bound_exact(n, pp, v.q);
  v.gap = Rational(v.L) - v.lower_bound;
  return v;
}

Rational lower_bound_exact(std::int64_t n, std::int64_t p, std::int64_t q) {
  if (q < 1 || n < 1 || p < 1) throw Error("lower_bound_exact: n, p, q must be positive");
  if (n % (q * q) != 0)
    throw Error("lower_bound_exact: n=" + std::to_string(n) + " is not a multiple of q^2=" +
                std::to_string(q * q) + "; use the weak-strength bound");
  return Rational(n, 2 * q * q) * Rational(n * p * (p + q - 1) - (p * q) * (p * q));
}

std::int64_t h_func(std::int64_t a, std::int64_t b) {
  if (a < 0 || b < 1) throw Error("h(a, b) needs a >= 0 and b >= 1");
  const std::int64_t f = a / b;
  return f * f * b + (2 * f + 1) * (a - f * b);
}

Rational lower_bound_weak(std::int64_t n, std::int64_t p, std::int64_t q) {
  if (q < 1 || n < 0 || p < 1) throw Error("lower_bound_weak: bad arguments");
  return Rational(p * (p - 1) * h_func(n, q * q) + p * h_func(n, q) - n * p * p, 2);
}

}  // namespace ies
