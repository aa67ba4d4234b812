#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/rational.hpp>

#include "ies/orthogonal_array.hpp"

namespace ies {

using Rational = boost::rational<std::int64_t>;

/// Cell indices z_ij = floor(x_ij * q) of scaled points, stored as levels.
using MembershipMatrix = LevelMatrix;

/// Cell vector of one scaled point; x_j == 1 maps to q - 1.
/// Throws if any coordinate lies outside [0, 1].
std::vector<int> membership(std::span<const double> x, int q);

/// Membership of every row of an n x p matrix of scaled values.
MembershipMatrix membership_matrix(const Eigen::MatrixXd& scaled, int q);

/// Number of coordinates on which two cell vectors coincide.
int delta(std::span<const int> z, std::span<const int> w);

struct CriterionValue {
  std::int64_t L = 0;
  std::size_t n = 0;
  std::size_t p = 0;
  int q = 0;
  Rational lower_bound;                       // weak-strength bound, always valid
  std::optional<Rational> lower_bound_exact;  // only when q^2 divides n
  Rational gap;                               // L - lower_bound
};

/// Sum of squared coincidence counts over all unordered row pairs, plus the
/// lower bounds for the same (n, p, q).
CriterionValue criterion_l(const MembershipMatrix& m);

/// n / (2 q^2) * [n p (p + q - 1) - (p q)^2]. Requires q^2 | n.
Rational lower_bound_exact(std::int64_t n, std::int64_t p, std::int64_t q);

/// floor(a/b)^2 b + (2 floor(a/b) + 1)(a - floor(a/b) b): the minimum of the
/// sum of squared counts when a items are spread over b bins.
std::int64_t h_func(std::int64_t a, std::int64_t b);

/// [p (p - 1) h(n, q^2) + p h(n, q) - n p^2] / 2, valid for every n.
Rational lower_bound_weak(std::int64_t n, std::int64_t p, std::int64_t q);

}  // namespace ies
