#pragma once

#include <cstdint>
#include <vector>

namespace ies {

/// Finite field GF(q), q = prime^degree, with full addition and
/// multiplication tables.
///
/// Elements are integers 0..q-1: the coefficient vector of the residue
/// polynomial read as base-`prime` digits, constant term least significant.
/// Arithmetic is reduced modulo a hard-coded irreducible polynomial per
/// supported order, and the field axioms are audited exhaustively when the
/// field is built.
class GaloisField {
 public:
  /// Throws ies::Error for unsupported q, naming the closest supported orders.
  explicit GaloisField(int q);

  int order() const { return q_; }
  int characteristic() const { return prime_; }
  int degree() const { return degree_; }
  /// Monic modulus, coefficients from constant term up to x^degree.
  const std::vector<int>& modulus() const { return modulus_; }

  int add(int a, int b) const { return add_[index(a, b)]; }
  int sub(int a, int b) const { return add(a, neg_[b]); }
  int mul(int a, int b) const { return mul_[index(a, b)]; }
  int neg(int a) const { return neg_[a]; }
  /// Multiplicative inverse; a must be nonzero.
  int inv(int a) const;

  static const std::vector<int>& supported_orders();
  static bool is_supported(int q);

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(q_) + static_cast<std::size_t>(b);
  }
  void build_tables();
  void audit() const;

  int q_;
  int prime_;
  int degree_;
  std::vector<int> modulus_;
  std::vector<int> add_;
  std::vector<int> mul_;
  std::vector<int> neg_;
  std::vector<int> inv_;
};

inline GaloisField gf_new(int q) { return GaloisField(q); }

}  // namespace ies
