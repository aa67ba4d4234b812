#include "ies/galois_field.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <string>

#include "ies/error.hpp"

namespace ies {
namespace {

struct FieldSpec {
  int prime;
  int degree;
  std::vector<int> modulus;  // monic, constant term first
};

// Conway polynomials for the composite orders; primes use x (degree 1).
const std::map<int, FieldSpec>& field_specs() {
  static const std::map<int, FieldSpec> specs = {
      {2, {2, 1, {0, 1}}},           {3, {3, 1, {0, 1}}},
      {4, {2, 2, {1, 1, 1}}},        {5, {5, 1, {0, 1}}},
      {7, {7, 1, {0, 1}}},           {8, {2, 3, {1, 1, 0, 1}}},
      {9, {3, 2, {2, 2, 1}}},        {11, {11, 1, {0, 1}}},
      {13, {13, 1, {0, 1}}},         {16, {2, 4, {1, 1, 0, 0, 1}}},
      {17, {17, 1, {0, 1}}},         {19, {19, 1, {0, 1}}},
      {23, {23, 1, {0, 1}}},         {25, {5, 2, {2, 4, 1}}},
      {27, {3, 3, {1, 2, 0, 1}}},    {29, {29, 1, {0, 1}}},
      {31, {31, 1, {0, 1}}},         {32, {2, 5, {1, 0, 1, 0, 0, 1}}},
  };
  return specs;
}

std::vector<int> digits(int value, int prime, int degree) {
  std::vector<int> d(static_cast<std::size_t>(degree));
  for (int k = 0; k < degree; ++k) {
    d[static_cast<std::size_t>(k)] = value % prime;
    value /= prime;
  }
  return d;
}

int from_digits(const std::vector<int>& d, int prime) {
  int value = 0;
  for (auto it = d.rbegin(); it != d.rend(); ++it) value = value * prime + *it;
  return value;
}

}  // namespace

const std::vector<int>& GaloisField::supported_orders() {
  static const std::vector<int> orders = [] {
    std::vector<int> out;
    for (const auto& [q, spec] : field_specs()) out.push_back(q);
    return out;
  }();
  return orders;
}

bool GaloisField::is_supported(int q) { return field_specs().contains(q); }

GaloisField::GaloisField(int q) : q_(q) {
  const auto& specs = field_specs();
  const auto it = specs.find(q);
  if (it == specs.end()) {
    const auto& orders = supported_orders();
    const auto above = std::lower_bound(orders.begin(), orders.end(), q);
    std::string hint;
    if (above != orders.begin()) hint += std::to_string(*std::prev(above));
    if (above != orders.end()) hint += (hint.empty() ? "" : " or ") + std::to_string(*above);
    throw Error("unsupported field order q=" + std::to_string(q) +
                " (need a supported prime power; nearest: " + hint + ")");
  }
  prime_ = it->second.prime;
  degree_ = it->second.degree;
  modulus_ = it->second.modulus;
  build_tables();
  audit();
}

void GaloisField::build_tables() {
  const auto qq = static_cast<std::size_t>(q_) * static_cast<std::size_t>(q_);
  add_.assign(qq, 0);
  mul_.assign(qq, 0);
  neg_.assign(static_cast<std::size_t>(q_), 0);
  inv_.assign(static_cast<std::size_t>(q_), 0);

  for (int a = 0; a < q_; ++a) {
    const auto da = digits(a, prime_, degree_);
    std::vector<int> dn(da.size());
    for (std::size_t k = 0; k < da.size(); ++k) dn[k] = (prime_ - da[k]) % prime_;
    neg_[static_cast<std::size_t>(a)] = from_digits(dn, prime_);

    for (int b = 0; b < q_; ++b) {
      const auto db = digits(b, prime_, degree_);
      std::vector<int> sum(da.size());
      for (std::size_t k = 0; k < da.size(); ++k) sum[k] = (da[k] + db[k]) % prime_;
      add_[index(a, b)] = from_digits(sum, prime_);

      // Schoolbook product, then reduce by the monic modulus from the top.
      std::vector<int> prod(2 * da.size() - 1, 0);
      for (std::size_t i = 0; i < da.size(); ++i)
        for (std::size_t j = 0; j < db.size(); ++j)
          prod[i + j] = (prod[i + j] + da[i] * db[j]) % prime_;
      const auto k = static_cast<std::size_t>(degree_);
      for (std::size_t top = prod.size(); top-- > k;) {
        const int coef = prod[top];
        if (coef == 0) continue;
        for (std::size_t m = 0; m <= k; ++m) {
          auto& slot = prod[top - k + m];
          slot = ((slot - coef * modulus_[m]) % prime_ + prime_) % prime_;
        }
      }
      prod.resize(k);
      mul_[index(a, b)] = from_digits(prod, prime_);
    }
  }
  for (int a = 1; a < q_; ++a)
    for (int b = 1; b < q_; ++b)
      if (mul_[index(a, b)] == 1) inv_[static_cast<std::size_t>(a)] = b;
}

void GaloisField::audit() const {
  auto fail = [this](const std::string& what) {
    throw Error("GF(" + std::to_string(q_) + ") table audit failed: " + what);
  };
  for (int a = 0; a < q_; ++a) {
    if (add(a, 0) != a || mul(a, 1) != a) fail("identity");
    if (add(a, neg(a)) != 0) fail("additive inverse");
    if (a != 0 && mul(a, inv_[static_cast<std::size_t>(a)]) != 1) fail("multiplicative inverse");
    for (int b = 0; b < q_; ++b) {
      if (add(a, b) != add(b, a) || mul(a, b) != mul(b, a)) fail("commutativity");
      if (a != 0 && b != 0 && mul(a, b) == 0) fail("zero divisor");
      for (int c = 0; c < q_; ++c) {
        if (add(add(a, b), c) != add(a, add(b, c))) fail("additive associativity");
        if (mul(mul(a, b), c) != mul(a, mul(b, c))) fail("multiplicative associativity");
        if (mul(a, add(b, c)) != add(mul(a, b), mul(a, c))) fail("distributivity");
      }
    }
  }
}

int GaloisField::inv(int a) const {
  if (a <= 0 || a >= q_) throw Error("GF inverse of zero or out-of-range element");
  return inv_[static_cast<std::size_t>(a)];
}

}  // namespace ies
