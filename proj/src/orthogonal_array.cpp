#include "ies/orthogonal_array.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ies/error.hpp"
#include "ies/galois_field.hpp"

namespace ies {

LevelMatrix::LevelMatrix(std::size_t rows, std::size_t cols, int q)
    : rows_(rows), cols_(cols), q_(q), data_(rows * cols, 0) {
  if (q < 1) throw Error("level count must be positive");
}

LevelMatrix::LevelMatrix(std::vector<std::vector<int>> rows, int q) : q_(q) {
  rows_ = rows.size();
  cols_ = rows.empty() ? 0 : rows.front().size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error("ragged level matrix");
    for (int v : r) {
      if (v < 0 || v >= q) throw Error("level " + std::to_string(v) + " outside 0.." + std::to_string(q - 1));
      data_.push_back(v);
    }
  }
}

OrthogonalArray construct_oa(int q, std::size_t p, int lambda) {
  if (lambda < 1) throw Error("lambda must be at least 1");
  if (p < 1) throw Error("an orthogonal array needs at least one column");
  if (p > static_cast<std::size_t>(q) + 1)
    throw Error("p=" + std::to_string(p) + " exceeds q+1=" + std::to_string(q + 1) +
                " columns available for q=" + std::to_string(q));
  const GaloisField field(q);
  const auto qs = static_cast<std::size_t>(q);
  const std::size_t base = qs * qs;
  LevelMatrix levels(base * static_cast<std::size_t>(lambda), p, q);
  for (int copy = 0; copy < lambda; ++copy) {
    for (int a = 0; a < q; ++a) {
      for (int b = 0; b < q; ++b) {
        const std::size_t row = static_cast<std::size_t>(copy) * base +
                                static_cast<std::size_t>(a) * qs + static_cast<std::size_t>(b);
        levels(row, 0) = a;
        for (std::size_t col = 1; col < p; ++col) {
          const int c = static_cast<int>(col - 1);
          levels(row, col) = field.add(field.mul(a, c), b);
        }
      }
    }
  }
  return {std::move(levels), lambda, 2};
}

StrengthReport verify_strength(const LevelMatrix& a) {
  StrengthReport report;
  const auto q = static_cast<std::size_t>(a.q());
  const std::size_t n = a.rows();
  if (n % (q * q) != 0) {
    report.pass = false;
    report.expected = 0;
    return report;
  }
  report.expected = n / (q * q);
  std::vector<std::size_t> counts(q * q);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t k = j + 1; k < a.cols(); ++k) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = 0; i < n; ++i)
        ++counts[static_cast<std::size_t>(a(i, j)) * q + static_cast<std::size_t>(a(i, k))];
      for (std::size_t cell = 0; cell < counts.size(); ++cell) {
        if (counts[cell] != report.expected) {
          report.pass = false;
          report.columns = {j, k};
          report.levels = {static_cast<int>(cell / q), static_cast<int>(cell % q)};
          report.observed = counts[cell];
          return report;
        }
      }
    }
  }
  return report;
}

bool verify_weak_strength(const LevelMatrix& a, int t) {
  if (t != 1 && t != 2) throw Error("weak strength is checked for t = 1 or 2 only");
  const auto q = static_cast<std::size_t>(a.q());
  auto balanced = [](const std::vector<std::size_t>& counts) {
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    return *hi - *lo <= 1;
  };
  if (t == 1) {
    std::vector<std::size_t> counts(q);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = 0; i < a.rows(); ++i) ++counts[static_cast<std::size_t>(a(i, j))];
      if (!balanced(counts)) return false;
    }
    return true;
  }
  std::vector<std::size_t> counts(q * q);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t k = j + 1; k < a.cols(); ++k) {
      std::fill(counts.begin(), counts.end(), 0);
      for (std::size_t i = 0; i < a.rows(); ++i)
        ++counts[static_cast<std::size_t>(a(i, j)) * q + static_cast<std::size_t>(a(i, k))];
      if (!balanced(counts)) return false;
    }
  }
  return true;
}

Eigen::MatrixXd random_oa(const OrthogonalArray& a, SeededRng& rng) {
  const auto& lv = a.levels;
  const double q = lv.q();
  Eigen::MatrixXd points(static_cast<Eigen::Index>(lv.rows()), static_cast<Eigen::Index>(lv.cols()));
  for (std::size_t i = 0; i < lv.rows(); ++i) {
    for (std::size_t j = 0; j < lv.cols(); ++j) {
      const double level = lv(i, j);
      double x = (level + rng.uniform()) / q;
      // Rounding can push x across a cell edge; nudge it back so that
      // floor(x * q) recovers the level exactly.
      while (std::floor(x * q) > level) x = std::nextafter(x, 0.0);
      while (std::floor(x * q) < level) x = std::nextafter(x, 1.0);
      points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x;
    }
  }
  return points;
}

}  // namespace ies
