#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ies/rng.hpp"

namespace ies {

/// Row-major integer matrix of levels in {0..q-1}.
class LevelMatrix {
 public:
  LevelMatrix() = default;
  LevelMatrix(std::size_t rows, std::size_t cols, int q);
  LevelMatrix(std::vector<std::vector<int>> rows, int q);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int q() const { return q_; }

  int operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  int& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const std::vector<int>& data() const { return data_; }

  bool operator==(const LevelMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  int q_ = 2;
  std::vector<int> data_;
};

/// An n x p array over q levels together with how it was produced.
struct OrthogonalArray {
  LevelMatrix levels;
  int lambda = 1;  // number of stacked copies of the base OA(q^2, q+1, q, 2)
  int claimed_strength = 2;
};

/// OA(lambda q^2, p, q, 2) over GF(q). Rows run over (a, b) in GF(q)^2 in
/// lexicographic integer order; column 0 is a, column 1 + c is a*c + b for
/// multiplier c = 0..q-1. The first p columns are kept and the base block
/// is stacked lambda times. Throws when p > q + 1 or q is unsupported.
OrthogonalArray construct_oa(int q, std::size_t p, int lambda = 1);

struct StrengthReport {
  bool pass = true;
  // First violation found (column pair, level pair, observed vs expected).
  std::optional<std::pair<std::size_t, std::size_t>> columns;
  std::optional<std::pair<int, int>> levels;
  std::size_t observed = 0;
  std::size_t expected = 0;
};

/// Exact strength-2 check: every ordered level pair must occur n/q^2 times
/// in every column pair. Fails outright if q^2 does not divide n.
StrengthReport verify_strength(const LevelMatrix& a);

/// Weak strength t- (t = 1 or 2): level-combination counts in every t-column
/// projection differ by at most one, counting absent combinations as zero.
bool verify_weak_strength(const LevelMatrix& a, int t);

/// Random OA: point(i, j) = (a_ij + U_ij) / q with U uniform on [0, 1),
/// kept strictly inside the cell [a/q, (a+1)/q).
Eigen::MatrixXd random_oa(const OrthogonalArray& a, SeededRng& rng);

}  // namespace ies
