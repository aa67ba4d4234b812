#include "ies/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ies/error.hpp"
#include "ies/galois_field.hpp"

namespace ies {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kIes: return "ies";
    case Method::kRandom: return "rand";
    case Method::kLowCon: return "lowcon";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "ies") return Method::kIes;
  if (name == "rand" || name == "random") return Method::kRandom;
  if (name == "lowcon") return Method::kLowCon;
  throw Error("unknown subsampling method '" + std::string(name) + "' (expected ies, rand or lowcon)");
}

IesScores::IesScores(const MembershipMatrix& cells)
    : cells_(&cells),
      scores_(cells.rows(), 0),
      selected_(cells.rows(), 0),
      remaining_(cells.rows()) {
  argmin_.resize(cells.rows());
  std::iota(argmin_.begin(), argmin_.end(), std::size_t{0});
}

void IesScores::select(std::size_t row) {
  if (row >= scores_.size()) throw Error("IesScores::select: row out of range");
  if (selected_[row]) throw Error("IesScores::select: row already selected");
  selected_[row] = 1;
  --remaining_;

  const std::size_t p = cells_->cols();
  const int* data = cells_->data().data();
  const int* chosen = data + row * p;
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  argmin_.clear();
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    if (selected_[i]) continue;
    const int* z = data + i * p;
    std::int64_t d = 0;
    for (std::size_t j = 0; j < p; ++j) d += (z[j] == chosen[j]);
    const std::int64_t s = scores_[i] += d * d;
    if (s < best) {
      best = s;
      argmin_.clear();
      argmin_.push_back(i);
    } else if (s == best) {
      argmin_.push_back(i);
    }
  }
  min_score_ = argmin_.empty() ? 0 : best;
}

Subsample ies_select(const MembershipMatrix& cells, std::size_t n, SeededRng& rng,
                     const IesOptions& options) {
  const std::size_t N = cells.rows();
  if (n < 1 || n > N)
    throw Error("IES subsample size n=" + std::to_string(n) + " must lie in [1, N=" +
                std::to_string(N) + "]");
  Subsample s;
  s.method = Method::kIes;
  s.q_used = cells.q();
  s.seed = rng.seed();
  s.stream = rng.stream();
  s.indices.reserve(n);
  if (options.audit) s.audit_trail.emplace().reserve(n);

  IesScores scores(cells);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& candidates = scores.argmin();
    const std::size_t pick = candidates[rng.uniform_index(candidates.size())];
    if (s.audit_trail) s.audit_trail->push_back(scores.score(pick));
    s.indices.push_back(pick);
    scores.select(pick);
  }
  return s;
}

Subsample ies_select(const Eigen::MatrixXd& scaled, std::size_t n, int q, SeededRng& rng,
                     const IesOptions& options) {
  if (q < 2) throw Error("IES resolution q must be at least 2");
  const auto cells = membership_matrix(scaled, q);
  return ies_select(cells, n, rng, options);
}

Subsample ies_select(const ScaledView& d, std::size_t n, int q, SeededRng& rng,
                     const IesOptions& options) {
  return ies_select(d.values(), n, q, rng, options);
}

Subsample random_select(std::size_t N, std::size_t n, SeededRng& rng) {
  if (n > N)
    throw Error("random subsample size n=" + std::to_string(n) + " exceeds N=" + std::to_string(N));
  Subsample s;
  s.method = Method::kRandom;
  s.seed = rng.seed();
  s.stream = rng.stream();
  std::vector<std::size_t> pool(N);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = k + rng.uniform_index(N - k);
    std::swap(pool[k], pool[j]);
  }
  pool.resize(n);
  s.indices = std::move(pool);
  return s;
}

Eigen::MatrixXd maximin_lhs(std::size_t n, std::size_t p, int candidates, SeededRng& rng) {
  if (n < 1 || p < 1 || candidates < 1) throw Error("maximin_lhs: bad arguments");
  const auto rows = static_cast<Eigen::Index>(n);
  const auto cols = static_cast<Eigen::Index>(p);
  Eigen::MatrixXd best(rows, cols);
  Eigen::MatrixXd trial(rows, cols);
  double best_min = -1.0;
  std::vector<std::size_t> perm(n);
  for (int c = 0; c < candidates; ++c) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t k = n; k > 1; --k) std::swap(perm[k - 1], perm[rng.uniform_index(k)]);
      for (Eigen::Index i = 0; i < rows; ++i)
        trial(i, j) = (static_cast<double>(perm[static_cast<std::size_t>(i)]) + rng.uniform()) /
                      static_cast<double>(n);
    }
    // Squared minimum distance, abandoned once it cannot beat the incumbent.
    double min_d2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rows && min_d2 > best_min; ++i) {
      for (Eigen::Index k = i + 1; k < rows; ++k) {
        const double d2 = (trial.row(i) - trial.row(k)).squaredNorm();
        if (d2 < min_d2) {
          min_d2 = d2;
          if (min_d2 <= best_min) break;
        }
      }
    }
    if (min_d2 > best_min) {
      best_min = min_d2;
      best = trial;
    }
  }
  return best;
}

Subsample lowcon_select(const Eigen::MatrixXd& scaled, std::size_t n, SeededRng& rng,
                        const LowConOptions& options) {
  const auto N = static_cast<std::size_t>(scaled.rows());
  if (n < 1 || n > N)
    throw Error("LowCon subsample size n=" + std::to_string(n) + " must lie in [1, N=" +
                std::to_string(N) + "]");
  Subsample s;
  s.method = Method::kLowCon;
  s.seed = rng.seed();
  s.stream = rng.stream();
  const Eigen::MatrixXd design =
      maximin_lhs(n, static_cast<std::size_t>(scaled.cols()), options.design_candidates, rng);
  // Row-major copy keeps the nearest-neighbour scan contiguous.
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> data = scaled;
  const auto p = static_cast<std::size_t>(scaled.cols());
  s.indices.reserve(n);
  for (Eigen::Index d = 0; d < design.rows(); ++d) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_row = 0;
    for (std::size_t i = 0; i < N; ++i) {
      const double* row = data.data() + i * p;
      double d2 = 0.0;
      for (std::size_t j = 0; j < p; ++j) {
        const double diff = row[j] - design(d, static_cast<Eigen::Index>(j));
        d2 += diff * diff;
      }
      if (d2 < best) {
        best = d2;
        best_row = i;
      }
    }
    s.indices.push_back(best_row);
  }
  return s;
}

Subsample lowcon_select(const ScaledView& d, std::size_t n, SeededRng& rng,
                        const LowConOptions& options) {
  return lowcon_select(d.values(), n, rng, options);
}

AuditResult audit_scores(const Subsample& s, const MembershipMatrix& cells) {
  if (s.method != Method::kIes)
    throw Error("score audit applies to IES subsamples only, got '" +
                std::string(method_name(s.method)) + "'");
  if (!s.audit_trail) throw Error("subsample has no audit trail; rerun selection with auditing on");
  if (s.audit_trail->size() != s.indices.size()) throw Error("audit trail length mismatch");

  const std::size_t N = cells.rows();
  const std::size_t p = cells.cols();
  std::vector<std::uint8_t> chosen(N, 0);
  std::vector<int> z(p), w(p);
  auto row = [&](std::size_t i, std::vector<int>& out) {
    for (std::size_t j = 0; j < p; ++j) out[j] = cells(i, j);
  };
  for (std::size_t k = 0; k < s.indices.size(); ++k) {
    const std::size_t pick = s.indices[k];
    if (pick >= N || chosen[pick]) return {false, k};
    // l(x | first k picks) recomputed from the definition for every candidate.
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::int64_t pick_score = 0;
    for (std::size_t x = 0; x < N; ++x) {
      if (chosen[x]) continue;
      row(x, z);
      std::int64_t l = 0;
      for (std::size_t i = 0; i < k; ++i) {
        row(s.indices[i], w);
        const std::int64_t d = delta(z, w);
        l += d * d;
      }
      best = std::min(best, l);
      if (x == pick) pick_score = l;
    }
    if (pick_score != best || pick_score != (*s.audit_trail)[k]) return {false, k};
    chosen[pick] = 1;
  }
  return {};
}

AuditResult audit_scores(const Subsample& s, const ScaledView& d) {
  return audit_scores(s, membership_matrix(d.values(), s.q_used));
}

int default_q(std::size_t n) {
  const auto target = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  int q = 2;
  for (int candidate : GaloisField::supported_orders())
    if (candidate <= target) q = candidate;
  return q;
}

}  // namespace ies
