#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ies/criterion.hpp"
#include "ies/dataset.hpp"
#include "ies/rng.hpp"

namespace ies {

enum class Method { kIes, kRandom, kLowCon };

std::string_view method_name(Method m);
/// Accepts "ies", "rand" and "lowcon".
Method parse_method(std::string_view name);

/// Ordered row indices into a dataset. IES and random subsamples hold
/// distinct indices; LowCon may repeat rows.
struct Subsample {
  std::vector<std::size_t> indices;
  int q_used = 0;
  Method method = Method::kRandom;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  /// IES only, when auditing: minimum score at each selection step
  /// (entry k is the score of the pick made with k points already chosen).
  std::optional<std::vector<std::int64_t>> audit_trail;
};

/// Running similarity scores l(x | chosen) = sum over chosen rows of
/// delta(x, chosen)^2, updated in O(N p) per selection.
class IesScores {
 public:
  explicit IesScores(const MembershipMatrix& cells);

  /// Marks `row` selected and adds delta(x, row)^2 to every unselected x.
  /// Also refreshes the argmin set among the remaining rows.
  void select(std::size_t row);

  std::int64_t score(std::size_t row) const { return scores_[row]; }
  bool selected(std::size_t row) const { return selected_[row] != 0; }
  std::span<const std::int64_t> scores() const { return scores_; }
  std::size_t remaining() const { return remaining_; }

  /// Unselected rows attaining the minimum score, in row order.
  const std::vector<std::size_t>& argmin() const { return argmin_; }
  std::int64_t min_score() const { return min_score_; }

 private:
  const MembershipMatrix* cells_;
  std::vector<std::int64_t> scores_;
  std::vector<std::uint8_t> selected_;
  std::vector<std::size_t> argmin_;
  std::int64_t min_score_ = 0;
  std::size_t remaining_;
};

struct IesOptions {
  bool audit = false;
};

/// Sequential IES: the first row is uniform over all rows; each later row is
/// drawn uniformly from the argmin set of the current scores.
Subsample ies_select(const MembershipMatrix& cells, std::size_t n, SeededRng& rng,
                     const IesOptions& options = {});
Subsample ies_select(const ScaledView& d, std::size_t n, int q, SeededRng& rng,
                     const IesOptions& options = {});
Subsample ies_select(const Eigen::MatrixXd& scaled, std::size_t n, int q, SeededRng& rng,
                     const IesOptions& options = {});

/// Simple random sample without replacement.
Subsample random_select(std::size_t N, std::size_t n, SeededRng& rng);

struct LowConOptions {
  int design_candidates = 1000;
};

/// Random-search maximin Latin hypercube: among `candidates` random LHDs of
/// n points in [0,1]^p, the one with the largest minimum pairwise distance.
Eigen::MatrixXd maximin_lhs(std::size_t n, std::size_t p, int candidates, SeededRng& rng);

/// Simplified LowCon: nearest data row (Euclidean, scaled predictors) to
/// each point of a maximin LHS reference design. Rows may repeat.
Subsample lowcon_select(const Eigen::MatrixXd& scaled, std::size_t n, SeededRng& rng,
                        const LowConOptions& options = {});
Subsample lowcon_select(const ScaledView& d, std::size_t n, SeededRng& rng,
                        const LowConOptions& options = {});

struct AuditResult {
  bool pass = true;
  std::optional<std::size_t> failed_step;
};

/// Recomputes every step's scores from scratch and checks each recorded
/// pick was a minimiser. Throws for non-IES subsamples or missing trails.
AuditResult audit_scores(const Subsample& s, const MembershipMatrix& cells);
AuditResult audit_scores(const Subsample& s, const ScaledView& d);

/// Largest supported prime power not exceeding ceil(sqrt(n)), at least 2.
int default_q(std::size_t n);

}  // namespace ies
