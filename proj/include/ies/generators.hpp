#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "ies/dataset.hpp"
#include "ies/rng.hpp"

namespace ies {

enum class CaseTag {
  kNormal,             // truncated multivariate normal on [-2, 2]^p
  kCopulaExponential,  // Gaussian copula, exponential(1) margins cut at 4, shifted by -2
};

std::string_view case_name(CaseTag c);

struct SimScenario {
  CaseTag tag = CaseTag::kNormal;
  std::size_t N = 10000;
  std::size_t p = 3;
  /// Common off-diagonal correlation of the latent normal.
  double rho = 0.3;
  double noise_variance = 0.25;
  bool misspecify = false;
  std::uint64_t seed = 0;

  void validate() const;
};

/// N x p predictors from the scenario's distribution. Whole rows are redrawn
/// until every coordinate satisfies the truncation.
Eigen::MatrixXd gen_case1_predictors(const SimScenario& s, SeededRng& rng);
Eigen::MatrixXd gen_case2_predictors(const SimScenario& s, SeededRng& rng);
Eigen::MatrixXd gen_predictors(const SimScenario& s, SeededRng& rng);

/// Regression function of the simulation study (p = 3):
/// 1 + 8/(4 + x1) + exp(3 - x2^2)/4 + 1.5 sin(pi x3 / 2),
/// plus 2 ln(4.5 + x1 x2) when misspecified.
double true_regression(std::span<const double> x, bool misspecify);

/// Additive pieces of the regression function, j in {0, 1, 2}.
double true_component(std::size_t j, double x);

/// m(X) + N(0, noise_variance) noise per row. Requires p = 3.
Eigen::VectorXd gen_response(const Eigen::MatrixXd& x, bool misspecify, SeededRng& rng,
                             double noise_variance = 0.25);

/// Predictors and responses (requires p = 3).
Dataset gen_case1(const SimScenario& s, SeededRng& rng);
Dataset gen_case2(const SimScenario& s, SeededRng& rng);
Dataset generate(const SimScenario& s, SeededRng& rng);

}  // namespace ies
