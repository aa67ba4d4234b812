#include "ies/generators.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ies/distributions.hpp"
#include "ies/error.hpp"

namespace ies {
namespace {

Eigen::MatrixXd latent_cholesky(const SimScenario& s) {
  const auto p = static_cast<Eigen::Index>(s.p);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(p, p, s.rho);
  sigma.diagonal().setOnes();
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw Error("correlation " + std::to_string(s.rho) + " does not give a positive definite covariance for p = " +
                std::to_string(s.p));
  return llt.matrixL();
}

template <typename Accept>
Eigen::MatrixXd draw_rows(const SimScenario& s, SeededRng& rng, Accept&& accept) {
  const Eigen::MatrixXd chol = latent_cholesky(s);
  const auto p = static_cast<Eigen::Index>(s.p);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(s.N), p);
  Eigen::VectorXd z(p);
  Eigen::VectorXd row(p);
  for (Eigen::Index i = 0; i < out.rows();) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
    const Eigen::VectorXd latent = chol * z;
    if (!accept(latent, row)) continue;
    out.row(i++) = row.transpose();
  }
  return out;
}

}  // namespace

std::string_view case_name(CaseTag c) {
  return c == CaseTag::kNormal ? "normal" : "copula-exponential";
}

void SimScenario::validate() const {
  if (N < 1) throw Error("scenario needs N >= 1");
  if (p < 1) throw Error("scenario needs p >= 1");
  if (!(std::abs(rho) < 1.0)) throw Error("scenario correlation must satisfy |rho| < 1");
  if (!(noise_variance > 0.0)) throw Error("noise variance must be positive");
}

Eigen::MatrixXd gen_case1_predictors(const SimScenario& s, SeededRng& rng) {
  s.validate();
  return draw_rows(s, rng, [](const Eigen::VectorXd& latent, Eigen::VectorXd& row) {
    if ((latent.array().abs() > 2.0).any()) return false;
    row = latent;
    return true;
  });
}

Eigen::MatrixXd gen_case2_predictors(const SimScenario& s, SeededRng& rng) {
  s.validate();
  return draw_rows(s, rng, [](const Eigen::VectorXd& latent, Eigen::VectorXd& row) {
    for (Eigen::Index j = 0; j < latent.size(); ++j) {
      // Exponential quantile of Phi(z), written with the upper tail for accuracy.
      const double e = -std::log(normal_cdf(-latent(j)));
      if (e > 4.0) return false;
      row(j) = e - 2.0;
    }
    return true;
  });
}

Eigen::MatrixXd gen_predictors(const SimScenario& s, SeededRng& rng) {
  return s.tag == CaseTag::kNormal ? gen_case1_predictors(s, rng) : gen_case2_predictors(s, rng);
}

double true_component(std::size_t j, double x) {
  switch (j) {
    case 0: return 8.0 / (4.0 + x);
    case 1: return std::exp(3.0 - x * x) / 4.0;
    case 2: return 1.5 * std::sin(std::numbers::pi / 2.0 * x);
    default: throw Error("the regression function has three components");
  }
}

double true_regression(std::span<const double> x, bool misspecify) {
  if (x.size() != 3) throw Error("the regression function needs exactly 3 predictors, got " + std::to_string(x.size()));
  double m = 1.0 + true_component(0, x[0]) + true_component(1, x[1]) + true_component(2, x[2]);
  if (misspecify) m += 2.0 * std::log(4.5 + x[0] * x[1]);
  return m;
}

Eigen::VectorXd gen_response(const Eigen::MatrixXd& x, bool misspecify, SeededRng& rng, double noise_variance) {
  if (x.cols() != 3) throw Error("responses need exactly 3 predictors, got " + std::to_string(x.cols()));
  if (!(noise_variance >= 0.0)) throw Error("noise variance must be nonnegative");
  const double sd = std::sqrt(noise_variance);
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double row[3] = {x(i, 0), x(i, 1), x(i, 2)};
    y(i) = true_regression(row, misspecify) + sd * rng.normal();
  }
  return y;
}

Dataset gen_case1(const SimScenario& s, SeededRng& rng) {
  Eigen::MatrixXd x = gen_case1_predictors(s, rng);
  Eigen::VectorXd y = gen_response(x, s.misspecify, rng, s.noise_variance);
  return Dataset(std::move(x), std::move(y), {"x1", "x2", "x3"});
}

Dataset gen_case2(const SimScenario& s, SeededRng& rng) {
  Eigen::MatrixXd x = gen_case2_predictors(s, rng);
  Eigen::VectorXd y = gen_response(x, s.misspecify, rng, s.noise_variance);
  return Dataset(std::move(x), std::move(y), {"x1", "x2", "x3"});
}

Dataset generate(const SimScenario& s, SeededRng& rng) {
  return s.tag == CaseTag::kNormal ? gen_case1(s, rng) : gen_case2(s, rng);
}

}  // namespace ies
