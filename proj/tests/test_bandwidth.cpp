#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ies/bandwidth.hpp"
#include "ies/error.hpp"
#include "ies/generators.hpp"
#include "ies/sampler.hpp"

namespace {

struct Sample {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Sample case1_subsample(std::uint64_t seed, std::size_t N, std::size_t n) {
  ies::SimScenario s;
  s.N = N;
  ies::SeededRng rng(seed);
  const ies::Dataset d = ies::gen_case1(s, rng);
  const ies::ScaledView v(d);
  const auto sub = ies::ies_select(v, n, 16, rng);
  return {v.take_rows(sub.indices), ies::take_rows(d.response(), sub.indices)};
}

}  // namespace

TEST_CASE("grid strings expand to inclusive arithmetic grids") {
  const auto g = ies::parse_grid("0.05:0.95:0.05");
  REQUIRE(g.size() == 19);
  CHECK(g.front() == 0.05);
  CHECK(g.back() == 0.95);
  CHECK(g == ies::CvSpec::default_grid());
  CHECK(ies::parse_grid("0.2,0.4") == std::vector<double>{0.2, 0.4});
  CHECK(ies::parse_grid("0.3:0.3:0.1") == std::vector<double>{0.3});
  CHECK_THROWS_AS(ies::parse_grid("0.1:0.5:0"), ies::Error);
  CHECK_THROWS_AS(ies::parse_grid("0.5:0.1:0.1"), ies::Error);
  CHECK_THROWS_AS(ies::parse_grid("a:b:c"), ies::Error);
}

TEST_CASE("spec validation") {
  ies::CvSpec s;
  CHECK_NOTHROW(s.validate(3));
  s.folds = 1;
  CHECK_THROWS_AS(s.validate(3), ies::Error);
  s = {};
  s.grid = {0.0, 0.5};
  CHECK_THROWS_AS(s.validate(3), ies::Error);
  s = {};
  s.per_predictor_grid = {{0.2}, {0.3}};
  CHECK_THROWS_AS(s.validate(3), ies::Error);
  CHECK_NOTHROW(s.validate(2));
  CHECK(s.grid_for(1) == std::vector<double>{0.3});
}

TEST_CASE("folds partition the rows with sizes differing by at most one") {
  for (std::size_t n : {50u, 51u, 99u, 1000u}) {
    ies::SeededRng rng(n);
    const auto labels = ies::assign_folds(n, 7, rng);
    REQUIRE(labels.size() == n);
    std::vector<std::size_t> sizes(7, 0);
    for (int l : labels) {
      REQUIRE(l >= 0);
      REQUIRE(l < 7);
      ++sizes[static_cast<std::size_t>(l)];
    }
    CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
    ies::SeededRng again(n);
    CHECK(ies::assign_folds(n, 7, again) == labels);
  }
}

TEST_CASE("a single candidate is returned as is") {
  const Sample s = case1_subsample(1, 2000, 100);
  ies::CvSpec spec;
  spec.grid = {0.4};
  ies::SeededRng rng(2);
  const auto r = ies::cv_select(s.x, s.y, spec, {}, rng);
  CHECK(r.bandwidths == std::vector<double>{0.4, 0.4, 0.4});
  CHECK(r.table.size() == 1);
  CHECK(std::isfinite(r.error));
}

TEST_CASE("a nearly linear truth favours wide bandwidths") {
  ies::SeededRng rng(3);
  Eigen::MatrixXd x(200, 1);
  Eigen::VectorXd y(200);
  for (Eigen::Index i = 0; i < 200; ++i) {
    x(i, 0) = rng.uniform();
    y(i) = 1.0 + 2.0 * x(i, 0) + 0.1 * rng.normal();
  }
  ies::CvSpec spec;
  spec.search = ies::CvSearch::kFullGrid;
  spec.grid = ies::parse_grid("0.1:0.9:0.1");
  const auto r = ies::cv_select(x, y, spec, {}, rng);
  CHECK(r.bandwidths[0] >= 0.5);
  CHECK(r.table.front().error > r.table.back().error);
}

TEST_CASE("singular candidates are kept with infinite error") {
  const Sample s = case1_subsample(4, 2000, 100);
  ies::CvSpec spec;
  spec.grid = {0.001, 0.5};
  spec.search = ies::CvSearch::kFullGrid;
  ies::SeededRng rng(5);
  const auto r = ies::cv_select(s.x, s.y, spec, {}, rng);
  CHECK(r.table.size() == 8);
  CHECK(std::count_if(r.table.begin(), r.table.end(), [](const auto& e) { return std::isinf(e.error); }) == 7);
  CHECK(r.bandwidths == std::vector<double>{0.5, 0.5, 0.5});

  spec.grid = {0.001};
  try {
    ies::cv_select(s.x, s.y, spec, {}, rng);
    FAIL("expected every candidate to be singular");
  } catch (const ies::Error& e) {
    CHECK(std::string(e.what()).find("larger bandwidths") != std::string::npos);
  }
}

TEST_CASE("too few observations for the folds is an error") {
  const Sample s = case1_subsample(6, 500, 40);
  ies::SeededRng rng(7);
  CHECK_THROWS_AS(ies::cv_select(s.x, s.y, ies::CvSpec{}, {}, rng), ies::Error);
}

TEST_CASE("the error table is deterministic and thread-count independent") {
  const Sample s = case1_subsample(8, 2000, 150);
  ies::CvSpec spec;
  spec.grid = ies::parse_grid("0.1:0.9:0.2");
  ies::SeededRng a(9), b(9);
  const auto r1 = ies::cv_select(s.x, s.y, spec, {}, a);
  spec.threads = 3;
  const auto r2 = ies::cv_select(s.x, s.y, spec, {}, b);
  REQUIRE(r1.table.size() == r2.table.size());
  for (std::size_t k = 0; k < r1.table.size(); ++k) {
    CHECK(r1.table[k].bandwidths == r2.table[k].bandwidths);
    CHECK(r1.table[k].error == r2.table[k].error);
  }
  CHECK(r1.bandwidths == r2.bandwidths);
}

TEST_CASE("coordinate descent lands within 5% of the full-grid optimum") {
  // Reduced from a 19^3 grid at n = 500 to keep the unit suite fast.
  int within = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Sample s = case1_subsample(100 + seed, 3000, 200);
    ies::CvSpec spec;
    spec.grid = ies::parse_grid("0.1:0.9:0.1");
    spec.search = ies::CvSearch::kFullGrid;
    ies::SeededRng a(seed), b(seed);
    const auto full = ies::cv_select(s.x, s.y, spec, {}, a);
    spec.search = ies::CvSearch::kCoordinateDescent;
    const auto cd = ies::cv_select(s.x, s.y, spec, {}, b);
    CHECK(cd.error >= full.error);
    within += cd.error <= 1.05 * full.error;
  }
  CHECK(within == 10);
}
