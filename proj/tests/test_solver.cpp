#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "sgl/errors.hpp"
#include "sgl/solver.hpp"
#include "support/grid_oracle.hpp"
#include "support/test_util.hpp"

using sgl::Family;
using sgl::build_groups;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("soft_threshold") {
  CHECK(sgl::soft_threshold(3.0, 1.0) == 2.0);
  CHECK(sgl::soft_threshold(-0.5, 1.0) == 0.0);
  CHECK(sgl::soft_threshold(0.0, 0.7) == 0.0);
  CHECK(sgl::soft_threshold(-3.0, 1.0) == -2.0);
}

TEST_CASE("group_drop_test") {
  CHECK(sgl::group_drop_test(vec({0.1, -0.1}), vec({0.2, 0.2}), 0.05));
  CHECK_FALSE(sgl::group_drop_test(vec({1.0, 0.0}), vec({0.2, 0.2}), 0.5));
  // exact boundary: ||(0.3, 0.4)|| = 0.5; ties resolve to drop
  CHECK(sgl::group_drop_test(vec({0.3, 0.4}), vec({0.0, 0.0}), 0.5));
}

TEST_CASE("coefficient_drop_test") {
  CHECK(sgl::coefficient_drop_test(0.1, 0.2));
  CHECK_FALSE(sgl::coefficient_drop_test(-0.3, 0.2));
  CHECK(sgl::coefficient_drop_test(0.2, 0.2));  // boundary inclusive
}

TEST_CASE("solve with zero penalties reproduces least squares") {
  sgl::Rng rng(101);
  Eigen::VectorXd beta(5);
  beta << 1.0, -0.4, 0.0, 2.0, 0.3;
  const sgl::Dataset data = testutil::random_regression(rng, 60, 5, 0.5, beta);
  const sgl::GroupStructure groups = build_groups({2, 3});
  const sgl::FitResult fit =
      sgl::solve(data, groups, sgl::unit_penalty(0.0, 0.0, groups), Family::squared);
  const Eigen::VectorXd ls = data.design.colPivHouseholderQr().solve(data.response);
  CHECK(fit.converged);
  const double ls_obj = sgl::loss_value(data, ls, Family::squared);
  CHECK(fit.objective <= ls_obj + 1e-10);
  CHECK((fit.theta_hat - ls).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("orthonormal design lasso matches the closed form") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    sgl::Rng rng(200 + seed);
    const int T = 50, d = 6;
    const Eigen::MatrixXd X = testutil::orthonormal_design(rng, T, d);
    const Eigen::VectorXd y = testutil::random_vector(rng, T);
    const sgl::Dataset data = sgl::make_dataset(X, y);
    const sgl::GroupStructure groups = build_groups({3, 2, 1});
    const double lambda = std::pow(10.0, rng.uniform(-1.0, 1.5));

    const sgl::FitResult fit =
        sgl::solve(data, groups, sgl::unit_penalty(lambda, 0.0, groups), Family::squared);
    const Eigen::VectorXd ols = X.transpose() * y / T;
    for (int j = 0; j < d; ++j)
      CHECK(std::abs(fit.theta_hat(j) - sgl::soft_threshold(ols(j), lambda / T)) <= 1e-8);
  }
}

TEST_CASE("orthonormal block design group lasso matches the closed form") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    sgl::Rng rng(300 + seed);
    const int T = 60, d = 6;
    const Eigen::MatrixXd X = testutil::orthonormal_design(rng, T, d);
    const Eigen::VectorXd y = testutil::random_vector(rng, T);
    const sgl::Dataset data = sgl::make_dataset(X, y);
    const sgl::GroupStructure groups = build_groups({2, 3, 1});
    const double gamma = std::pow(10.0, rng.uniform(-0.5, 1.5));

    const sgl::FitResult fit =
        sgl::solve(data, groups, sgl::unit_penalty(0.0, gamma, groups), Family::squared);
    const Eigen::VectorXd b = X.transpose() * y / T;
    for (int k = 0; k < groups.m; ++k) {
      const auto bk = b.segment(groups.offset(k), groups.size(k));
      const double shrink = std::max(0.0, 1.0 - (gamma / T) / bk.norm());
      const Eigen::VectorXd expected = shrink * bk;
      CHECK((fit.theta_hat.segment(groups.offset(k), groups.size(k)) - expected)
                .lpNorm<Eigen::Infinity>() <= 1e-8);
    }
  }
}

TEST_CASE("solver matches an interior-point reference on a squared problem") {
  // reference theta and objective from a Clarabel solve (cross-checked with
  // SCS to 3e-15 on the objective), frozen
  const sgl::Dataset data = testutil::dataset_from(
      {0.1661,  0.7820,  0.8523,  -0.7071, -0.9317, 0.8867,  -0.2218, 0.3817,
       -0.7726, 0.8630,  -0.2813, -0.9319, -0.4985, 0.7643,  0.1915,  -0.6188,
       1.6657,  1.7382,  1.1822,  1.1194,  -1.8661, -0.6364, -0.7609, 2.6641,
       0.1682,  0.1814,  1.3214,  0.4378,  0.1968,  -1.5296, -0.3375, -0.9614},
      {-0.6788, -1.1924, -1.1367, -0.5187, 1.2288, -0.8759, -0.9211, -0.0771}, 8, 4);
  const sgl::GroupStructure groups = build_groups({2, 2});
  const sgl::PenaltySpec spec =
      sgl::make_penalty_spec(0.8, 0.6, vec({1.0, 0.5, 2.0, 1.0}), vec({1.0, 1.5}), groups);

  const sgl::FitResult fit = sgl::solve(data, groups, spec, Family::squared);
  CHECK(fit.converged);
  CHECK(std::abs(fit.objective - 0.26418552833802555) <= 1e-10);
  CHECK(fit.theta_hat(0) == doctest::Approx(0.55667489734063647).epsilon(1e-6));
  CHECK(fit.theta_hat(1) == doctest::Approx(-0.11195543722455913).epsilon(1e-6));
  CHECK(fit.theta_hat(2) == 0.0);  // whole second group dropped
  CHECK(fit.theta_hat(3) == 0.0);
}

TEST_CASE("solver matches an interior-point reference on a logistic problem") {
  const sgl::Dataset data = testutil::dataset_from(
      {1.7225,  -0.6263, -3.5337, 0.7169,  1.3533,  1.6031,  0.5012,  0.7489,  -1.7902,
       0.5331,  0.8252,  -2.2616, 0.0379,  -0.6195, -0.2349, -0.1009, -1.1649, -1.5113,
       0.1143,  0.3272,  0.0058,  -0.3924, -0.3140, -0.0619, -0.1173, 0.3418,  0.3373,
       -1.8399, -1.4421, 0.6151,  0.8120,  -1.3978, 0.9794,  -0.5607, 0.5070,  -0.2269,
       -0.8229, -1.0028, -1.5220, 0.1666,  -0.2292, 0.1179,  -0.0217, -1.1877, -0.4911,
       -0.6795, 0.2515,  -1.9471, -1.8825, 0.6299,  -0.8133, -0.6715, 0.3427,  -0.0915,
       -2.1738, -2.4949, -0.0696, -0.5226, -1.2856, -0.0145},
      {1, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0}, 12, 5);
  const sgl::GroupStructure groups = build_groups({3, 2});
  const sgl::PenaltySpec spec = sgl::make_penalty_spec(
      0.5, 0.4, vec({0.5, 1.0, 1.0, 2.0, 1.0}), vec({1.2, 1.0}), groups);

  const sgl::FitResult fit = sgl::solve(data, groups, spec, Family::logistic);
  CHECK(fit.converged);
  CHECK(std::abs(fit.objective - 0.54881822069319619) <= 1e-9);
  CHECK(fit.theta_hat(0) == doctest::Approx(0.71056299431247982).epsilon(1e-5));
  CHECK(fit.theta_hat(1) == doctest::Approx(-0.088028297798129304).epsilon(1e-4));
  CHECK(fit.theta_hat(2) == doctest::Approx(-0.75782037428827254).epsilon(1e-5));
  CHECK(fit.theta_hat(3) == doctest::Approx(0.86142304761284716).epsilon(1e-5));
  CHECK(std::abs(fit.theta_hat(4)) <= 1e-6);
}

TEST_CASE("solver beats the brute-force grid on a 3-coordinate problem") {
  sgl::Rng rng(404);
  Eigen::VectorXd beta(3);
  beta << 0.9, -0.5, 0.4;
  const sgl::Dataset data = testutil::random_regression(rng, 20, 3, 0.4, beta);
  const sgl::GroupStructure groups = build_groups({2, 1});
  const sgl::PenaltySpec spec = sgl::unit_penalty(3.0, 3.0, groups);

  const sgl::FitResult fit = sgl::solve(data, groups, spec, Family::squared);
  const testutil::GridOracle3 oracle(data, groups, spec);
  CHECK(fit.objective <= oracle.grid_minimum() + 1e-5);
}

TEST_CASE("independent plain-lasso coordinate descent agrees at gamma = 0") {
  sgl::Rng rng(505);
  Eigen::VectorXd beta(6);
  beta << 1.0, 0.0, -0.8, 0.0, 0.5, 0.0;
  const sgl::Dataset data = testutil::random_regression(rng, 80, 6, 0.6, beta);
  const sgl::GroupStructure groups = build_groups({3, 3});
  const Eigen::VectorXd alpha = vec({1.0, 2.0, 0.5, 1.0, 1.0, 3.0});
  const double lambda = 12.0;
  const sgl::PenaltySpec spec =
      sgl::make_penalty_spec(lambda, 0.0, alpha, vec({1.0, 1.0}), groups);

  const sgl::FitResult fit = sgl::solve(data, groups, spec, Family::squared);
  const Eigen::VectorXd reference = testutil::naive_lasso_cd(data, alpha, lambda);
  CHECK((fit.theta_hat - reference).lpNorm<Eigen::Infinity>() <= 1e-7);
}

TEST_CASE("kkt_verify certifies converged fits and flags perturbations") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    sgl::Rng rng(600 + seed);
    const int d = 4 + static_cast<int>(seed % 3);
    Eigen::VectorXd beta = testutil::random_vector(rng, d);
    const Family family = seed % 2 == 0 ? Family::squared : Family::logistic;
    const sgl::Dataset data = family == Family::squared
                                  ? testutil::random_regression(rng, 50, d, 0.5, beta)
                                  : testutil::random_logistic(rng, 50, d, beta);
    const sgl::GroupStructure groups = build_groups({2, d - 2});
    const sgl::PenaltySpec spec = sgl::unit_penalty(
        std::pow(10.0, rng.uniform(-1.0, 1.0)), std::pow(10.0, rng.uniform(-1.0, 1.0)), groups);

    const sgl::FitResult fit = sgl::solve(data, groups, spec, family);
    REQUIRE(fit.converged);
    const sgl::KktReport report = sgl::kkt_verify(data, groups, spec, family, fit.theta_hat);
    CHECK(report.residual <= 1e-8);
    CHECK(report.residual == doctest::Approx(fit.kkt_residual));

    Eigen::VectorXd off = fit.theta_hat;
    off(0) += 0.1;
    CHECK(sgl::kkt_verify(data, groups, spec, family, off).residual > 1e-8);
  }
}

TEST_CASE("kkt_verify zero vector inside both thresholds") {
  // tiny response keeps every score below the thresholds
  const sgl::Dataset data =
      testutil::dataset_from({1, 0, 0, 1}, {1e-4, -1e-4}, 2, 2);
  const sgl::GroupStructure groups = build_groups({2});
  const sgl::PenaltySpec spec = sgl::unit_penalty(1.0, 1.0, groups);
  const sgl::KktReport report =
      sgl::kkt_verify(data, groups, spec, Family::squared, Eigen::VectorXd::Zero(2));
  CHECK(report.residual == 0.0);
  CHECK_FALSE(report.per_group[0].active);
}

TEST_CASE("reported zeros are exact and large penalties empty the fit") {
  sgl::Rng rng(707);
  Eigen::VectorXd beta(4);
  beta << 0.5, -0.5, 0.2, 0.1;
  const sgl::Dataset data = testutil::random_regression(rng, 40, 4, 0.3, beta);
  const sgl::GroupStructure groups = build_groups({2, 2});
  const sgl::FitResult fit =
      sgl::solve(data, groups, sgl::unit_penalty(1e4, 1e4, groups), Family::squared);
  for (int j = 0; j < 4; ++j) CHECK(fit.theta_hat(j) == 0.0);
  CHECK(fit.active.n_active() == 0);
}

TEST_CASE("warm starts do not move the fixed point") {
  sgl::Rng rng(808);
  Eigen::VectorXd beta(5);
  beta << 1.0, 0.0, 0.0, -0.7, 0.2;
  const sgl::Dataset data = testutil::random_regression(rng, 60, 5, 0.4, beta);
  const sgl::GroupStructure groups = build_groups({2, 3});
  const sgl::PenaltySpec spec = sgl::unit_penalty(5.0, 3.0, groups);

  const sgl::FitResult cold = sgl::solve(data, groups, spec, Family::squared);
  const sgl::FitResult warm = sgl::solve(data, groups, spec, Family::squared, {},
                                         Eigen::VectorXd(0.9 * beta));
  CHECK((cold.theta_hat - warm.theta_hat).lpNorm<Eigen::Infinity>() <= 1e-7);
}

TEST_CASE("iteration cap returns best effort with converged = false") {
  sgl::Rng rng(909);
  Eigen::VectorXd beta(6);
  beta << 2, -2, 1.5, -1, 0.5, 1;
  const sgl::Dataset data = testutil::random_regression(rng, 50, 6, 1.0, beta);
  const sgl::GroupStructure groups = build_groups({3, 3});
  sgl::SolverConfig config;
  config.max_outer_iters = 1;
  const sgl::FitResult fit =
      sgl::solve(data, groups, sgl::unit_penalty(0.5, 0.5, groups), Family::squared, config);
  CHECK_FALSE(fit.converged);
  CHECK(fit.iterations == 1);
  CHECK(std::isfinite(fit.objective));
}

TEST_CASE("solver config validation") {
  sgl::Rng rng(111);
  const sgl::Dataset data = testutil::random_regression(rng, 10, 2, 0.1, vec({1.0, -1.0}));
  const sgl::GroupStructure groups = build_groups({2});
  const sgl::PenaltySpec spec = sgl::unit_penalty(1.0, 1.0, groups);
  sgl::SolverConfig config;
  config.tol = 0.0;
  CHECK_THROWS_AS(sgl::solve(data, groups, spec, Family::squared, config), sgl::Error);
  config = sgl::SolverConfig{};
  config.inner_tol = 1.0;  // must stay below tol
  CHECK_THROWS_AS(sgl::solve(data, groups, spec, Family::squared, config), sgl::Error);
  config = sgl::SolverConfig{};
  config.step_rule = sgl::StepRule::exact;
  CHECK_THROWS_AS(sgl::solve(data, groups, spec, Family::logistic, config), sgl::Error);
}

TEST_CASE("non-finite warm start is rejected as overflow") {
  sgl::Rng rng(121);
  const sgl::Dataset data = testutil::random_regression(rng, 10, 2, 0.1, vec({1.0, -1.0}));
  const sgl::GroupStructure groups = build_groups({2});
  const sgl::PenaltySpec spec = sgl::unit_penalty(1.0, 1.0, groups);
  CHECK_THROWS_AS(
      sgl::solve(data, groups, spec, Family::squared, {}, Eigen::VectorXd(vec({1e200, 0.0}))),
      sgl::Error);
}
