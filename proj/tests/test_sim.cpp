#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "sgl/errors.hpp"
#include "sgl/sim.hpp"
#include "support/test_util.hpp"

using sgl::MethodSpec;
using sgl::ScenarioSpec;

namespace {

ScenarioSpec table1_spec(int T, double x_scale, int n_groups) {
  ScenarioSpec spec;
  spec.T = T;
  spec.x_scale = x_scale;
  spec.n_groups = n_groups;
  spec.replications = 3;
  spec.master_seed = 99;
  return spec;
}

int dim(int T, double x_scale) {
  ScenarioSpec spec;
  spec.T = T;
  spec.x_scale = x_scale;
  return sgl::scenario_dimension(spec);
}

}  // namespace

TEST_CASE("scenario_dimension matches the published design points") {
  CHECK(dim(500, 10.0) == 28);
  CHECK(dim(2000, 30.0) == 106);
  CHECK(dim(4000, 50.0) == 199);
}

TEST_CASE("generate_instance satisfies the truth bookkeeping at all design points") {
  struct Row {
    int T, n_groups, S, A, zeros;
    double x;
  };
  const Row rows[] = {{500, 4, 2, 9, 19, 10.0},
                      {2000, 8, 4, 33, 73, 30.0},
                      {4000, 18, 12, 66, 133, 50.0}};
  for (const Row& row : rows) {
    const ScenarioSpec spec = table1_spec(row.T, row.x, row.n_groups);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const sgl::TruthInstance inst = sgl::generate_instance(spec, seed);
      const int d = dim(row.T, row.x);
      CHECK(inst.groups.d == d);
      CHECK(inst.groups.m == row.n_groups);
      CHECK(static_cast<int>(inst.truth_sets.active_groups.size()) == row.S);
      CHECK(static_cast<int>(inst.truth_sets.active_coords.size()) == row.A);
      CHECK(d - inst.truth_sets.n_active() == row.zeros);
      for (int j : inst.truth_sets.active_coords) {
        CHECK(inst.beta0(j) >= spec.signal_min);
        CHECK(inst.beta0(j) <= spec.signal_max);
      }
      // every declared-active group hosts at least one non-zero
      for (int k : inst.truth_sets.active_groups) CHECK(inst.truth_sets.group_active(k));
      CHECK(static_cast<int>(inst.rho_per_group.size()) == row.n_groups);
      int size_sum = 0;
      for (int s : inst.groups.sizes) {
        CHECK(s >= 1);
        size_sum += s;
      }
      CHECK(size_sum == d);
    }
  }
}

TEST_CASE("generate_instance determinism and seed sensitivity") {
  const ScenarioSpec spec = table1_spec(500, 10.0, 4);
  const sgl::TruthInstance a = sgl::generate_instance(spec, 7);
  const sgl::TruthInstance b = sgl::generate_instance(spec, 7);
  const sgl::TruthInstance c = sgl::generate_instance(spec, 8);
  CHECK(a.beta0 == b.beta0);
  CHECK(a.groups.sizes == b.groups.sizes);
  CHECK(a.beta0 != c.beta0);
}

TEST_CASE("infeasible scenarios are rejected") {
  // d_T = 8 leaves |A| = 3*floor(8/9) = 0, below the two active groups
  ScenarioSpec spec = table1_spec(120, 4.0, 3);
  CHECK_THROWS_AS(sgl::generate_instance(spec, 1), sgl::Error);
  // more groups than coordinates
  spec = table1_spec(500, 10.0, 40);
  spec.group_size_min = 1;
  spec.group_size_max = 2;
  CHECK_THROWS_AS(sgl::generate_instance(spec, 1), sgl::Error);
}

TEST_CASE("generate_data noiseless reproduces the linear predictor") {
  const ScenarioSpec spec = table1_spec(300, 4.0, 3);
  const sgl::TruthInstance inst = sgl::generate_instance(spec, 3);
  const sgl::Dataset data = sgl::generate_data(inst, 50, 0.0, 11);
  CHECK(data.T() == 50);
  CHECK((data.response - data.design * inst.beta0).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("toeplitz sampler reproduces the population covariance") {
  // single group of 3, so the covariance is one Toeplitz block
  sgl::TruthInstance inst;
  inst.groups = sgl::build_groups({3});
  inst.beta0 = Eigen::VectorXd::Zero(3);
  inst.truth_sets = sgl::active_sets_from(inst.beta0, inst.groups);
  const int n = 100000;

  for (const double rho : {0.0, 0.5, 0.9}) {
    inst.rho_per_group = {rho};
    const sgl::Dataset data = sgl::generate_data(inst, n, 1.0, 1234);
    const Eigen::MatrixXd S = data.design.transpose() * data.design / n;
    Eigen::MatrixXd target(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) target(i, j) = std::pow(rho, std::abs(i - j));
    CHECK((S - target).lpNorm<Eigen::Infinity>() <= 0.02);
  }
}

TEST_CASE("cross-group covariate blocks are independent") {
  sgl::TruthInstance inst;
  inst.groups = sgl::build_groups({2, 2});
  inst.beta0 = Eigen::VectorXd::Zero(4);
  inst.truth_sets = sgl::active_sets_from(inst.beta0, inst.groups);
  inst.rho_per_group = {0.9, 0.9};
  const int n = 100000;
  const sgl::Dataset data = sgl::generate_data(inst, n, 1.0, 77);
  const Eigen::MatrixXd S = data.design.transpose() * data.design / n;
  CHECK(std::abs(S(0, 2)) <= 0.02);
  CHECK(std::abs(S(0, 3)) <= 0.02);
  CHECK(std::abs(S(1, 2)) <= 0.02);
  CHECK(std::abs(S(1, 3)) <= 0.02);
  CHECK(S(0, 1) == doctest::Approx(0.9).epsilon(0.03));
  CHECK(S(2, 3) == doctest::Approx(0.9).epsilon(0.03));
}

TEST_CASE("run_scenario with the truth oracle reproduces the support") {
  ScenarioSpec spec = sgl::desk_scenario(250, 12, 5);
  const sgl::ScenarioResult result =
      sgl::run_scenario(spec, {MethodSpec::parse("oracle")}, {});
  REQUIRE(result.aggregates.size() == 1);
  const sgl::MethodAggregate& agg = result.aggregates[0];
  CHECK(agg.n_ok == 12);
  CHECK(agg.n_failed == 0);
  CHECK(agg.mean_IC == 0.0);
  CHECK(agg.mean_C == doctest::Approx(static_cast<double>(result.true_zero_count)));
  CHECK(agg.exact_rate == 1.0);
  for (const auto& rec : result.records) {
    CHECK(rec.C <= result.true_zero_count);
    CHECK(rec.IC >= 0);
    CHECK(rec.mse >= 0.0);
  }
}

TEST_CASE("run_scenario is deterministic in the master seed") {
  ScenarioSpec spec = sgl::desk_scenario(200, 6, 42);
  sgl::PipelineConfig config;
  config.grid_factors = {1.0};
  const auto methods = std::vector<MethodSpec>{MethodSpec::parse("adaptive_sgl")};
  const sgl::ScenarioResult a = sgl::run_scenario(spec, methods, config);
  const sgl::ScenarioResult b = sgl::run_scenario(spec, methods, config);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].mse == b.records[i].mse);
    CHECK(a.records[i].C == b.records[i].C);
    CHECK(a.records[i].IC == b.records[i].IC);
  }
  CHECK(a.aggregates[0].mean_mse == b.aggregates[0].mean_mse);
}

TEST_CASE("fixed sgl method parses its multiplier") {
  const MethodSpec m = MethodSpec::parse("fixed_sgl:0.5");
  CHECK(m.type == MethodSpec::Type::fixed_sgl);
  CHECK(m.fixed_multiplier == doctest::Approx(0.5));
  CHECK(MethodSpec::parse("sgl").kind == sgl::EstimatorKind::sgl);
  CHECK(MethodSpec::six_methods().size() == 6);
  CHECK_THROWS_AS(MethodSpec::parse("fixed_sgl:-1"), sgl::Error);
  CHECK_THROWS_AS(MethodSpec::parse("nonsense"), sgl::Error);
}

TEST_CASE("selection_consistency_curve with the oracle is flat at one") {
  ScenarioSpec spec = sgl::desk_scenario(200, 8, 3);
  const auto points =
      sgl::selection_consistency_curve(spec, {200, 280}, MethodSpec::parse("oracle"), 8, {});
  REQUIRE(points.size() == 2);
  for (const auto& pt : points) {
    CHECK(pt.replications == 8);
    CHECK(pt.recovery_rate == 1.0);
    CHECK(pt.standard_error == 0.0);
  }
  CHECK_THROWS_AS(
      sgl::selection_consistency_curve(spec, {280, 200}, MethodSpec::parse("oracle"), 8, {}),
      sgl::Error);
}

TEST_CASE("normality_diagnostic demands enough recoveries") {
  ScenarioSpec spec = sgl::desk_scenario(220, 10, 5);
  const sgl::ScenarioResult result =
      sgl::run_scenario(spec, {MethodSpec::parse("oracle")}, {});
  CHECK_THROWS_AS(sgl::normality_diagnostic(result.records), sgl::Error);
}

TEST_CASE("normality_diagnostic on the restricted least-squares oracle") {
  ScenarioSpec spec = sgl::desk_scenario(400, 300, 5);
  const sgl::ScenarioResult result =
      sgl::run_scenario(spec, {MethodSpec::parse("oracle")}, {});
  const sgl::NormalityReport report = sgl::normality_diagnostic(result.records);
  CHECK(report.n_qualifying >= 280);
  REQUIRE(!report.per_coordinate.empty());
  for (const auto& coord : report.per_coordinate) {
    CHECK(std::abs(coord.mean) <= 0.15);
    CHECK(coord.variance >= 0.7);
    CHECK(coord.variance <= 1.3);
  }
}

TEST_CASE("desk scenario dimensions grow with T") {
  CHECK(dim(200, 4.0) == 9);
  CHECK(dim(500, 4.0) == 11);
  CHECK(dim(1000, 4.0) == 12);
  const ScenarioSpec spec = sgl::desk_scenario(1000, 10, 1);
  const sgl::TruthInstance inst = sgl::generate_instance(spec, 2);
  CHECK(static_cast<int>(inst.truth_sets.active_groups.size()) == 2);
  CHECK(inst.truth_sets.n_active() == 3);
}
