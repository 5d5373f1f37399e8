#include <Eigen/Core>

#include "doctest.h"
#include "sgl/errors.hpp"
#include "sgl/groups.hpp"

using sgl::build_groups;

TEST_CASE("build_groups derives offsets and totals") {
  const sgl::GroupStructure g = build_groups({3, 1, 2});
  CHECK(g.d == 6);
  CHECK(g.m == 3);
  CHECK(g.offset(0) == 0);
  CHECK(g.offset(1) == 3);
  CHECK(g.offset(2) == 4);
  CHECK(g.size(2) == 2);
  CHECK(g.group_of(0) == 0);
  CHECK(g.group_of(3) == 1);
  CHECK(g.group_of(5) == 2);
}

TEST_CASE("build_groups rejects bad partitions") {
  CHECK_THROWS_AS(build_groups({}), sgl::Error);
  CHECK_THROWS_AS(build_groups({2, 0}), sgl::Error);
  CHECK_THROWS_AS(build_groups({2, -1}), sgl::Error);
}

TEST_CASE("active_sets_from tracks exact zeros") {
  const sgl::GroupStructure g = build_groups({2, 2, 1});
  Eigen::VectorXd theta(5);
  theta << 1.0, 0.0, 0.0, 0.0, -0.3;
  const sgl::ActiveSets a = sgl::active_sets_from(theta, g);
  CHECK(a.active_groups == std::vector<int>{0, 2});
  CHECK(a.active_coords == std::vector<int>{0, 4});
  CHECK(a.group_active(0));
  CHECK_FALSE(a.group_active(1));
  CHECK(a.n_active() == 2);

  // positive tolerance treats small entries as zero
  theta << 1.0, 1e-9, 0.0, 0.0, -0.3;
  const sgl::ActiveSets b = sgl::active_sets_from(theta, g, 1e-8);
  CHECK(b.active_coords == std::vector<int>{0, 4});
}

TEST_CASE("compare_supports counts C and IC") {
  const sgl::GroupStructure g = build_groups({3, 2});
  Eigen::VectorXd truth(5), est(5);
  truth << 1.0, 0.0, 0.5, 0.0, 0.0;  // zeros at 1, 3, 4
  est << 1.0, 0.0, 0.0, 0.2, 0.0;    // missed coord 2, false positive at 3
  const auto cmp = sgl::compare_supports(sgl::active_sets_from(est, g),
                                         sgl::active_sets_from(truth, g));
  CHECK(cmp.correct_zeros == 2);    // coords 1 and 4
  CHECK(cmp.incorrect_zeros == 1);  // coord 2
  CHECK_FALSE(cmp.exact_recovery);

  const auto same = sgl::compare_supports(sgl::active_sets_from(truth, g),
                                          sgl::active_sets_from(truth, g));
  CHECK(same.correct_zeros == 3);
  CHECK(same.incorrect_zeros == 0);
  CHECK(same.exact_recovery);
}
