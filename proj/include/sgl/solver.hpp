#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "sgl/groups.hpp"
#include "sgl/loss.hpp"
#include "sgl/penalty.hpp"

namespace sgl {

enum class StepRule { automatic, exact, backtracking };

struct SolverConfig {
  int max_outer_iters = 10000;
  double tol = 1e-8;
  double inner_tol = 1e-10;
  StepRule step_rule = StepRule::automatic;
};

struct FitResult {
  Eigen::VectorXd theta_hat;
  ActiveSets active;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct GroupKktEntry {
  int group = 0;
  bool active = false;
  double residual = 0.0;
};

struct KktReport {
  double residual = 0.0;
  std::vector<GroupKktEntry> per_group;
};

double soft_threshold(double x, double t);

/// Block soft-threshold max(0, 1 - t/||v||) * v; exact zero when ||v|| <= t.
Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& v, double t);

/// Whole-group optimality: the block can be zero iff the l1-thresholded score
/// has norm at most the group level. Ties drop.
bool group_drop_test(const Eigen::VectorXd& score_block, const Eigen::VectorXd& l1_level,
                     double group_level);

bool coefficient_drop_test(double score_coord, double l1_level);

/// Max violation of the stationarity system at theta. Zero groups are charged
/// the excess of the thresholded score norm over the group level; active
/// groups are charged per coordinate.
KktReport kkt_verify(const Dataset& data, const GroupStructure& groups, const PenaltySpec& spec,
                     Family family, const Eigen::VectorXd& theta);

FitResult solve(const Dataset& data, const GroupStructure& groups, const PenaltySpec& spec,
                Family family, const SolverConfig& config = {},
                const std::optional<Eigen::VectorXd>& warm_start = std::nullopt);

}  // namespace sgl
