#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sgl/loss.hpp"
#include "sgl/penalty.hpp"
#include "sgl/solver.hpp"

namespace sgl {

enum class EstimatorKind {
  lasso,
  adaptive_lasso,
  group_lasso,
  adaptive_group_lasso,
  sgl,
  adaptive_sgl
};

EstimatorKind estimator_kind_from_string(const std::string& name);
std::string to_string(EstimatorKind kind);
bool is_adaptive(EstimatorKind kind);

struct PipelineConfig {
  AdaptiveConfig adaptive;
  SolverConfig solver;
  int cv_folds = 5;
  std::vector<double> grid_factors = {0.01, 0.0316, 0.1, 0.316, 1.0, 3.16, 10.0, 31.6, 100.0};
  EstimatorKind estimator_kind = EstimatorKind::adaptive_sgl;
  XiScale xi_scale = XiScale::unit;
};

struct CvPoint {
  double lambda = 0.0;
  double gamma = 0.0;
  double mean_loss = 0.0;
  double se_loss = 0.0;
};

struct CvReport {
  std::vector<CvPoint> points;  // warm-start path order, largest penalty first
  double selected_lambda = 0.0;
  double selected_gamma = 0.0;
  double one_se_lambda = 0.0;
  double one_se_gamma = 0.0;
};

/// Unpenalized M-estimate. Squared loss: QR solve, requires T > d and full
/// column rank. Logistic: damped Newton on the empirical risk.
Eigen::VectorXd first_step_estimator(const Dataset& data, Family family,
                                     const SolverConfig& config = {});

CvReport cross_validate(const Dataset& data, const GroupStructure& groups, EstimatorKind kind,
                        Family family, const PipelineConfig& config);

struct EstimatorOutput {
  FitResult fit;
  CvReport cv;
  PenaltySpec spec;            // weights + selected tuning actually used
  Eigen::VectorXd first_step;  // empty for non-adaptive kinds
};

/// Full procedure for one estimator kind: build weights (adaptive kinds run
/// the first step), select (lambda, gamma) by CV over the factor grid around
/// the rate-implied pair, refit on the full data.
EstimatorOutput fit_estimator(const Dataset& data, const GroupStructure& groups,
                              EstimatorKind kind, Family family, const PipelineConfig& config);

}  // namespace sgl
