#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sgl/groups.hpp"

namespace sgl {

struct PenaltySpec {
  double lambda = 0.0;
  double gamma = 0.0;
  Eigen::VectorXd alpha_weights;  // per coefficient
  Eigen::VectorXd xi_weights;     // per group
};

/// Baseline group weights: plain xi_l = 1, or the sqrt(group size) convention.
enum class XiScale { unit, sqrt_size };

XiScale xi_scale_from_string(const std::string& name);
std::string to_string(XiScale scale);

PenaltySpec make_penalty_spec(double lambda, double gamma, Eigen::VectorXd alpha_weights,
                              Eigen::VectorXd xi_weights, const GroupStructure& groups);

/// Unit-weight spec (alpha_j = 1, xi_l per the scale switch).
PenaltySpec unit_penalty(double lambda, double gamma, const GroupStructure& groups,
                         XiScale scale = XiScale::unit);

struct AdaptiveConfig {
  double eta = 3.5;
  double mu = 2.5;
  double kappa = 0.2;
  double beta_rate = 0.125;   // lambda_T = T^beta_rate
  double alpha_rate = 0.125;  // gamma_T = T^alpha_rate
  double c_growth = 1.0 / 6.0;
};

void validate(const AdaptiveConfig& config);

struct AdaptiveWeights {
  Eigen::VectorXd alpha_weights;
  Eigen::VectorXd xi_weights;
};

/// Weights from a first-step estimate: every coordinate is shifted by
/// e_T = T^{-kappa} (signed, so cancellation raises DegenerateWeight), then
/// alpha_j = |theta_j + e_T|^{-eta} and xi_l = ||theta^(l) + e_T||_2^{-mu}.
AdaptiveWeights adaptive_weights(const Eigen::VectorXd& first_step, const GroupStructure& groups,
                                 const AdaptiveConfig& config, int T);

/// (lambda, gamma) = (T^beta_rate, T^alpha_rate).
std::pair<double, double> tuning_from_rates(const AdaptiveConfig& config, int T);

double penalty_value(const Eigen::VectorXd& theta, const GroupStructure& groups,
                     const PenaltySpec& spec, int T);

struct RateCondition {
  std::string name;   // "i".."v"
  std::string text;   // inequality as printed
  double lhs = 0.0;
  bool satisfied = false;
  double slack = 0.0;  // positive iff satisfied (strict inequalities)
};

struct RateReport {
  std::vector<RateCondition> conditions;
  bool feasible = false;
};

RateReport check_rate_feasibility(const AdaptiveConfig& config);

}  // namespace sgl
