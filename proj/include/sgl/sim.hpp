#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "sgl/groups.hpp"
#include "sgl/loss.hpp"
#include "sgl/pipeline.hpp"

namespace sgl {

struct ScenarioSpec {
  int T = 500;
  double x_scale = 10.0;  // d_T = floor(x_scale * T^{1/6})
  int n_groups = 4;
  double sigma = 0.3;
  std::vector<double> rho_choices = {0.5, 0.8, 0.9};
  int group_size_min = 5;
  int group_size_max = 30;
  double signal_min = 0.1;
  double signal_max = 0.99;
  int replications = 100;
  std::uint64_t master_seed = 1;
};

int scenario_dimension(const ScenarioSpec& spec);

/// Small, fast scenario used by the consistency and normality studies.
ScenarioSpec desk_scenario(int T, int replications, std::uint64_t master_seed);

struct TruthInstance {
  GroupStructure groups;
  Eigen::VectorXd beta0;
  ActiveSets truth_sets;
  std::vector<double> rho_per_group;
};

TruthInstance generate_instance(const ScenarioSpec& spec, std::uint64_t seed);

/// Covariates: per-group centered Gaussian blocks with Toeplitz covariance
/// rho^|i-j| (blocks independent); y = X beta0 + sigma * eta.
Dataset generate_data(const TruthInstance& instance, int T, double sigma, std::uint64_t seed);

struct MethodSpec {
  enum class Type { pipeline, oracle, fixed_sgl };
  Type type = Type::pipeline;
  EstimatorKind kind = EstimatorKind::adaptive_sgl;
  double fixed_multiplier = 0.5;  // fixed_sgl: lambda = gamma = multiplier * sqrt(T)

  std::string name() const;
  static MethodSpec parse(const std::string& text);
  static std::vector<MethodSpec> six_methods();
};

struct ReplicationRecord {
  std::string method;
  int rep = 0;
  double mse = 0.0;
  int C = 0;
  int IC = 0;
  bool exact_recovery = false;
  Eigen::VectorXd standardized_active_errors;  // set when recovered and covariance invertible
  bool failed = false;
  std::string error;
};

struct MethodAggregate {
  std::string method;
  double mean_mse = 0.0;
  double mean_C = 0.0;
  double mean_IC = 0.0;
  double exact_rate = 0.0;
  int n_ok = 0;
  int n_failed = 0;
};

struct ScenarioResult {
  std::vector<ReplicationRecord> records;  // replication-major, method order within
  std::vector<MethodAggregate> aggregates;
  int d = 0;
  int true_zero_count = 0;
};

ScenarioResult run_scenario(const ScenarioSpec& spec, const std::vector<MethodSpec>& methods,
                            const PipelineConfig& config);

struct CurvePoint {
  int T = 0;
  double recovery_rate = 0.0;
  double standard_error = 0.0;
  int replications = 0;
};

std::vector<CurvePoint> selection_consistency_curve(const ScenarioSpec& base,
                                                    const std::vector<int>& T_list,
                                                    const MethodSpec& method, int replications,
                                                    const PipelineConfig& config);

struct CoordinateMoments {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
};

struct NormalityReport {
  int n_qualifying = 0;
  std::vector<CoordinateMoments> per_coordinate;
};

/// Moments of the standardized active errors over exact-recovery records.
/// Throws InsufficientRecoveries below 30 qualifying replications.
NormalityReport normality_diagnostic(const std::vector<ReplicationRecord>& records);

/// Restricted least squares on the true support.
Eigen::VectorXd oracle_estimate(const Dataset& data, const TruthInstance& instance);

/// sqrt(T) * Vhat^{-1/2} (theta_A - beta0_A) on the true support.
Eigen::VectorXd standardized_errors(const Dataset& data, const Eigen::VectorXd& theta,
                                    const TruthInstance& instance, Family family);

}  // namespace sgl
