#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>

#include "sgl/groups.hpp"

namespace sgl {

/// Smooth convex loss families. Squared error carries the conventional 1/2
/// factor, so the score is -X'(y - X theta) / T.
enum class Family { squared, logistic };

Family family_from_string(const std::string& name);
std::string to_string(Family family);

struct Dataset {
  Eigen::MatrixXd design;
  Eigen::VectorXd response;

  int T() const { return static_cast<int>(design.rows()); }
  int d() const { return static_cast<int>(design.cols()); }
};

/// Validate dimensions and finiteness.
Dataset make_dataset(Eigen::MatrixXd design, Eigen::VectorXd response);

struct LossEvaluation {
  double value = 0.0;
  Eigen::VectorXd score;
  std::optional<Eigen::MatrixXd> hessian;
};

double loss_value(const Dataset& data, const Eigen::VectorXd& theta, Family family);
Eigen::VectorXd loss_score(const Dataset& data, const Eigen::VectorXd& theta, Family family);
Eigen::MatrixXd loss_hessian(const Dataset& data, const Eigen::VectorXd& theta, Family family);
LossEvaluation evaluate_loss(const Dataset& data, const Eigen::VectorXd& theta, Family family,
                             bool with_hessian = false);

/// H^{-1} M H^{-1} over the active coordinates, with H the empirical Hessian
/// and M the second moment of per-observation scores, both restricted to the
/// active set. Throws SingularHessian when rcond(H_AA) < 1e-12.
Eigen::MatrixXd sandwich_covariance(const Dataset& data, const Eigen::VectorXd& theta,
                                    Family family, const ActiveSets& active);

namespace detail {

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double sigmoid(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

void check_theta(const Dataset& data, const Eigen::VectorXd& theta);
void check_logistic_response(const Dataset& data);

}  // namespace detail

}  // namespace sgl
