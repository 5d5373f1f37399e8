#include "sgl/loss.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "sgl/errors.hpp"

namespace sgl {

namespace {

constexpr int kHessianDimLimit = 2000;
constexpr double kRcondFloor = 1e-12;

}  // namespace

Family family_from_string(const std::string& name) {
  if (name == "squared") return Family::squared;
  if (name == "logistic") return Family::logistic;
  throw_error(ErrorCode::InvalidData, "unknown loss family '" + name + "'");
}

std::string to_string(Family family) {
  return family == Family::squared ? "squared" : "logistic";
}

Dataset make_dataset(Eigen::MatrixXd design, Eigen::VectorXd response) {
  if (design.rows() < 1 || design.cols() < 1)
    throw_error(ErrorCode::InvalidSize, "design matrix must be nonempty");
  if (response.size() != design.rows())
    throw_error(ErrorCode::DimensionMismatch,
                "response length " + std::to_string(response.size()) +
                    " does not match " + std::to_string(design.rows()) + " rows");
  if (!design.allFinite() || !response.allFinite())
    throw_error(ErrorCode::InvalidData, "design and response must be finite");
  return Dataset{std::move(design), std::move(response)};
}

namespace detail {

void check_theta(const Dataset& data, const Eigen::VectorXd& theta) {
  if (theta.size() != data.d())
    throw_error(ErrorCode::DimensionMismatch,
                "theta has " + std::to_string(theta.size()) + " coordinates, expected " +
                    std::to_string(data.d()));
  if (!theta.allFinite())
    throw_error(ErrorCode::InvalidData, "theta must be finite");
}

void check_logistic_response(const Dataset& data) {
  for (int t = 0; t < data.T(); ++t) {
    const double y = data.response(t);
    if (y != 0.0 && y != 1.0)
      throw_error(ErrorCode::InvalidResponse,
                  "logistic response must lie in {0,1}, found " + std::to_string(y) +
                      " at row " + std::to_string(t));
  }
}

}  // namespace detail

double loss_value(const Dataset& data, const Eigen::VectorXd& theta, Family family) {
  detail::check_theta(data, theta);
  const double T = static_cast<double>(data.T());
  if (family == Family::squared) {
    const Eigen::VectorXd r = data.response - data.design * theta;
    return r.squaredNorm() / (2.0 * T);
  }
  detail::check_logistic_response(data);
  const Eigen::VectorXd z = data.design * theta;
  double acc = 0.0;
  for (int t = 0; t < data.T(); ++t)
    acc += detail::softplus(z(t)) - data.response(t) * z(t);
  return acc / T;
}

Eigen::VectorXd loss_score(const Dataset& data, const Eigen::VectorXd& theta, Family family) {
  detail::check_theta(data, theta);
  const double T = static_cast<double>(data.T());
  if (family == Family::squared) {
    const Eigen::VectorXd r = data.response - data.design * theta;
    return -(data.design.transpose() * r) / T;
  }
  detail::check_logistic_response(data);
  const Eigen::VectorXd z = data.design * theta;
  Eigen::VectorXd resid(data.T());
  for (int t = 0; t < data.T(); ++t)
    resid(t) = detail::sigmoid(z(t)) - data.response(t);
  return (data.design.transpose() * resid) / T;
}

Eigen::MatrixXd loss_hessian(const Dataset& data, const Eigen::VectorXd& theta, Family family) {
  detail::check_theta(data, theta);
  if (data.d() > kHessianDimLimit)
    throw_error(ErrorCode::ProblemTooLarge,
                "refusing to materialize a " + std::to_string(data.d()) + "x" +
                    std::to_string(data.d()) + " Hessian (limit " +
                    std::to_string(kHessianDimLimit) + ")");
  const double T = static_cast<double>(data.T());
  if (family == Family::squared)
    return (data.design.transpose() * data.design) / T;
  detail::check_logistic_response(data);
  const Eigen::VectorXd z = data.design * theta;
  Eigen::VectorXd w(data.T());
  for (int t = 0; t < data.T(); ++t) {
    const double p = detail::sigmoid(z(t));
    w(t) = p * (1.0 - p);
  }
  return (data.design.transpose() * w.asDiagonal() * data.design) / T;
}

LossEvaluation evaluate_loss(const Dataset& data, const Eigen::VectorXd& theta, Family family,
                             bool with_hessian) {
  LossEvaluation out;
  out.value = loss_value(data, theta, family);
  out.score = loss_score(data, theta, family);
  if (with_hessian) out.hessian = loss_hessian(data, theta, family);
  return out;
}

Eigen::MatrixXd sandwich_covariance(const Dataset& data, const Eigen::VectorXd& theta,
                                    Family family, const ActiveSets& active) {
  detail::check_theta(data, theta);
  if (active.d != data.d())
    throw_error(ErrorCode::DimensionMismatch, "active set built for a different dimension");
  const int a = active.n_active();
  if (a == 0) throw_error(ErrorCode::InvalidData, "empty active set");
  if (family == Family::logistic) detail::check_logistic_response(data);

  const double T = static_cast<double>(data.T());
  Eigen::MatrixXd Xa(data.T(), a);
  for (int i = 0; i < a; ++i) Xa.col(i) = data.design.col(active.active_coords[i]);

  Eigen::MatrixXd H(a, a);
  Eigen::VectorXd per_obs_weight(data.T());  // scalar factor of the per-row score
  const Eigen::VectorXd z = data.design * theta;
  if (family == Family::squared) {
    H = (Xa.transpose() * Xa) / T;
    per_obs_weight = -(data.response - z);
  } else {
    Eigen::VectorXd w(data.T());
    for (int t = 0; t < data.T(); ++t) {
      const double p = detail::sigmoid(z(t));
      w(t) = p * (1.0 - p);
      per_obs_weight(t) = p - data.response(t);
    }
    H = (Xa.transpose() * w.asDiagonal() * Xa) / T;
  }

  // M = (1/T) sum_t g_t g_t' with g_t = per_obs_weight(t) * x_t over active coords.
  Eigen::MatrixXd scaled = per_obs_weight.asDiagonal() * Xa;
  Eigen::MatrixXd M = (scaled.transpose() * scaled) / T;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
  const double emax = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double emin = eig.eigenvalues().cwiseAbs().minCoeff();
  if (emax <= 0.0 || emin / emax < kRcondFloor)
    throw_error(ErrorCode::SingularHessian,
                "active-set Hessian has reciprocal condition " +
                    std::to_string(emax > 0.0 ? emin / emax : 0.0));
  Eigen::MatrixXd Hinv = eig.eigenvectors() *
                         eig.eigenvalues().cwiseInverse().asDiagonal() *
                         eig.eigenvectors().transpose();
  return Hinv * M * Hinv;
}

}  // namespace sgl
