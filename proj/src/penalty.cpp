#include "sgl/penalty.hpp"

#include <cmath>

#include "sgl/errors.hpp"

namespace sgl {

namespace {

constexpr double kWeightFloor = 1e-12;

void check_weights(const Eigen::VectorXd& w, int expected, const char* which) {
  if (w.size() != expected)
    throw_error(ErrorCode::DimensionMismatch,
                std::string(which) + " weights have length " + std::to_string(w.size()) +
                    ", expected " + std::to_string(expected));
  if (!w.allFinite() || (w.array() < 0.0).any())
    throw_error(ErrorCode::InvalidData, std::string(which) + " weights must be finite and >= 0");
}

}  // namespace

XiScale xi_scale_from_string(const std::string& name) {
  if (name == "unit") return XiScale::unit;
  if (name == "sqrt_size") return XiScale::sqrt_size;
  throw_error(ErrorCode::InvalidData, "unknown xi_scale '" + name + "'");
}

std::string to_string(XiScale scale) {
  return scale == XiScale::unit ? "unit" : "sqrt_size";
}

PenaltySpec make_penalty_spec(double lambda, double gamma, Eigen::VectorXd alpha_weights,
                              Eigen::VectorXd xi_weights, const GroupStructure& groups) {
  if (!(lambda >= 0.0) || !(gamma >= 0.0) || !std::isfinite(lambda) || !std::isfinite(gamma))
    throw_error(ErrorCode::InvalidData, "lambda and gamma must be finite and >= 0");
  check_weights(alpha_weights, groups.d, "alpha");
  check_weights(xi_weights, groups.m, "xi");
  return PenaltySpec{lambda, gamma, std::move(alpha_weights), std::move(xi_weights)};
}

PenaltySpec unit_penalty(double lambda, double gamma, const GroupStructure& groups,
                         XiScale scale) {
  Eigen::VectorXd alpha = Eigen::VectorXd::Ones(groups.d);
  Eigen::VectorXd xi(groups.m);
  for (int k = 0; k < groups.m; ++k)
    xi(k) = scale == XiScale::unit ? 1.0 : std::sqrt(static_cast<double>(groups.size(k)));
  return make_penalty_spec(lambda, gamma, std::move(alpha), std::move(xi), groups);
}

void validate(const AdaptiveConfig& config) {
  if (!(config.eta > 0.0) || !(config.mu > 0.0) || !(config.kappa > 0.0))
    throw_error(ErrorCode::InvalidData, "eta, mu, kappa must be > 0");
  if (!(config.beta_rate > 0.0) || !(config.alpha_rate > 0.0))
    throw_error(ErrorCode::InvalidData, "alpha_rate and beta_rate must be > 0");
  if (!(config.c_growth > 0.0) || !(config.c_growth < 1.0))
    throw_error(ErrorCode::InvalidData, "c_growth must lie in (0, 1)");
}

AdaptiveWeights adaptive_weights(const Eigen::VectorXd& first_step, const GroupStructure& groups,
                                 const AdaptiveConfig& config, int T) {
  if (first_step.size() != groups.d)
    throw_error(ErrorCode::DimensionMismatch, "first-step estimate length mismatch");
  if (T < 2) throw_error(ErrorCode::InvalidSize, "adaptive weights need T >= 2");
  if (!first_step.allFinite())
    throw_error(ErrorCode::InvalidData, "first-step estimate must be finite");
  if (!(config.eta > 0.0) || !(config.mu > 0.0) || !(config.kappa > 0.0))
    throw_error(ErrorCode::InvalidData, "eta, mu, kappa must be > 0");

  const double shift = std::pow(static_cast<double>(T), -config.kappa);
  Eigen::VectorXd shifted = first_step.array() + shift;

  AdaptiveWeights out;
  out.alpha_weights.resize(groups.d);
  for (int j = 0; j < groups.d; ++j) {
    const double base = std::abs(shifted(j));
    if (base < kWeightFloor)
      throw_error(ErrorCode::DegenerateWeight,
                  "first-step coordinate " + std::to_string(j) + " cancels the shift e_T");
    out.alpha_weights(j) = std::pow(base, -config.eta);
  }
  out.xi_weights.resize(groups.m);
  for (int k = 0; k < groups.m; ++k) {
    const double norm = shifted.segment(groups.offset(k), groups.size(k)).norm();
    if (norm < kWeightFloor)
      throw_error(ErrorCode::DegenerateWeight,
                  "group " + std::to_string(k) + " norm cancels the shift e_T");
    out.xi_weights(k) = std::pow(norm, -config.mu);
  }
  return out;
}

std::pair<double, double> tuning_from_rates(const AdaptiveConfig& config, int T) {
  if (T < 1) throw_error(ErrorCode::InvalidSize, "T must be >= 1");
  const double t = static_cast<double>(T);
  return {std::pow(t, config.beta_rate), std::pow(t, config.alpha_rate)};
}

double penalty_value(const Eigen::VectorXd& theta, const GroupStructure& groups,
                     const PenaltySpec& spec, int T) {
  if (theta.size() != groups.d)
    throw_error(ErrorCode::DimensionMismatch, "theta length mismatch");
  if (T < 1) throw_error(ErrorCode::InvalidSize, "T must be >= 1");
  const double t = static_cast<double>(T);
  double l1 = 0.0;
  for (int j = 0; j < groups.d; ++j) l1 += spec.alpha_weights(j) * std::abs(theta(j));
  double l2 = 0.0;
  for (int k = 0; k < groups.m; ++k)
    l2 += spec.xi_weights(k) * theta.segment(groups.offset(k), groups.size(k)).norm();
  return (spec.lambda / t) * l1 + (spec.gamma / t) * l2;
}

RateReport check_rate_feasibility(const AdaptiveConfig& config) {
  const double a = config.alpha_rate;
  const double b = config.beta_rate;
  const double c = config.c_growth;
  const double k = config.kappa;
  const double eta = config.eta;
  const double mu = config.mu;

  RateReport report;
  // All five are strict; lhs is written so the condition reads lhs < 0 (i, iii)
  // or lhs > 0 (ii, iv, v). Slack is the satisfied margin either way.
  auto add = [&report](const char* name, const char* text, double lhs, bool upper) {
    RateCondition cond;
    cond.name = name;
    cond.text = text;
    cond.lhs = lhs;
    cond.slack = upper ? -lhs : lhs;
    cond.satisfied = cond.slack > 0.0;
    report.conditions.push_back(std::move(cond));
  };

  add("i", "alpha + c/2 + kappa*mu - 1/2 < 0", a + c / 2.0 + k * mu - 0.5, true);
  add("ii", "alpha - 1/2 + ((1+mu)(1-c) - 1)/2 > 0",
      a - 0.5 + ((1.0 + mu) * (1.0 - c) - 1.0) / 2.0, false);
  add("iii", "beta + kappa*eta - 1/2 < 0", b + k * eta - 0.5, true);
  add("iv", "beta - 1/2 + ((1+eta)(1-c) - 1)/2 > 0",
      b - 0.5 + ((1.0 + eta) * (1.0 - c) - 1.0) / 2.0, false);
  add("v", "(1+mu)(1 - c/2 - kappa*eta - beta) + alpha - 1 > 0",
      (1.0 + mu) * (1.0 - c / 2.0 - k * eta - b) + a - 1.0, false);

  report.feasible = true;
  for (const auto& cond : report.conditions) report.feasible = report.feasible && cond.satisfied;
  return report;
}

}  // namespace sgl
