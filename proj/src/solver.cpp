#include "sgl/solver.hpp"

#include <cmath>

#include "sgl/errors.hpp"

namespace sgl {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

Eigen::VectorXd group_soft_threshold(const Eigen::VectorXd& v, double t) {
  const double norm = v.norm();
  if (norm <= t) return Eigen::VectorXd::Zero(v.size());
  return (1.0 - t / norm) * v;
}

bool group_drop_test(const Eigen::VectorXd& score_block, const Eigen::VectorXd& l1_level,
                     double group_level) {
  if (score_block.size() != l1_level.size())
    throw_error(ErrorCode::DimensionMismatch, "score block and l1 levels differ in length");
  double sq = 0.0;
  for (int i = 0; i < score_block.size(); ++i) {
    const double s = soft_threshold(score_block(i), l1_level(i));
    sq += s * s;
  }
  return std::sqrt(sq) <= group_level;
}

bool coefficient_drop_test(double score_coord, double l1_level) {
  return std::abs(score_coord) <= l1_level;
}

KktReport kkt_verify(const Dataset& data, const GroupStructure& groups, const PenaltySpec& spec,
                     Family family, const Eigen::VectorXd& theta) {
  if (groups.d != data.d())
    throw_error(ErrorCode::DimensionMismatch, "group structure does not match data");
  if (spec.alpha_weights.size() != groups.d || spec.xi_weights.size() != groups.m)
    throw_error(ErrorCode::DimensionMismatch, "penalty weights do not match group structure");
  const double T = static_cast<double>(data.T());
  const Eigen::VectorXd score = loss_score(data, theta, family);

  KktReport report;
  report.per_group.reserve(groups.m);
  for (int k = 0; k < groups.m; ++k) {
    const int off = groups.offset(k);
    const int c = groups.size(k);
    const double group_level = spec.gamma * spec.xi_weights(k) / T;
    GroupKktEntry entry;
    entry.group = k;
    const double block_norm = theta.segment(off, c).norm();
    double res = 0.0;
    if (block_norm == 0.0) {
      entry.active = false;
      double sq = 0.0;
      for (int i = 0; i < c; ++i) {
        const double s =
            soft_threshold(score(off + i), spec.lambda * spec.alpha_weights(off + i) / T);
        sq += s * s;
      }
      res = std::max(0.0, std::sqrt(sq) - group_level);
    } else {
      entry.active = true;
      for (int i = 0; i < c; ++i) {
        const int j = off + i;
        const double l1 = spec.lambda * spec.alpha_weights(j) / T;
        if (theta(j) == 0.0) {
          res = std::max(res, std::abs(score(j)) - l1);
        } else {
          const double sgn = theta(j) > 0.0 ? 1.0 : -1.0;
          res = std::max(res,
                         std::abs(score(j) + l1 * sgn + group_level * theta(j) / block_norm));
        }
      }
      res = std::max(res, 0.0);
    }
    entry.residual = res;
    report.residual = std::max(report.residual, res);
    report.per_group.push_back(std::move(entry));
  }
  return report;
}

namespace {

constexpr int kMaxInnerSweeps = 200;
constexpr int kProxStepsPerVisit = 5;
constexpr int kEscapeAttempts = 3;
constexpr double kMinStep = 1e-15;
constexpr double kArmijo = 1e-4;
constexpr int kRefreshEvery = 64;

/// Minimize 0.5*a*u^2 - b*u + l1*|u| + g*sqrt(u^2 + R^2) over u.
double coordinate_minimizer(double a, double b, double l1, double g, double R) {
  if (a <= 0.0) return 0.0;
  if (g == 0.0) return soft_threshold(b, l1) / a;
  if (R == 0.0) return soft_threshold(b, l1 + g) / a;
  const double B = std::abs(b) - l1;
  if (B <= 0.0) return 0.0;
  // root of h(u) = a*u + g*u/sqrt(u^2+R^2) - B on (0, B/a], h increasing
  double lo = 0.0;
  double hi = B / a;
  double u = B / (a + g / R);
  if (!(u > lo) || !(u < hi)) u = 0.5 * hi;
  for (int it = 0; it < 100; ++it) {
    const double s = std::sqrt(u * u + R * R);
    const double h = a * u + g * u / s - B;
    if (h > 0.0) {
      hi = u;
    } else {
      lo = u;
    }
    const double hp = a + g * R * R / (s * s * s);
    double next = u - h / hp;
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= 1e-15 * std::max(1.0, std::abs(u))) {
      u = next;
      break;
    }
    u = next;
  }
  return b > 0.0 ? u : -u;
}

struct Workspace {
  const Dataset& data;
  const GroupStructure& groups;
  const PenaltySpec& spec;
  Family family;
  const SolverConfig& config;
  double T;
  Eigen::VectorXd l1;      // lambda * alpha_j / T
  Eigen::VectorXd glevel;  // gamma * xi_k / T
  Eigen::VectorXd col_sq;  // X_j'X_j / T
  Eigen::VectorXd theta;
  Eigen::VectorXd z;  // linear predictor X theta, kept incrementally

  void refresh() { z = data.design * theta; }

  // per-row derivative of the smooth part w.r.t. the linear predictor
  void residuals(const Eigen::VectorXd& zz, Eigen::VectorXd& out) const {
    const int n = data.T();
    out.resize(n);
    if (family == Family::squared) {
      out = zz - data.response;
    } else {
      for (int t = 0; t < n; ++t) out(t) = detail::sigmoid(zz(t)) - data.response(t);
    }
  }

  double smooth_at(const Eigen::VectorXd& zz) const {
    if (family == Family::squared) return (data.response - zz).squaredNorm() / (2.0 * T);
    double acc = 0.0;
    for (int t = 0; t < data.T(); ++t)
      acc += detail::softplus(zz(t)) - data.response(t) * zz(t);
    return acc / T;
  }

  double block_penalty(int k, const Eigen::VectorXd& v) const {
    const int off = groups.offset(k);
    double acc = glevel(k) * v.norm();
    for (int i = 0; i < v.size(); ++i) acc += l1(off + i) * std::abs(v(i));
    return acc;
  }

  double objective() const {
    return smooth_at(z) + penalty_value(theta, groups, spec, data.T());
  }
};

/// One backtracking proximal step on block k from the current iterate.
/// Returns the max coordinate move (0 when no acceptable step exists).
double prox_step(Workspace& w, int k) {
  const int off = w.groups.offset(k);
  const int c = w.groups.size(k);
  const auto Xk = w.data.design.middleCols(off, c);
  Eigen::VectorXd resid;
  w.residuals(w.z, resid);
  const Eigen::VectorXd grad = (Xk.transpose() * resid) / w.T;
  const Eigen::VectorXd v = w.theta.segment(off, c);
  const double F = w.smooth_at(w.z) + w.block_penalty(k, v);

  double step = 1.0;
  while (step >= kMinStep) {
    Eigen::VectorXd cand(c);
    for (int i = 0; i < c; ++i)
      cand(i) = soft_threshold(v(i) - step * grad(i), step * w.l1(off + i));
    cand = group_soft_threshold(cand, step * w.glevel(k));
    const Eigen::VectorXd dv = cand - v;
    const double dn = dv.squaredNorm();
    if (dn == 0.0) return 0.0;
    Eigen::VectorXd z_new = w.z + Xk * dv;
    const double F_new = w.smooth_at(z_new) + w.block_penalty(k, cand);
    if (F_new <= F - kArmijo * dn / step) {
      w.theta.segment(off, c) = cand;
      w.z = std::move(z_new);
      return dv.cwiseAbs().maxCoeff();
    }
    step *= 0.5;
  }
  return 0.0;
}

/// Exact within-block coordinate descent (squared loss only).
double exact_block_descent(Workspace& w, int k) {
  const int off = w.groups.offset(k);
  const int c = w.groups.size(k);
  double total = 0.0;
  for (int sweep = 0; sweep < kMaxInnerSweeps; ++sweep) {
    double sweep_change = 0.0;
    for (int i = 0; i < c; ++i) {
      const int j = off + i;
      const double a = w.col_sq(j);
      const double old = w.theta(j);
      double R2 = w.theta.segment(off, c).squaredNorm() - old * old;
      if (R2 < 0.0) R2 = 0.0;
      double b = 0.0;
      if (a > 0.0) {
        // score_j at current z is X_j'(z - y)/T; the 1-D target is b = a*old - score_j
        b = w.data.design.col(j).dot(w.data.response - w.z) / w.T + a * old;
      }
      const double next = coordinate_minimizer(a, b, w.l1(j), w.glevel(k), std::sqrt(R2));
      if (next != old) {
        w.z += w.data.design.col(j) * (next - old);
        w.theta(j) = next;
        sweep_change = std::max(sweep_change, std::abs(next - old));
      }
    }
    total = std::max(total, sweep_change);
    if (sweep_change <= w.config.inner_tol) break;
  }
  return total;
}

/// Visit one group: screen with the drop test, then minimize the block.
double visit_group(Workspace& w, int k, bool exact_rule) {
  const int off = w.groups.offset(k);
  const int c = w.groups.size(k);
  const auto Xk = w.data.design.middleCols(off, c);
  const Eigen::VectorXd th = w.theta.segment(off, c);
  const bool nonzero = (th.array() != 0.0).any();

  // score of the smooth part at theta with this block zeroed
  Eigen::VectorXd z0;
  Eigen::VectorXd resid;
  if (nonzero) {
    z0 = w.z - Xk * th;
    w.residuals(z0, resid);
  } else {
    w.residuals(w.z, resid);
  }
  const Eigen::VectorXd score0 = (Xk.transpose() * resid) / w.T;

  if (group_drop_test(score0, w.l1.segment(off, c), w.glevel(k))) {
    if (!nonzero) return 0.0;
    w.theta.segment(off, c).setZero();
    w.z = std::move(z0);
    return th.cwiseAbs().maxCoeff();
  }

  double total = 0.0;
  if (exact_rule) {
    // exact coordinate descent; the all-zero kink is escaped with a prox step
    for (int attempt = 0; attempt < kEscapeAttempts; ++attempt) {
      if ((w.theta.segment(off, c).array() == 0.0).all()) {
        const double moved = prox_step(w, k);
        if (moved == 0.0) break;
        total = std::max(total, moved);
      }
      total = std::max(total, exact_block_descent(w, k));
      if (!(w.theta.segment(off, c).array() == 0.0).all()) break;
    }
  } else {
    for (int it = 0; it < kProxStepsPerVisit; ++it) {
      const double moved = prox_step(w, k);
      total = std::max(total, moved);
      if (moved <= w.config.inner_tol) break;
    }
  }
  return total;
}

}  // namespace

FitResult solve(const Dataset& data, const GroupStructure& groups, const PenaltySpec& spec,
                Family family, const SolverConfig& config,
                const std::optional<Eigen::VectorXd>& warm_start) {
  if (groups.d != data.d())
    throw_error(ErrorCode::DimensionMismatch, "group structure does not match data");
  if (spec.alpha_weights.size() != groups.d || spec.xi_weights.size() != groups.m)
    throw_error(ErrorCode::DimensionMismatch, "penalty weights do not match group structure");
  if (!(config.tol > 0.0) || !(config.inner_tol > 0.0))
    throw_error(ErrorCode::InvalidData, "tolerances must be > 0");
  if (config.inner_tol > config.tol)
    throw_error(ErrorCode::InvalidData, "inner_tol must not exceed tol");
  if (config.max_outer_iters < 1)
    throw_error(ErrorCode::InvalidData, "max_outer_iters must be >= 1");
  bool exact_rule;
  switch (config.step_rule) {
    case StepRule::automatic:
      exact_rule = family == Family::squared;
      break;
    case StepRule::exact:
      if (family != Family::squared)
        throw_error(ErrorCode::InvalidData, "exact step rule requires the squared loss");
      exact_rule = true;
      break;
    case StepRule::backtracking:
    default:
      exact_rule = false;
      break;
  }
  if (family == Family::logistic) detail::check_logistic_response(data);

  const int d = groups.d;
  Workspace w{data, groups, spec, family, config, static_cast<double>(data.T()),
              Eigen::VectorXd(), Eigen::VectorXd(), Eigen::VectorXd(),
              Eigen::VectorXd(), Eigen::VectorXd()};
  w.l1 = spec.lambda * spec.alpha_weights / w.T;
  w.glevel = spec.gamma * spec.xi_weights / w.T;
  w.col_sq.resize(d);
  for (int j = 0; j < d; ++j) w.col_sq(j) = data.design.col(j).squaredNorm() / w.T;

  if (warm_start) {
    if (warm_start->size() != d)
      throw_error(ErrorCode::DimensionMismatch, "warm start length mismatch");
    if (!warm_start->allFinite())
      throw_error(ErrorCode::InvalidData, "warm start must be finite");
    w.theta = *warm_start;
  } else {
    w.theta = Eigen::VectorXd::Zero(d);
  }
  w.refresh();

  if (!std::isfinite(w.objective()))
    throw_error(ErrorCode::NonFiniteObjective, "objective not finite at the starting point");

  FitResult result;
  result.converged = false;
  double kkt_res = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (iter = 1; iter <= config.max_outer_iters; ++iter) {
    double max_change = 0.0;
    for (int k = 0; k < groups.m; ++k)
      max_change = std::max(max_change, visit_group(w, k, exact_rule));
    if (iter % kRefreshEvery == 0) w.refresh();
    if (!std::isfinite(w.smooth_at(w.z)))
      throw_error(ErrorCode::NonFiniteObjective, "objective overflowed during descent");
    if (max_change <= config.tol) {
      const KktReport report = kkt_verify(data, groups, spec, family, w.theta);
      kkt_res = report.residual;
      if (kkt_res <= config.tol) {
        result.converged = true;
        break;
      }
    }
  }
  if (iter > config.max_outer_iters) iter = config.max_outer_iters;

  if (!std::isfinite(kkt_res))
    kkt_res = kkt_verify(data, groups, spec, family, w.theta).residual;

  w.refresh();
  result.theta_hat = std::move(w.theta);
  result.active = active_sets_from(result.theta_hat, groups, 0.0);
  result.objective = w.smooth_at(w.z) + penalty_value(result.theta_hat, groups, spec, data.T());
  result.kkt_residual = kkt_res;
  result.iterations = iter;
  return result;
}

}  // namespace sgl
