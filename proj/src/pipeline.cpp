#include "sgl/pipeline.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sgl/errors.hpp"

namespace sgl {

EstimatorKind estimator_kind_from_string(const std::string& name) {
  if (name == "lasso") return EstimatorKind::lasso;
  if (name == "adaptive_lasso") return EstimatorKind::adaptive_lasso;
  if (name == "group_lasso") return EstimatorKind::group_lasso;
  if (name == "adaptive_group_lasso") return EstimatorKind::adaptive_group_lasso;
  if (name == "sgl") return EstimatorKind::sgl;
  if (name == "adaptive_sgl") return EstimatorKind::adaptive_sgl;
  throw_error(ErrorCode::InvalidData, "unknown estimator kind '" + name + "'");
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::lasso: return "lasso";
    case EstimatorKind::adaptive_lasso: return "adaptive_lasso";
    case EstimatorKind::group_lasso: return "group_lasso";
    case EstimatorKind::adaptive_group_lasso: return "adaptive_group_lasso";
    case EstimatorKind::sgl: return "sgl";
    case EstimatorKind::adaptive_sgl: return "adaptive_sgl";
  }
  return "unknown";
}

bool is_adaptive(EstimatorKind kind) {
  return kind == EstimatorKind::adaptive_lasso || kind == EstimatorKind::adaptive_group_lasso ||
         kind == EstimatorKind::adaptive_sgl;
}

namespace {

bool uses_lambda(EstimatorKind kind) {
  return kind != EstimatorKind::group_lasso && kind != EstimatorKind::adaptive_group_lasso;
}

bool uses_gamma(EstimatorKind kind) {
  return kind != EstimatorKind::lasso && kind != EstimatorKind::adaptive_lasso;
}

struct WeightTemplate {
  Eigen::VectorXd alpha;
  Eigen::VectorXd xi;
  Eigen::VectorXd first_step;  // size 0 for non-adaptive kinds
};

WeightTemplate build_weights(const Dataset& data, const GroupStructure& groups,
                             EstimatorKind kind, Family family, const PipelineConfig& config) {
  WeightTemplate t;
  if (is_adaptive(kind)) {
    t.first_step = first_step_estimator(data, family, config.solver);
    AdaptiveWeights w = adaptive_weights(t.first_step, groups, config.adaptive, data.T());
    t.alpha = std::move(w.alpha_weights);
    t.xi = std::move(w.xi_weights);
  } else {
    const PenaltySpec base = unit_penalty(0.0, 0.0, groups, config.xi_scale);
    t.alpha = base.alpha_weights;
    t.xi = base.xi_weights;
  }
  return t;
}

Dataset take_rows(const Dataset& data, const std::vector<int>& rows) {
  Eigen::MatrixXd X(static_cast<int>(rows.size()), data.d());
  Eigen::VectorXd y(static_cast<int>(rows.size()));
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    X.row(i) = data.design.row(rows[i]);
    y(i) = data.response(rows[i]);
  }
  return Dataset{std::move(X), std::move(y)};
}

CvReport run_cv(const Dataset& data, const GroupStructure& groups, EstimatorKind kind,
                Family family, const PipelineConfig& config, const WeightTemplate& tmpl) {
  const int folds = config.cv_folds;
  if (folds < 2) throw_error(ErrorCode::InvalidData, "cv_folds must be >= 2");
  if (folds > data.T()) throw_error(ErrorCode::InvalidData, "cv_folds must not exceed T");
  if (config.grid_factors.empty())
    throw_error(ErrorCode::InvalidData, "grid_factors must be non-empty");
  for (double f : config.grid_factors)
    if (!(f > 0.0) || !std::isfinite(f))
      throw_error(ErrorCode::InvalidData, "grid_factors must be strictly positive");

  const auto [lambda0, gamma0] = tuning_from_rates(config.adaptive, data.T());
  std::vector<double> factors = config.grid_factors;
  std::sort(factors.begin(), factors.end(), std::greater<double>());
  factors.erase(std::unique(factors.begin(), factors.end()), factors.end());

  // path order: largest penalties first so warm starts stay sparse
  std::vector<std::pair<double, double>> grid;
  if (uses_lambda(kind) && uses_gamma(kind)) {
    for (double fl : factors)
      for (double fg : factors) grid.emplace_back(fl * lambda0, fg * gamma0);
  } else if (uses_lambda(kind)) {
    for (double fl : factors) grid.emplace_back(fl * lambda0, 0.0);
  } else {
    for (double fg : factors) grid.emplace_back(0.0, fg * gamma0);
  }

  const int P = static_cast<int>(grid.size());
  Eigen::MatrixXd fold_loss(P, folds);
  for (int f = 0; f < folds; ++f) {
    std::vector<int> train_rows, valid_rows;
    for (int i = 0; i < data.T(); ++i)
      (i % folds == f ? valid_rows : train_rows).push_back(i);
    if (train_rows.empty() || valid_rows.empty())
      throw_error(ErrorCode::InvalidData, "empty CV fold");
    const Dataset train = take_rows(data, train_rows);
    const Dataset valid = take_rows(data, valid_rows);
    Eigen::VectorXd warm = Eigen::VectorXd::Zero(groups.d);
    for (int p = 0; p < P; ++p) {
      const PenaltySpec spec =
          make_penalty_spec(grid[p].first, grid[p].second, tmpl.alpha, tmpl.xi, groups);
      const FitResult fit = solve(train, groups, spec, family, config.solver, warm);
      warm = fit.theta_hat;
      fold_loss(p, f) = loss_value(valid, fit.theta_hat, family);
    }
  }

  CvReport report;
  report.points.resize(P);
  for (int p = 0; p < P; ++p) {
    const double mean = fold_loss.row(p).mean();
    double var = 0.0;
    for (int f = 0; f < folds; ++f) {
      const double d = fold_loss(p, f) - mean;
      var += d * d;
    }
    var /= (folds - 1);
    report.points[p] = CvPoint{grid[p].first, grid[p].second, mean,
                               std::sqrt(var / folds)};
  }

  int best = 0;
  for (int p = 1; p < P; ++p) {
    const CvPoint& cand = report.points[p];
    const CvPoint& cur = report.points[best];
    if (cand.mean_loss < cur.mean_loss ||
        (cand.mean_loss == cur.mean_loss &&
         cand.lambda + cand.gamma > cur.lambda + cur.gamma))
      best = p;
  }
  report.selected_lambda = report.points[best].lambda;
  report.selected_gamma = report.points[best].gamma;

  const double threshold = report.points[best].mean_loss + report.points[best].se_loss;
  int one_se = best;
  for (int p = 0; p < P; ++p) {
    const CvPoint& cand = report.points[p];
    if (cand.mean_loss <= threshold) {
      const CvPoint& cur = report.points[one_se];
      const double sum_cand = cand.lambda + cand.gamma;
      const double sum_cur = cur.lambda + cur.gamma;
      if (sum_cand > sum_cur || (sum_cand == sum_cur && cand.lambda > cur.lambda)) one_se = p;
    }
  }
  report.one_se_lambda = report.points[one_se].lambda;
  report.one_se_gamma = report.points[one_se].gamma;
  return report;
}

}  // namespace

Eigen::VectorXd first_step_estimator(const Dataset& data, Family family,
                                     const SolverConfig& config) {
  const int T = data.T();
  const int d = data.d();
  if (family == Family::squared) {
    if (T <= d)
      throw_error(ErrorCode::IllPosed,
                  "unpenalized squared-loss fit needs T > d (T=" + std::to_string(T) +
                      ", d=" + std::to_string(d) + ")");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(data.design);
    if (qr.rank() < d)
      throw_error(ErrorCode::IllPosed, "design is not full column rank");
    return qr.solve(data.response);
  }

  detail::check_logistic_response(data);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  double obj = loss_value(data, theta, family);
  const double tol = std::max(config.tol, 1e-12);
  constexpr int kNewtonIters = 100;
  for (int it = 0; it < kNewtonIters; ++it) {
    const Eigen::VectorXd score = loss_score(data, theta, family);
    if (score.norm() <= tol) return theta;
    const Eigen::MatrixXd H = loss_hessian(data, theta, family);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Eigen::VectorXd delta;
    if (ldlt.info() == Eigen::Success) {
      const Eigen::VectorXd dvec = ldlt.vectorD().cwiseAbs();
      const double dmax = dvec.maxCoeff();
      if (dmax <= 0.0 || dvec.minCoeff() / dmax < 1e-12)
        throw_error(ErrorCode::IllPosed, "logistic Hessian is numerically singular");
      delta = ldlt.solve(score);
    } else {
      throw_error(ErrorCode::IllPosed, "logistic Hessian factorization failed");
    }
    const double slope = score.dot(delta);
    double step = 1.0;
    bool moved = false;
    while (step >= 1e-12) {
      const Eigen::VectorXd cand = theta - step * delta;
      const double cand_obj = loss_value(data, cand, family);
      if (cand_obj <= obj - 1e-4 * step * slope) {
        theta = cand;
        obj = cand_obj;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  if (loss_score(data, theta, family).norm() <= tol) return theta;
  throw_error(ErrorCode::MaxIterations,
              "Newton iterations exhausted (separable data or ill conditioning)");
}

CvReport cross_validate(const Dataset& data, const GroupStructure& groups, EstimatorKind kind,
                        Family family, const PipelineConfig& config) {
  const WeightTemplate tmpl = build_weights(data, groups, kind, family, config);
  return run_cv(data, groups, kind, family, config, tmpl);
}

EstimatorOutput fit_estimator(const Dataset& data, const GroupStructure& groups,
                              EstimatorKind kind, Family family, const PipelineConfig& config) {
  const WeightTemplate tmpl = build_weights(data, groups, kind, family, config);
  EstimatorOutput out;
  out.cv = run_cv(data, groups, kind, family, config, tmpl);
  out.spec = make_penalty_spec(out.cv.selected_lambda, out.cv.selected_gamma, tmpl.alpha,
                               tmpl.xi, groups);
  out.fit = solve(data, groups, out.spec, family, config.solver);
  out.first_step = tmpl.first_step;
  return out;
}

}  // namespace sgl
