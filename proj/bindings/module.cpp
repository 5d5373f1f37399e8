#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sgl/errors.hpp"
#include "sgl/io.hpp"
#include "sgl/pipeline.hpp"
#include "sgl/sim.hpp"
#include "sgl/solver.hpp"

namespace py = pybind11;

namespace {

sgl::Dataset dataset(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return sgl::make_dataset(X, y);
}

sgl::PenaltySpec spec_from(double lambda, double gamma, const sgl::GroupStructure& groups,
                           const std::optional<Eigen::VectorXd>& alpha,
                           const std::optional<Eigen::VectorXd>& xi) {
  if (!alpha && !xi) return sgl::unit_penalty(lambda, gamma, groups);
  Eigen::VectorXd a = alpha ? *alpha : Eigen::VectorXd::Ones(groups.d);
  Eigen::VectorXd x = xi ? *xi : Eigen::VectorXd::Ones(groups.m);
  return sgl::make_penalty_spec(lambda, gamma, a, x, groups);
}

py::dict fit_dict(const sgl::FitResult& fit) {
  py::dict out;
  out["theta"] = fit.theta_hat;
  out["objective"] = fit.objective;
  out["kkt_residual"] = fit.kkt_residual;
  out["iterations"] = fit.iterations;
  out["converged"] = fit.converged;
  out["active_groups"] = fit.active.active_groups;
  out["active_coords"] = fit.active.active_coords;
  return out;
}

sgl::SolverConfig solver_config(double tol, int max_outer_iters) {
  sgl::SolverConfig config;
  config.tol = tol;
  config.max_outer_iters = max_outer_iters;
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sparse-group lasso core: solver, adaptive pipeline, diagnostics";

  py::register_exception<sgl::Error>(m, "SglError");

  m.def(
      "solve",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& group_sizes,
         double lambda, double gamma, const std::string& family,
         const std::optional<Eigen::VectorXd>& alpha_weights,
         const std::optional<Eigen::VectorXd>& xi_weights, double tol, int max_outer_iters,
         const std::optional<Eigen::VectorXd>& warm_start) {
        const sgl::Dataset data = dataset(X, y);
        const sgl::GroupStructure groups = sgl::build_groups(group_sizes);
        const sgl::PenaltySpec spec = spec_from(lambda, gamma, groups, alpha_weights, xi_weights);
        const sgl::FitResult fit =
            sgl::solve(data, groups, spec, sgl::family_from_string(family),
                       solver_config(tol, max_outer_iters), warm_start);
        return fit_dict(fit);
      },
      py::arg("X"), py::arg("y"), py::arg("group_sizes"), py::arg("lambda_"), py::arg("gamma"),
      py::arg("family") = "squared", py::arg("alpha_weights") = std::nullopt,
      py::arg("xi_weights") = std::nullopt, py::arg("tol") = 1e-8,
      py::arg("max_outer_iters") = 10000, py::arg("warm_start") = std::nullopt,
      "Penalized fit with an optimality-condition certificate.");

  m.def(
      "kkt_verify",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& group_sizes,
         const Eigen::VectorXd& theta, double lambda, double gamma, const std::string& family,
         const std::optional<Eigen::VectorXd>& alpha_weights,
         const std::optional<Eigen::VectorXd>& xi_weights) {
        const sgl::Dataset data = dataset(X, y);
        const sgl::GroupStructure groups = sgl::build_groups(group_sizes);
        const sgl::PenaltySpec spec = spec_from(lambda, gamma, groups, alpha_weights, xi_weights);
        const sgl::KktReport report =
            sgl::kkt_verify(data, groups, spec, sgl::family_from_string(family), theta);
        py::list per_group;
        for (const auto& entry : report.per_group) {
          py::dict g;
          g["group"] = entry.group;
          g["active"] = entry.active;
          g["residual"] = entry.residual;
          per_group.append(g);
        }
        py::dict out;
        out["residual"] = report.residual;
        out["per_group"] = per_group;
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("group_sizes"), py::arg("theta"), py::arg("lambda_"),
      py::arg("gamma"), py::arg("family") = "squared", py::arg("alpha_weights") = std::nullopt,
      py::arg("xi_weights") = std::nullopt,
      "Stationarity residual of a candidate solution.");

  m.def(
      "first_step",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::string& family) {
        return sgl::first_step_estimator(dataset(X, y), sgl::family_from_string(family));
      },
      py::arg("X"), py::arg("y"), py::arg("family") = "squared",
      "Unpenalized M-estimate used to seed adaptive weights.");

  m.def(
      "adaptive_weights",
      [](const Eigen::VectorXd& first_step, const std::vector<int>& group_sizes, int T, double eta,
         double mu, double kappa) {
        const sgl::GroupStructure groups = sgl::build_groups(group_sizes);
        sgl::AdaptiveConfig config;
        config.eta = eta;
        config.mu = mu;
        config.kappa = kappa;
        const sgl::AdaptiveWeights w = sgl::adaptive_weights(first_step, groups, config, T);
        return py::make_tuple(w.alpha_weights, w.xi_weights);
      },
      py::arg("first_step"), py::arg("group_sizes"), py::arg("T"), py::arg("eta") = 3.5,
      py::arg("mu") = 2.5, py::arg("kappa") = 0.2,
      "Per-coefficient and per-group weights from a first-step estimate.");

  m.def(
      "fit_estimator",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& group_sizes,
         const std::string& kind, const std::string& family, int cv_folds,
         const std::vector<double>& grid_factors, double eta, double mu, double kappa,
         double beta_rate, double alpha_rate, const std::string& xi_scale) {
        const sgl::Dataset data = dataset(X, y);
        const sgl::GroupStructure groups = sgl::build_groups(group_sizes);
        sgl::PipelineConfig config;
        config.cv_folds = cv_folds;
        if (!grid_factors.empty()) config.grid_factors = grid_factors;
        config.adaptive.eta = eta;
        config.adaptive.mu = mu;
        config.adaptive.kappa = kappa;
        config.adaptive.beta_rate = beta_rate;
        config.adaptive.alpha_rate = alpha_rate;
        config.xi_scale = sgl::xi_scale_from_string(xi_scale);
        const sgl::EstimatorOutput out =
            sgl::fit_estimator(data, groups, sgl::estimator_kind_from_string(kind),
                               sgl::family_from_string(family), config);
        py::dict result = fit_dict(out.fit);
        result["selected_lambda"] = out.spec.lambda;
        result["selected_gamma"] = out.spec.gamma;
        result["alpha_weights"] = out.spec.alpha_weights;
        result["xi_weights"] = out.spec.xi_weights;
        py::list grid;
        for (const auto& pt : out.cv.points) {
          py::dict g;
          g["lambda"] = pt.lambda;
          g["gamma"] = pt.gamma;
          g["mean_loss"] = pt.mean_loss;
          g["se_loss"] = pt.se_loss;
          grid.append(g);
        }
        result["cv_grid"] = grid;
        return result;
      },
      py::arg("X"), py::arg("y"), py::arg("group_sizes"), py::arg("kind") = "adaptive_sgl",
      py::arg("family") = "squared", py::arg("cv_folds") = 5,
      py::arg("grid_factors") = std::vector<double>{}, py::arg("eta") = 3.5, py::arg("mu") = 2.5,
      py::arg("kappa") = 0.2, py::arg("beta_rate") = 0.125, py::arg("alpha_rate") = 0.125,
      py::arg("xi_scale") = "unit",
      "Full pipeline: weights, cross-validated tuning, final fit.");

  m.def(
      "check_rates",
      [](double eta, double mu, double kappa, double beta_rate, double alpha_rate,
         double c_growth) {
        sgl::AdaptiveConfig config;
        config.eta = eta;
        config.mu = mu;
        config.kappa = kappa;
        config.beta_rate = beta_rate;
        config.alpha_rate = alpha_rate;
        config.c_growth = c_growth;
        const sgl::RateReport report = sgl::check_rate_feasibility(config);
        py::list conditions;
        for (const auto& cond : report.conditions) {
          py::dict c;
          c["name"] = cond.name;
          c["condition"] = cond.text;
          c["lhs"] = cond.lhs;
          c["satisfied"] = cond.satisfied;
          c["slack"] = cond.slack;
          conditions.append(c);
        }
        py::dict out;
        out["conditions"] = conditions;
        out["feasible"] = report.feasible;
        return out;
      },
      py::arg("eta") = 3.5, py::arg("mu") = 2.5, py::arg("kappa") = 0.2,
      py::arg("beta_rate") = 0.125, py::arg("alpha_rate") = 0.125,
      py::arg("c_growth") = 1.0 / 6.0,
      "Feasibility of the five exponent inequalities, with slacks.");

  m.def(
      "sandwich_covariance",
      [](const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
         const std::string& family, std::vector<int> group_sizes) {
        const sgl::Dataset data = dataset(X, y);
        if (group_sizes.empty()) group_sizes = {static_cast<int>(X.cols())};
        const sgl::GroupStructure groups = sgl::build_groups(group_sizes);
        const sgl::ActiveSets active = sgl::active_sets_from(theta, groups);
        return sgl::sandwich_covariance(data, theta, sgl::family_from_string(family), active);
      },
      py::arg("X"), py::arg("y"), py::arg("theta"), py::arg("family") = "squared",
      py::arg("group_sizes") = std::vector<int>{},
      "Asymptotic covariance estimate on the active coordinates.");
}
