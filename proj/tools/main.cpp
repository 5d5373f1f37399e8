#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sgl/errors.hpp"
#include "sgl/io.hpp"
#include "sgl/pipeline.hpp"
#include "sgl/sim.hpp"
#include "sgl/solver.hpp"

namespace {

struct FitArgs {
  std::string data_path;
  std::string response;
  std::string groups_text;
  double lambda = 0.0;
  double gamma = 0.0;
  std::string family = "squared";
  std::string xi_scale = "unit";
  std::string out_path;
};

struct CvArgs : FitArgs {
  std::string kind = "adaptive_sgl";
  int folds = 5;
  std::string grid;
  double eta = 3.5, mu = 2.5, kappa = 0.2;
  double beta_rate = 0.125, alpha_rate = 0.125, c_growth = 1.0 / 6.0;
};

struct VerifyArgs {
  std::string fit_path;
  std::string data_path;
  std::string response;
  std::string out_path;
};

struct RatesArgs {
  std::string config_path;
  double eta = 3.5, mu = 2.5, kappa = 0.2;
  double beta_rate = 0.125, alpha_rate = 0.125, c_growth = 1.0 / 6.0;
  std::string out_path;
};

struct SimArgs {
  std::string scenario_path;
  std::string methods = "lasso,adaptive_lasso,group_lasso,adaptive_group_lasso,sgl,adaptive_sgl";
  std::string out_dir = ".";
  std::string curve;
  int reps_override = 0;
};

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text << std::endl;
  } else {
    sgl::write_text_file(out_path, text);
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

sgl::Dataset load_dataset(const std::string& data_path, const std::string& response) {
  return sgl::dataset_from_csv(sgl::read_csv(data_path), response);
}

int run_fit(const FitArgs& args) {
  const sgl::Dataset data = load_dataset(args.data_path, args.response);
  const sgl::GroupStructure groups = sgl::build_groups(sgl::parse_group_sizes(args.groups_text));
  if (groups.d != data.d())
    sgl::throw_error(sgl::ErrorCode::DimensionMismatch,
                     "groups cover " + std::to_string(groups.d) + " coordinates, data has " +
                         std::to_string(data.d()));
  const sgl::Family family = sgl::family_from_string(args.family);
  const sgl::PenaltySpec spec = sgl::unit_penalty(
      args.lambda, args.gamma, groups, sgl::xi_scale_from_string(args.xi_scale));
  const sgl::SolverConfig solver_config;

  sgl::FitResult fit;
  if (args.lambda == 0.0 && args.gamma == 0.0) {
    // no penalty: the direct unpenalized M-estimator, including its
    // rank/conditioning diagnostics
    fit.theta_hat = sgl::first_step_estimator(data, family, solver_config);
    fit.active = sgl::active_sets_from(fit.theta_hat, groups, 0.0);
    fit.objective = sgl::loss_value(data, fit.theta_hat, family);
    fit.kkt_residual = sgl::kkt_verify(data, groups, spec, family, fit.theta_hat).residual;
    fit.iterations = 0;
    fit.converged = fit.kkt_residual <= solver_config.tol;
  } else {
    fit = sgl::solve(data, groups, spec, family, solver_config);
  }
  emit(args.out_path, sgl::fit_to_json(fit, groups, spec, family).dump(2));
  return 0;
}

int run_cv_fit(const CvArgs& args) {
  const sgl::Dataset data = load_dataset(args.data_path, args.response);
  const sgl::GroupStructure groups = sgl::build_groups(sgl::parse_group_sizes(args.groups_text));
  if (groups.d != data.d())
    sgl::throw_error(sgl::ErrorCode::DimensionMismatch,
                     "groups cover " + std::to_string(groups.d) + " coordinates, data has " +
                         std::to_string(data.d()));
  const sgl::Family family = sgl::family_from_string(args.family);

  sgl::PipelineConfig config;
  config.adaptive =
      sgl::AdaptiveConfig{args.eta, args.mu, args.kappa, args.beta_rate, args.alpha_rate,
                          args.c_growth};
  config.cv_folds = args.folds;
  config.xi_scale = sgl::xi_scale_from_string(args.xi_scale);
  if (!args.grid.empty()) {
    config.grid_factors.clear();
    for (const std::string& item : split_list(args.grid))
      config.grid_factors.push_back(std::stod(item));
  }
  const sgl::EstimatorKind kind = sgl::estimator_kind_from_string(args.kind);
  config.estimator_kind = kind;

  const sgl::EstimatorOutput est = sgl::fit_estimator(data, groups, kind, family, config);
  nlohmann::json j;
  j["kind"] = sgl::to_string(kind);
  j["fit"] = sgl::fit_to_json(est.fit, groups, est.spec, family);
  j["cv"] = sgl::cv_report_to_json(est.cv);
  emit(args.out_path, j.dump(2));
  return 0;
}

int run_verify(const VerifyArgs& args) {
  const sgl::StoredFit stored = sgl::stored_fit_from_json(sgl::load_json_file(args.fit_path));
  const sgl::Dataset data = load_dataset(args.data_path, args.response);
  if (stored.groups.d != data.d())
    sgl::throw_error(sgl::ErrorCode::DimensionMismatch,
                     "stored fit dimension does not match data");
  const sgl::KktReport report =
      sgl::kkt_verify(data, stored.groups, stored.spec, stored.family, stored.theta);
  nlohmann::json j;
  j["kkt_residual"] = report.residual;
  nlohmann::json groups_json = nlohmann::json::array();
  for (const auto& g : report.per_group)
    groups_json.push_back(
        {{"group", g.group}, {"active", g.active}, {"residual", g.residual}});
  j["per_group"] = std::move(groups_json);
  emit(args.out_path, j.dump(2));
  return 0;
}

int run_check_rates(const RatesArgs& args) {
  sgl::AdaptiveConfig config;
  if (!args.config_path.empty()) {
    config = sgl::adaptive_config_from_json(sgl::load_json_file(args.config_path));
  } else {
    config = sgl::AdaptiveConfig{args.eta, args.mu, args.kappa, args.beta_rate, args.alpha_rate,
                                 args.c_growth};
  }
  emit(args.out_path, sgl::rate_report_to_json(sgl::check_rate_feasibility(config)).dump(2));
  return 0;
}

int run_simulate(const SimArgs& args) {
  const nlohmann::json sj = sgl::load_json_file(args.scenario_path);
  sgl::ScenarioSpec spec = sgl::scenario_from_json(sj);
  if (args.reps_override > 0) spec.replications = args.reps_override;
  sgl::PipelineConfig config;
  if (sj.contains("pipeline")) config = sgl::pipeline_config_from_json(sj["pipeline"]);

  std::vector<sgl::MethodSpec> methods;
  for (const std::string& name : split_list(args.methods))
    methods.push_back(sgl::MethodSpec::parse(name));
  if (methods.empty())
    sgl::throw_error(sgl::ErrorCode::UsageError, "no methods given");

  std::filesystem::create_directories(args.out_dir);
  const std::filesystem::path out_dir(args.out_dir);

  if (!args.curve.empty()) {
    std::vector<int> T_list;
    for (const std::string& item : split_list(args.curve)) T_list.push_back(std::stoi(item));
    std::ostringstream all;
    bool first = true;
    for (const auto& method : methods) {
      const auto points = sgl::selection_consistency_curve(spec, T_list, method,
                                                           spec.replications, config);
      const std::string block = sgl::curve_csv(method.name(), points);
      if (first) {
        all << block;
        first = false;
      } else {
        all << block.substr(block.find('\n') + 1);  // drop the repeated header
      }
    }
    sgl::write_text_file((out_dir / "curve.csv").string(), all.str());
    std::cout << "wrote " << (out_dir / "curve.csv").string() << std::endl;
    return 0;
  }

  const sgl::ScenarioResult result = sgl::run_scenario(spec, methods, config);
  sgl::write_text_file((out_dir / "replications.csv").string(), sgl::replication_csv(result));
  sgl::write_text_file((out_dir / "aggregate.csv").string(), sgl::aggregate_csv(result));
  sgl::write_text_file((out_dir / "aggregate.md").string(), sgl::aggregate_markdown(result));
  std::cout << sgl::aggregate_markdown(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse-group lasso estimation toolkit"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "penalized fit at fixed tuning");
  fit->add_option("--data", fit_args.data_path, "CSV with covariates and response")->required();
  fit->add_option("--response", fit_args.response, "response column name")->required();
  fit->add_option("--groups", fit_args.groups_text, "group sizes, inline JSON or file")
      ->required();
  fit->add_option("--lambda", fit_args.lambda, "l1 tuning");
  fit->add_option("--gamma", fit_args.gamma, "group tuning");
  fit->add_option("--family", fit_args.family, "squared|logistic");
  fit->add_option("--xi-scale", fit_args.xi_scale, "unit|sqrt_size");
  fit->add_option("--out", fit_args.out_path, "output JSON path (default stdout)");

  CvArgs cv_args;
  CLI::App* cv = app.add_subcommand("cv-fit", "cross-validated fit for one estimator kind");
  cv->add_option("--data", cv_args.data_path)->required();
  cv->add_option("--response", cv_args.response)->required();
  cv->add_option("--groups", cv_args.groups_text)->required();
  cv->add_option("--kind", cv_args.kind,
                 "lasso|adaptive_lasso|group_lasso|adaptive_group_lasso|sgl|adaptive_sgl");
  cv->add_option("--family", cv_args.family);
  cv->add_option("--folds", cv_args.folds);
  cv->add_option("--grid", cv_args.grid, "comma-separated grid factors");
  cv->add_option("--eta", cv_args.eta);
  cv->add_option("--mu", cv_args.mu);
  cv->add_option("--kappa", cv_args.kappa);
  cv->add_option("--beta-rate", cv_args.beta_rate);
  cv->add_option("--alpha-rate", cv_args.alpha_rate);
  cv->add_option("--c-growth", cv_args.c_growth);
  cv->add_option("--xi-scale", cv_args.xi_scale);
  cv->add_option("--out", cv_args.out_path);

  VerifyArgs verify_args;
  CLI::App* verify = app.add_subcommand("verify", "re-check optimality of a stored fit");
  verify->add_option("--fit", verify_args.fit_path, "fit JSON produced by fit/cv-fit")
      ->required();
  verify->add_option("--data", verify_args.data_path)->required();
  verify->add_option("--response", verify_args.response)->required();
  verify->add_option("--out", verify_args.out_path);

  RatesArgs rates_args;
  CLI::App* rates = app.add_subcommand("check-rates", "rate-exponent feasibility report");
  rates->add_option("--config", rates_args.config_path, "JSON with eta/mu/kappa/rates");
  rates->add_option("--eta", rates_args.eta);
  rates->add_option("--mu", rates_args.mu);
  rates->add_option("--kappa", rates_args.kappa);
  rates->add_option("--beta-rate", rates_args.beta_rate);
  rates->add_option("--alpha-rate", rates_args.alpha_rate);
  rates->add_option("--c-growth", rates_args.c_growth);
  rates->add_option("--out", rates_args.out_path);

  SimArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo replication study");
  sim->add_option("--scenario", sim_args.scenario_path, "scenario JSON")->required();
  sim->add_option("--methods", sim_args.methods, "comma-separated method list");
  sim->add_option("--out", sim_args.out_dir, "output directory");
  sim->add_option("--curve", sim_args.curve, "comma-separated T list for the consistency curve");
  sim->add_option("--reps", sim_args.reps_override, "override replication count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fit->parsed()) return run_fit(fit_args);
    if (cv->parsed()) return run_cv_fit(cv_args);
    if (verify->parsed()) return run_verify(verify_args);
    if (rates->parsed()) return run_check_rates(rates_args);
    if (sim->parsed()) return run_simulate(sim_args);
    std::cerr << "no subcommand" << std::endl;
    return 2;
  } catch (const sgl::Error& e) {
    switch (e.code()) {
      case sgl::ErrorCode::UsageError:
        std::cerr << e.what() << std::endl;
        return 2;
      case sgl::ErrorCode::FileNotFound:
        std::cerr << e.what() << std::endl;
        return 66;
      default: {
        nlohmann::json j;
        j["error"] = {{"code", sgl::to_string(e.code())}, {"message", e.message()}};
        std::cout << j.dump(2) << std::endl;
        return 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << std::endl;
    return 1;
  }
}
