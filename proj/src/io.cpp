#include "sgl/io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sgl/errors.hpp"

namespace sgl {

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array()) throw_error(ErrorCode::InvalidData, std::string(what) + " must be an array");
  Eigen::VectorXd v(arr.size());
  Eigen::Index i = 0;
  for (const auto& x : arr) {
    if (!x.is_number()) throw_error(ErrorCode::InvalidData, std::string(what) + " must be numeric");
    v(i++) = x.get<double>();
  }
  return v;
}

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw_error(ErrorCode::FileNotFound, "no such file: " + path);
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  require_file(path);
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::FileNotFound, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw_error(ErrorCode::InvalidData, "empty CSV: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  CsvTable table;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.columns.push_back(cell);
  }
  if (table.columns.empty()) throw_error(ErrorCode::InvalidData, "CSV has no columns: " + path);

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw_error(ErrorCode::InvalidData,
                    path + ":" + std::to_string(lineno) + ": not a number: '" + cell + "'");
      }
    }
    if (row.size() != table.columns.size())
      throw_error(ErrorCode::InvalidData,
                  path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(table.columns.size()) + " cells, got " +
                      std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw_error(ErrorCode::InvalidData, "CSV has no data rows: " + path);

  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.columns.size()));
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < rows[r].size(); ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return table;
}

Dataset dataset_from_csv(const CsvTable& table, const std::string& response_column) {
  int response_idx = -1;
  for (size_t c = 0; c < table.columns.size(); ++c)
    if (table.columns[c] == response_column) {
      response_idx = static_cast<int>(c);
      break;
    }
  if (response_idx < 0)
    throw_error(ErrorCode::InvalidData, "response column '" + response_column + "' not in CSV");
  if (table.columns.size() < 2)
    throw_error(ErrorCode::InvalidData, "CSV needs at least one covariate column");

  const Eigen::Index T = table.values.rows();
  const Eigen::Index d = table.values.cols() - 1;
  Eigen::MatrixXd X(T, d);
  Eigen::Index out = 0;
  for (Eigen::Index c = 0; c < table.values.cols(); ++c) {
    if (c == response_idx) continue;
    X.col(out++) = table.values.col(c);
  }
  return make_dataset(std::move(X), table.values.col(response_idx));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw_error(ErrorCode::InvalidData, "cannot write " + path);
  out << content;
}

nlohmann::json load_json_file(const std::string& path) {
  require_file(path);
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::FileNotFound, "cannot open " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw_error(ErrorCode::InvalidData, path + ": " + e.what());
  }
}

std::vector<int> parse_group_sizes(const std::string& text) {
  nlohmann::json j;
  if (!text.empty() && text.front() == '[') {
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw_error(ErrorCode::InvalidData, std::string("bad group sizes: ") + e.what());
    }
  } else {
    j = load_json_file(text);
  }
  if (!j.is_array()) throw_error(ErrorCode::InvalidData, "group sizes must be a JSON array");
  std::vector<int> sizes;
  for (const auto& x : j) {
    if (!x.is_number_integer() || x.get<long>() < 1)
      throw_error(ErrorCode::InvalidData, "group sizes must be positive integers");
    sizes.push_back(x.get<int>());
  }
  return sizes;
}

nlohmann::json fit_to_json(const FitResult& fit, const GroupStructure& groups,
                           const PenaltySpec& spec, Family family) {
  nlohmann::json j;
  j["theta"] = vec_to_json(fit.theta_hat);
  j["groups"] = groups.sizes;
  j["lambda"] = spec.lambda;
  j["gamma"] = spec.gamma;
  j["alpha_weights"] = vec_to_json(spec.alpha_weights);
  j["xi_weights"] = vec_to_json(spec.xi_weights);
  j["family"] = to_string(family);
  j["objective"] = fit.objective;
  j["kkt_residual"] = fit.kkt_residual;
  j["iterations"] = fit.iterations;
  j["converged"] = fit.converged;
  j["active_groups"] = fit.active.active_groups;   // 0-based indices
  j["active_coords"] = fit.active.active_coords;   // 0-based indices
  return j;
}

StoredFit stored_fit_from_json(const nlohmann::json& j) {
  for (const char* key :
       {"theta", "groups", "lambda", "gamma", "alpha_weights", "xi_weights", "family"})
    if (!j.contains(key))
      throw_error(ErrorCode::InvalidData, std::string("fit JSON missing '") + key + "'");
  StoredFit stored;
  stored.theta = vec_from_json(j["theta"], "theta");
  std::vector<int> sizes;
  for (const auto& x : j["groups"]) sizes.push_back(x.get<int>());
  stored.groups = build_groups(sizes);
  stored.spec = make_penalty_spec(j["lambda"].get<double>(), j["gamma"].get<double>(),
                                  vec_from_json(j["alpha_weights"], "alpha_weights"),
                                  vec_from_json(j["xi_weights"], "xi_weights"), stored.groups);
  stored.family = family_from_string(j["family"].get<std::string>());
  return stored;
}

nlohmann::json cv_report_to_json(const CvReport& report) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& p : report.points)
    grid.push_back({{"lambda", p.lambda},
                    {"gamma", p.gamma},
                    {"mean_validation_loss", p.mean_loss},
                    {"se_validation_loss", p.se_loss}});
  nlohmann::json j;
  j["grid"] = std::move(grid);
  j["selected"] = {{"lambda", report.selected_lambda}, {"gamma", report.selected_gamma}};
  j["one_se_selected"] = {{"lambda", report.one_se_lambda}, {"gamma", report.one_se_gamma}};
  return j;
}

nlohmann::json rate_report_to_json(const RateReport& report) {
  nlohmann::json conds = nlohmann::json::array();
  for (const auto& c : report.conditions)
    conds.push_back({{"name", c.name},
                     {"condition", c.text},
                     {"lhs", c.lhs},
                     {"satisfied", c.satisfied},
                     {"slack", c.slack}});
  return nlohmann::json{{"conditions", std::move(conds)}, {"feasible", report.feasible}};
}

AdaptiveConfig adaptive_config_from_json(const nlohmann::json& j) {
  AdaptiveConfig config;
  config.eta = j.value("eta", config.eta);
  config.mu = j.value("mu", config.mu);
  config.kappa = j.value("kappa", config.kappa);
  config.beta_rate = j.value("beta_rate", config.beta_rate);
  config.alpha_rate = j.value("alpha_rate", config.alpha_rate);
  config.c_growth = j.value("c_growth", config.c_growth);
  return config;
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  ScenarioSpec spec;
  spec.T = j.value("T", spec.T);
  spec.x_scale = j.value("x_scale", spec.x_scale);
  spec.n_groups = j.value("n_groups", spec.n_groups);
  spec.sigma = j.value("sigma", spec.sigma);
  if (j.contains("rho_choices"))
    spec.rho_choices = j["rho_choices"].get<std::vector<double>>();
  if (j.contains("group_size_range")) {
    const auto& r = j["group_size_range"];
    if (!r.is_array() || r.size() != 2)
      throw_error(ErrorCode::InvalidData, "group_size_range must be [lo, hi]");
    spec.group_size_min = r[0].get<int>();
    spec.group_size_max = r[1].get<int>();
  }
  if (j.contains("signal_range")) {
    const auto& r = j["signal_range"];
    if (!r.is_array() || r.size() != 2)
      throw_error(ErrorCode::InvalidData, "signal_range must be [lo, hi]");
    spec.signal_min = r[0].get<double>();
    spec.signal_max = r[1].get<double>();
  }
  spec.replications = j.value("replications", spec.replications);
  spec.master_seed = j.value("master_seed", spec.master_seed);
  return spec;
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  PipelineConfig config;
  if (j.contains("adaptive")) config.adaptive = adaptive_config_from_json(j["adaptive"]);
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    config.solver.max_outer_iters = s.value("max_outer_iters", config.solver.max_outer_iters);
    config.solver.tol = s.value("tol", config.solver.tol);
    config.solver.inner_tol = s.value("inner_tol", config.solver.inner_tol);
  }
  config.cv_folds = j.value("cv_folds", config.cv_folds);
  if (j.contains("grid_factors"))
    config.grid_factors = j["grid_factors"].get<std::vector<double>>();
  if (j.contains("xi_scale"))
    config.xi_scale = xi_scale_from_string(j["xi_scale"].get<std::string>());
  if (j.contains("estimator_kind"))
    config.estimator_kind = estimator_kind_from_string(j["estimator_kind"].get<std::string>());
  return config;
}

namespace {

std::string format_double(double x) {
  std::ostringstream ss;
  ss.precision(12);
  ss << x;
  return ss.str();
}

}  // namespace

std::string replication_csv(const ScenarioResult& result) {
  std::ostringstream out;
  out << "method,rep,mse,C,IC,exact\n";
  for (const auto& rec : result.records) {
    if (rec.failed) continue;
    out << rec.method << ',' << rec.rep << ',' << format_double(rec.mse) << ',' << rec.C << ','
        << rec.IC << ',' << (rec.exact_recovery ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string aggregate_csv(const ScenarioResult& result) {
  std::ostringstream out;
  out << "method,mse,C,IC,exact_rate\n";
  for (const auto& agg : result.aggregates)
    out << agg.method << ',' << format_double(agg.mean_mse) << ',' << format_double(agg.mean_C)
        << ',' << format_double(agg.mean_IC) << ',' << format_double(agg.exact_rate) << '\n';
  return out.str();
}

std::string aggregate_markdown(const ScenarioResult& result) {
  std::ostringstream out;
  out << "| method | MSE | C | IC | exact rate | ok | failed |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& agg : result.aggregates)
    out << "| " << agg.method << " | " << format_double(agg.mean_mse) << " | "
        << format_double(agg.mean_C) << " | " << format_double(agg.mean_IC) << " | "
        << format_double(agg.exact_rate) << " | " << agg.n_ok << " | " << agg.n_failed
        << " |\n";
  return out.str();
}

std::string curve_csv(const std::string& method, const std::vector<CurvePoint>& points) {
  std::ostringstream out;
  out << "method,T,recovery_rate,se,replications\n";
  for (const auto& pt : points)
    out << method << ',' << pt.T << ',' << format_double(pt.recovery_rate) << ','
        << format_double(pt.standard_error) << ',' << pt.replications << '\n';
  return out.str();
}

}  // namespace sgl
