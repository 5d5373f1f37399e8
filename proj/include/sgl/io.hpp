#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sgl/groups.hpp"
#include "sgl/loss.hpp"
#include "sgl/penalty.hpp"
#include "sgl/pipeline.hpp"
#include "sgl/sim.hpp"
#include "sgl/solver.hpp"

namespace sgl {

struct CsvTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;
};

CsvTable read_csv(const std::string& path);
Dataset dataset_from_csv(const CsvTable& table, const std::string& response_column);
void write_text_file(const std::string& path, const std::string& content);

/// Group sizes from an inline JSON array ("[3,2]") or a JSON file path.
std::vector<int> parse_group_sizes(const std::string& text);

nlohmann::json fit_to_json(const FitResult& fit, const GroupStructure& groups,
                           const PenaltySpec& spec, Family family);
nlohmann::json cv_report_to_json(const CvReport& report);
nlohmann::json rate_report_to_json(const RateReport& report);

AdaptiveConfig adaptive_config_from_json(const nlohmann::json& j);
ScenarioSpec scenario_from_json(const nlohmann::json& j);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

/// Reads a fit JSON back for certificate checking: theta, penalties, weights,
/// group sizes, family.
struct StoredFit {
  Eigen::VectorXd theta;
  GroupStructure groups;
  PenaltySpec spec;
  Family family = Family::squared;
};
StoredFit stored_fit_from_json(const nlohmann::json& j);

std::string replication_csv(const ScenarioResult& result);
std::string aggregate_csv(const ScenarioResult& result);
std::string aggregate_markdown(const ScenarioResult& result);
std::string curve_csv(const std::string& method, const std::vector<CurvePoint>& points);

nlohmann::json load_json_file(const std::string& path);

}  // namespace sgl
