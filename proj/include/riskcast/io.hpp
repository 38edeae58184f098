#pragma once

#include <json.hpp>
#include <string>

#include "riskcast/bayes.hpp"
#include "riskcast/bootstrap.hpp"
#include "riskcast/evaluation.hpp"
#include "riskcast/synth.hpp"

namespace riskcast {

using Json = nlohmann::json;

// All numeric CSV output uses 15 significant digits.
std::string format_double(double value);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& value);

// time-indexed table: node_times first column, one column per region
void write_time_series_csv(const std::string& path, const std::vector<double>& node_times,
                           const std::vector<std::string>& region_ids, const Matrix& values);
LogRiskPanel read_panel_csv(const std::string& path, DataMode mode = DataMode::hard);
void write_panel_csv(const std::string& path, const LogRiskPanel& panel);

void write_counts_csv(const std::string& path, const CountPanel& counts);

// P x P matrix with a region-id header row and row labels
void write_labeled_matrix_csv(const std::string& path, const std::vector<std::string>& region_ids,
                              const Matrix& values);
SpatialWeighting read_weighting_csv(const std::string& path);

void write_spectrum_csv(const std::string& path, const Vector& eigenvalues);

Json trig_model_to_json(const TrigModel& model);
TrigModel trig_model_from_json(const Json& value);

void write_selection_csv(const std::string& path, const SelectionReport& report);

Json bayes_fit_to_json(const BayesFit& fit);
BayesFit bayes_fit_from_json(const Json& value);
void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace);

Json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const Json& value);

Json ml_spec_to_json(const MlModelSpec& spec);
MlModelSpec ml_spec_from_json(const Json& value);

void write_smape_csv(const std::string& path, const SmapeTable& table);
// Survey-table rendering: C1..CP rows then M. and T., values shown x100.
std::string smape_tables_text(const std::vector<SmapeTable>& tables);

void write_ci_csv(const std::string& path, const CiSet& set, double level, int replicates,
                  std::uint64_t seed);
std::string ci_table_text(const std::vector<std::pair<std::string, CiSet>>& columns);

void write_density_csv(const std::string& path, const DensityEstimate& estimate);

}  // namespace riskcast
