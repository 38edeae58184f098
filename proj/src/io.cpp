#include "riskcast/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace riskcast {

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.15g", value);
    return buffer;
}

std::string read_text_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open file: " + path);
    std::stringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream file(path);
    if (!file) throw IoError("cannot write file: " + path);
    file << content;
    if (!file) throw IoError("write failed: " + path);
}

Json read_json_file(const std::string& path) {
    try {
        return Json::parse(read_text_file(path));
    } catch (const Json::parse_error& error) {
        throw IoError("invalid JSON in " + path + ": " + error.what());
    }
}

void write_json_file(const std::string& path, const Json& value) {
    write_text_file(path, value.dump(2) + "\n");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream stream(line);
    while (std::getline(stream, field, ',')) {
        const auto begin = field.find_first_not_of(" \t\r");
        const auto end = field.find_last_not_of(" \t\r");
        fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
    }
    return fields;
}

Json matrix_to_json(const Matrix& values) {
    Json rows = Json::array();
    for (int i = 0; i < values.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < values.cols(); ++j) row.push_back(values(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& value) {
    if (!value.is_array() || value.empty()) throw IoError("expected a non-empty JSON matrix");
    const int rows = static_cast<int>(value.size());
    const int cols = static_cast<int>(value[0].size());
    Matrix out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(value[i].size()) != cols) throw IoError("ragged JSON matrix");
        for (int j = 0; j < cols; ++j) out(i, j) = value[i][j].get<double>();
    }
    return out;
}

}  // namespace

void write_time_series_csv(const std::string& path, const std::vector<double>& node_times,
                           const std::vector<std::string>& region_ids, const Matrix& values) {
    if (static_cast<int>(node_times.size()) != values.rows())
        throw ValidationError("time series csv: node time count mismatch");
    if (static_cast<int>(region_ids.size()) != values.cols())
        throw ValidationError("time series csv: region count mismatch");
    std::ostringstream out;
    out << "time";
    for (const auto& region : region_ids) out << "," << region;
    out << "\n";
    for (int t = 0; t < values.rows(); ++t) {
        out << format_double(node_times[t]);
        for (int p = 0; p < values.cols(); ++p) out << "," << format_double(values(t, p));
        out << "\n";
    }
    write_text_file(path, out.str());
}

void write_panel_csv(const std::string& path, const LogRiskPanel& panel) {
    write_time_series_csv(path, panel.node_times, panel.region_ids, panel.values);
}

LogRiskPanel read_panel_csv(const std::string& path, DataMode mode) {
    std::istringstream stream(read_text_file(path));
    std::string line;
    if (!std::getline(stream, line)) throw IoError("empty panel file: " + path);
    const auto header = split_line(line);
    if (header.size() < 2 || header[0] != "time")
        throw IoError("panel csv must start with a 'time' column: " + path);

    LogRiskPanel panel;
    panel.mode = mode;
    panel.region_ids.assign(header.begin() + 1, header.end());
    std::vector<std::vector<double>> rows;
    while (std::getline(stream, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_line(line);
        if (fields.size() != header.size())
            throw IoError("panel csv row width mismatch in " + path);
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) row[i] = std::stod(fields[i]);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("panel csv has no data rows: " + path);
    panel.node_times.resize(rows.size());
    panel.values.resize(static_cast<int>(rows.size()), static_cast<int>(panel.region_ids.size()));
    for (std::size_t t = 0; t < rows.size(); ++t) {
        panel.node_times[t] = rows[t][0];
        for (std::size_t p = 1; p < rows[t].size(); ++p)
            panel.values(static_cast<int>(t), static_cast<int>(p - 1)) = rows[t][p];
    }
    return panel;
}

void write_counts_csv(const std::string& path, const CountPanel& counts) {
    std::ostringstream out;
    out << "date,region,count\n";
    for (int d = 0; d < counts.days(); ++d)
        for (int p = 0; p < counts.regions(); ++p)
            out << counts.dates[d] << "," << counts.region_ids[p] << "," << counts.counts(d, p) << "\n";
    write_text_file(path, out.str());
}

void write_labeled_matrix_csv(const std::string& path, const std::vector<std::string>& region_ids,
                              const Matrix& values) {
    if (values.rows() != static_cast<int>(region_ids.size()) ||
        values.cols() != static_cast<int>(region_ids.size()))
        throw ValidationError("labeled matrix csv: dimension mismatch");
    std::ostringstream out;
    out << "region";
    for (const auto& region : region_ids) out << "," << region;
    out << "\n";
    for (int p = 0; p < values.rows(); ++p) {
        out << region_ids[p];
        for (int q = 0; q < values.cols(); ++q) out << "," << format_double(values(p, q));
        out << "\n";
    }
    write_text_file(path, out.str());
}

SpatialWeighting read_weighting_csv(const std::string& path) {
    std::istringstream stream(read_text_file(path));
    std::string line;
    if (!std::getline(stream, line)) throw IoError("empty weighting file: " + path);
    const auto header = split_line(line);
    if (header.size() < 2) throw IoError("weighting csv needs a region-id header row: " + path);
    const int regions = static_cast<int>(header.size()) - 1;

    Matrix values(regions, regions);
    int row = 0;
    while (std::getline(stream, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (row >= regions) throw IoError("weighting csv has too many rows: " + path);
        const auto fields = split_line(line);
        if (static_cast<int>(fields.size()) != regions + 1)
            throw IoError("weighting csv row width mismatch: " + path);
        for (int q = 0; q < regions; ++q) values(row, q) = std::stod(fields[q + 1]);
        ++row;
    }
    if (row != regions) throw IoError("weighting csv has too few rows: " + path);
    return SpatialWeighting::custom(values);
}

void write_spectrum_csv(const std::string& path, const Vector& eigenvalues) {
    std::ostringstream out;
    out << "index,eigenvalue\n";
    for (int i = 0; i < eigenvalues.size(); ++i)
        out << (i + 1) << "," << format_double(eigenvalues[i]) << "\n";
    write_text_file(path, out.str());
}

Json trig_model_to_json(const TrigModel& model) {
    Json value;
    value["N"] = model.harmonics;
    value["frequencies"] = model.frequencies;
    value["regions"] = model.region_ids;
    value["A"] = matrix_to_json(model.cosine);
    value["B"] = matrix_to_json(model.sine);
    value["T_fit"] = model.fit_length;
    value["pin_b1"] = model.pin_b1;
    return value;
}

TrigModel trig_model_from_json(const Json& value) {
    TrigModel model;
    model.harmonics = value.at("N").get<int>();
    model.frequencies = value.at("frequencies").get<std::vector<double>>();
    model.region_ids = value.at("regions").get<std::vector<std::string>>();
    model.cosine = matrix_from_json(value.at("A"));
    model.sine = matrix_from_json(value.at("B"));
    model.fit_length = value.at("T_fit").get<int>();
    model.pin_b1 = value.value("pin_b1", false);
    return model;
}

void write_selection_csv(const std::string& path, const SelectionReport& report) {
    std::ostringstream out;
    out << "N,ratio,mean_risk\n";
    for (const auto& candidate : report.candidates)
        out << candidate.harmonics << "," << format_double(candidate.ratio) << ","
            << format_double(candidate.mean_risk) << "\n";
    write_text_file(path, out.str());
}

Json bayes_fit_to_json(const BayesFit& fit) {
    Json value;
    value["rho"] = matrix_to_json(fit.rho);
    value["sigma"] = std::vector<double>(fit.sigma.data(), fit.sigma.data() + fit.sigma.size());
    value["objective"] =
        std::vector<double>(fit.objective.data(), fit.objective.data() + fit.objective.size());
    value["prior"] = {{"a", matrix_to_json(fit.prior.a)},
                      {"b", matrix_to_json(fit.prior.b)},
                      {"scale", fit.prior.scale}};
    value["seed"] = fit.seed;
    return value;
}

BayesFit bayes_fit_from_json(const Json& value) {
    BayesFit fit;
    fit.rho = matrix_from_json(value.at("rho"));
    const auto sigma = value.at("sigma").get<std::vector<double>>();
    fit.sigma = Eigen::Map<const Vector>(sigma.data(), static_cast<int>(sigma.size()));
    const auto objective = value.at("objective").get<std::vector<double>>();
    fit.objective = Eigen::Map<const Vector>(objective.data(), static_cast<int>(objective.size()));
    fit.prior.a = matrix_from_json(value.at("prior").at("a"));
    fit.prior.b = matrix_from_json(value.at("prior").at("b"));
    fit.prior.scale = value.at("prior").at("scale").get<double>();
    fit.seed = value.at("seed").get<std::uint64_t>();
    return fit;
}

void write_trace_csv(const std::string& path, const std::vector<TraceEntry>& trace) {
    std::ostringstream out;
    out << "iteration,phase,best_objective\n";
    for (const auto& entry : trace)
        out << entry.iteration << "," << (entry.phase == 0 ? "genetic" : "quasi-newton") << ","
            << format_double(entry.best_objective) << "\n";
    write_text_file(path, out.str());
}

Json scenario_to_json(const Scenario& scenario) {
    Json value;
    value["T"] = scenario.sample_length;
    value["P"] = scenario.regions();
    value["seed"] = scenario.seed;
    value["noise_sigma"] = std::vector<double>(scenario.noise_sigma.data(),
                                               scenario.noise_sigma.data() + scenario.noise_sigma.size());
    value["true_rho"] = matrix_to_json(scenario.true_rho);
    value["true_model"] = trig_model_to_json(scenario.true_model);
    if (scenario.innovation_covariance)
        value["innovation_covariance"] = matrix_to_json(*scenario.innovation_covariance);
    return value;
}

Scenario scenario_from_json(const Json& value) {
    Scenario scenario;
    scenario.sample_length = value.at("T").get<int>();
    scenario.seed = value.at("seed").get<std::uint64_t>();
    const auto sigma = value.at("noise_sigma").get<std::vector<double>>();
    scenario.noise_sigma = Eigen::Map<const Vector>(sigma.data(), static_cast<int>(sigma.size()));
    scenario.true_rho = matrix_from_json(value.at("true_rho"));
    scenario.true_model = trig_model_from_json(value.at("true_model"));
    if (value.contains("innovation_covariance"))
        scenario.innovation_covariance = matrix_from_json(value.at("innovation_covariance"));
    return scenario;
}

Json ml_spec_to_json(const MlModelSpec& spec) {
    Json value;
    value["kind"] = model_kind_name(spec.kind);
    value["lags"] = spec.lags;
    value["seed"] = spec.seed;
    value["bandwidth"] = spec.bandwidth;
    value["lag_window"] = spec.lag_window;
    value["hidden"] = spec.hidden;
    value["spread"] = spec.spread;
    value["rbf_tolerance"] = spec.rbf_tolerance;
    value["rbf_max_nodes"] = spec.rbf_max_nodes;
    value["penalty"] = spec.penalty;
    value["tube"] = spec.tube;
    value["svr_kernel"] = spec.svr_kernel == SvrKernel::linear ? "linear" : "gaussian";
    value["svr_gamma"] = spec.svr_gamma;
    value["gp_tuned"] = spec.gp_tuned;
    value["gp_length_scale"] = spec.gp_length_scale;
    value["gp_signal_variance"] = spec.gp_signal_variance;
    value["gp_noise_variance"] = spec.gp_noise_variance;
    return value;
}

MlModelSpec ml_spec_from_json(const Json& value) {
    MlModelSpec spec;
    spec.kind = model_kind_from_name(value.at("kind").get<std::string>());
    spec.lags = value.value("lags", spec.lags);
    spec.seed = value.value("seed", spec.seed);
    spec.bandwidth = value.value("bandwidth", spec.bandwidth);
    spec.lag_window = value.value("lag_window", spec.lag_window);
    spec.hidden = value.value("hidden", spec.hidden);
    spec.spread = value.value("spread", spec.spread);
    spec.rbf_tolerance = value.value("rbf_tolerance", spec.rbf_tolerance);
    spec.rbf_max_nodes = value.value("rbf_max_nodes", spec.rbf_max_nodes);
    spec.penalty = value.value("penalty", spec.penalty);
    spec.tube = value.value("tube", spec.tube);
    if (value.value("svr_kernel", std::string("linear")) == "gaussian")
        spec.svr_kernel = SvrKernel::gaussian;
    spec.svr_gamma = value.value("svr_gamma", spec.svr_gamma);
    spec.gp_tuned = value.value("gp_tuned", spec.gp_tuned);
    spec.gp_length_scale = value.value("gp_length_scale", spec.gp_length_scale);
    spec.gp_signal_variance = value.value("gp_signal_variance", spec.gp_signal_variance);
    spec.gp_noise_variance = value.value("gp_noise_variance", spec.gp_noise_variance);
    return spec;
}

void write_smape_csv(const std::string& path, const SmapeTable& table) {
    std::ostringstream out;
    out << "region," << table.model << "\n";
    for (std::size_t p = 0; p < table.region_ids.size(); ++p)
        out << table.region_ids[p] << "," << format_double(table.rows[static_cast<int>(p)]) << "\n";
    out << "M.," << format_double(table.mean_row) << "\n";
    out << "T.," << format_double(table.total_row) << "\n";
    write_text_file(path, out.str());
}

std::string smape_tables_text(const std::vector<SmapeTable>& tables) {
    if (tables.empty()) throw ValidationError("smape text: no tables");
    const auto& regions = tables.front().region_ids;
    for (const auto& table : tables)
        if (table.region_ids != regions)
            throw ValidationError("smape text: tables disagree on regions");

    std::ostringstream out;
    out << std::left << std::setw(12) << "SC(x10^-2)";
    for (const auto& table : tables) out << std::right << std::setw(10) << table.model;
    out << "\n";
    auto print_row = [&](const std::string& label, auto value_of) {
        out << std::left << std::setw(12) << label;
        for (const auto& table : tables) {
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(4) << value_of(table) * 100.0;
            out << std::right << std::setw(10) << cell.str();
        }
        out << "\n";
    };
    for (std::size_t p = 0; p < regions.size(); ++p)
        print_row(regions[p], [p](const SmapeTable& table) { return table.rows[static_cast<int>(p)]; });
    print_row("M.", [](const SmapeTable& table) { return table.mean_row; });
    print_row("T.", [](const SmapeTable& table) { return table.total_row; });
    return out.str();
}

void write_ci_csv(const std::string& path, const CiSet& set, double level, int replicates,
                  std::uint64_t seed) {
    std::ostringstream out;
    out << "method,lower,upper,level,B,seed\n";
    for (const auto& [method, interval] : set)
        out << ci_method_name(method) << "," << format_double(interval.lower) << ","
            << format_double(interval.upper) << "," << format_double(level) << "," << replicates << ","
            << seed << "\n";
    write_text_file(path, out.str());
}

std::string ci_table_text(const std::vector<std::pair<std::string, CiSet>>& columns) {
    if (columns.empty()) throw ValidationError("ci text: no columns");
    std::ostringstream out;
    out << std::left << std::setw(6) << "CI/S";
    for (const auto& [label, _] : columns) out << std::right << std::setw(22) << label;
    out << "\n";
    for (const CiMethod method : all_ci_methods()) {
        out << std::left << std::setw(6) << ci_method_name(method);
        for (const auto& [_, set] : columns) {
            const auto it = set.find(method);
            if (it == set.end()) throw ValidationError("ci text: missing method " + ci_method_name(method));
            std::ostringstream cell;
            cell << "[" << std::setprecision(4) << it->second.lower << ", " << it->second.upper << "]";
            out << std::right << std::setw(22) << cell.str();
        }
        out << "\n";
    }
    return out.str();
}

void write_density_csv(const std::string& path, const DensityEstimate& estimate) {
    std::ostringstream out;
    out << "x,density\n";
    for (int i = 0; i < estimate.grid.size(); ++i)
        out << format_double(estimate.grid[i]) << "," << format_double(estimate.values[i]) << "\n";
    write_text_file(path, out.str());
}

}  // namespace riskcast
