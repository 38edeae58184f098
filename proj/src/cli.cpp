#include "riskcast/cli.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include "riskcast/rng.hpp"
#include "riskcast/synth.hpp"

namespace riskcast::cli {

namespace fs = std::filesystem;

namespace {

std::string out_path(const RunConfig& config, const std::string& name) {
    fs::create_directories(config.out_dir);
    return (fs::path(config.out_dir) / name).string();
}

// Every command drops its effective configuration next to the outputs so a
// run can be replayed exactly.
void save_config(const RunConfig& config, const std::string& command) {
    Json value = config_to_json(config);
    value["command"] = command;
    write_json_file(out_path(config, "run_config.json"), value);
}

SpatialWeighting load_weighting(const RunConfig& config, int regions) {
    if (config.weighting_kind == "identity") return SpatialWeighting::identity(regions);
    if (config.weighting_kind == "custom") {
        if (config.weighting_path.empty())
            throw ValidationError("custom weighting requires --weighting FILE");
        SpatialWeighting w = read_weighting_csv(config.weighting_path);
        if (w.matrix.rows() != regions)
            throw ValidationError("weighting file region count does not match the panel");
        return w;
    }
    if (config.weighting_kind == "gaussian") {
        if (config.centroids_path.empty())
            throw ValidationError("gaussian weighting requires --centroids FILE");
        // centroids: region,x,y header
        std::istringstream stream(read_text_file(config.centroids_path));
        std::string line;
        std::getline(stream, line);
        std::vector<std::array<double, 2>> points;
        while (std::getline(stream, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::stringstream fields(line);
            std::string region, x, y;
            std::getline(fields, region, ',');
            std::getline(fields, x, ',');
            std::getline(fields, y, ',');
            points.push_back({std::stod(x), std::stod(y)});
        }
        if (static_cast<int>(points.size()) != regions)
            throw ValidationError("centroid count does not match the panel regions");
        Matrix centroids(regions, 2);
        for (int p = 0; p < regions; ++p) {
            centroids(p, 0) = points[p][0];
            centroids(p, 1) = points[p][1];
        }
        return SpatialWeighting::gaussian(centroids, config.weighting_bandwidth);
    }
    throw ValidationError("unknown weighting kind: " + config.weighting_kind);
}

LogRiskPanel load_panel(const RunConfig& config) {
    if (config.panel_path.empty()) throw ValidationError("this command requires --panel FILE");
    const DataMode mode = config.mode == "soft" ? DataMode::soft : DataMode::hard;
    return read_panel_csv(config.panel_path, mode);
}

TrigModel load_model(const RunConfig& config) {
    if (config.model_path.empty()) throw ValidationError("this command requires --model FILE");
    return trig_model_from_json(read_json_file(config.model_path));
}

int effective_truncation(const RunConfig& config, int sample_length, int regions) {
    const int k = config.truncation > 0 ? config.truncation : default_truncation(sample_length);
    if (k > regions)
        throw ValidationError("truncation " + std::to_string(k) + " exceeds region count " +
                              std::to_string(regions));
    return k;
}

Matrix residual_prediction_panel(const Matrix& rho, const ResidualPanel& res) {
    Matrix out = Matrix::Zero(res.nodes(), res.regions());
    for (int t = 1; t < res.nodes(); ++t)
        out.row(t) = (rho * res.values.row(t - 1).transpose()).transpose();
    return out;
}

PosteriorOptimizerOptions optimizer_options(const RunConfig& config, bool for_cv) {
    PosteriorOptimizerOptions options;
    options.population = for_cv ? config.cv_ga_population : config.ga_population;
    options.generations = for_cv ? config.cv_ga_generations : config.ga_generations;
    options.jobs = config.jobs;
    return options;
}

BetaPrior effective_prior(const RunConfig& config, const ResidualPanel& res) {
    const int regions = res.regions();
    if (!config.prior_from_bootstrap)
        return BetaPrior::shared(regions, config.prior_a, config.prior_b, config.prior_scale);

    // Bootstrap the empirical autocorrelation projections by resampling
    // transition pairs, then fit the Beta shape by moments.
    const TransitionSet base = transitions(res);
    const int pairs = static_cast<int>(base.lagged.rows());
    const int replicates = config.prior_bootstrap_samples;
    Matrix samples(replicates, regions * regions);
    const Rng master(config.seed);
    for (int r = 0; r < replicates; ++r) {
        Rng rng = master.derive(static_cast<std::uint64_t>(r) + 0x9d2c5680ULL);
        Matrix lagged(pairs, regions), leading(pairs, regions);
        for (int i = 0; i < pairs; ++i) {
            const int pick = static_cast<int>(rng.uniform_index(pairs));
            lagged.row(i) = base.lagged.row(pick);
            leading.row(i) = base.leading.row(pick);
        }
        const Matrix r0 = (lagged.transpose() * lagged) / pairs;
        const Matrix r1 = (leading.transpose() * lagged) / pairs;
        const Matrix rho = r1 * r0.ldlt().solve(Matrix::Identity(regions, regions));
        for (int p = 0; p < regions; ++p)
            for (int q = 0; q < regions; ++q) samples(r, p * regions + q) = rho(p, q);
    }
    const PriorSuggestion suggestion =
        fit_prior_from_bootstrap(samples, config.prior_scale, regions);
    return BetaPrior::shared(regions, suggestion.a, suggestion.b, config.prior_scale);
}

}  // namespace

RunConfig config_from_json(const Json& value) {
    RunConfig config;
    auto get = [&value](const char* key, auto fallback) {
        using T = decltype(fallback);
        return value.contains(key) ? value.at(key).get<T>() : fallback;
    };
    config.input = get("input", config.input);
    config.panel_path = get("panel", config.panel_path);
    config.model_path = get("model", config.model_path);
    config.weighting_path = get("weighting", config.weighting_path);
    config.centroids_path = get("centroids", config.centroids_path);
    config.prediction_path = get("prediction", config.prediction_path);
    config.out_dir = get("out", config.out_dir);
    config.nodes = get("nodes", config.nodes);
    config.log_floor = get("log_floor", config.log_floor);
    config.mode = get("mode", config.mode);
    config.weighting_kind = get("weighting_kind", config.weighting_kind);
    config.weighting_bandwidth = get("weighting_bandwidth", config.weighting_bandwidth);
    config.harmonics = get("harmonics", config.harmonics);
    config.candidates = get("candidates", config.candidates);
    config.selection_threshold = get("selection_threshold", config.selection_threshold);
    config.pin_b1 = get("pin_b1", config.pin_b1);
    config.truncation = get("truncation", config.truncation);
    config.center_covariances = get("center_covariances", config.center_covariances);
    config.prior_a = get("prior_a", config.prior_a);
    config.prior_b = get("prior_b", config.prior_b);
    config.prior_scale = get("prior_scale", config.prior_scale);
    config.prior_from_bootstrap = get("prior_from_bootstrap", config.prior_from_bootstrap);
    config.prior_bootstrap_samples = get("prior_bootstrap_samples", config.prior_bootstrap_samples);
    config.ga_population = get("ga_population", config.ga_population);
    config.ga_generations = get("ga_generations", config.ga_generations);
    config.rho_source = get("rho_source", config.rho_source);
    config.inverse_weighting = get("inverse_weighting", config.inverse_weighting);
    config.cv_folds = get("cv_folds", config.cv_folds);
    config.cv_runs = get("cv_runs", config.cv_runs);
    config.cv_lags = get("cv_lags", config.cv_lags);
    config.holdout_head = get("holdout_head", config.holdout_head);
    config.holdout_tail = get("holdout_tail", config.holdout_tail);
    config.models = get("models", config.models);
    config.cv_ga_population = get("cv_ga_population", config.cv_ga_population);
    config.cv_ga_generations = get("cv_ga_generations", config.cv_ga_generations);
    config.bootstrap_replicates = get("bootstrap_replicates", config.bootstrap_replicates);
    config.level = get("level", config.level);
    config.bootstrap_target = get("bootstrap_target", config.bootstrap_target);
    config.resample_regions = get("resample_regions", config.resample_regions);
    config.synth_regions = get("synth_regions", config.synth_regions);
    config.synth_days = get("synth_days", config.synth_days);
    config.synth_harmonics = get("synth_harmonics", config.synth_harmonics);
    config.synth_rho = get("synth_rho", config.synth_rho);
    config.synth_sigma = get("synth_sigma", config.synth_sigma);
    config.seed = get("seed", config.seed);
    config.jobs = get("jobs", config.jobs);
    return config;
}

Json config_to_json(const RunConfig& config) {
    Json value;
    value["input"] = config.input;
    value["panel"] = config.panel_path;
    value["model"] = config.model_path;
    value["weighting"] = config.weighting_path;
    value["centroids"] = config.centroids_path;
    value["prediction"] = config.prediction_path;
    value["out"] = config.out_dir;
    value["nodes"] = config.nodes;
    value["log_floor"] = config.log_floor;
    value["mode"] = config.mode;
    value["weighting_kind"] = config.weighting_kind;
    value["weighting_bandwidth"] = config.weighting_bandwidth;
    value["harmonics"] = config.harmonics;
    value["candidates"] = config.candidates;
    value["selection_threshold"] = config.selection_threshold;
    value["pin_b1"] = config.pin_b1;
    value["truncation"] = config.truncation;
    value["center_covariances"] = config.center_covariances;
    value["prior_a"] = config.prior_a;
    value["prior_b"] = config.prior_b;
    value["prior_scale"] = config.prior_scale;
    value["prior_from_bootstrap"] = config.prior_from_bootstrap;
    value["prior_bootstrap_samples"] = config.prior_bootstrap_samples;
    value["ga_population"] = config.ga_population;
    value["ga_generations"] = config.ga_generations;
    value["rho_source"] = config.rho_source;
    value["inverse_weighting"] = config.inverse_weighting;
    value["cv_folds"] = config.cv_folds;
    value["cv_runs"] = config.cv_runs;
    value["cv_lags"] = config.cv_lags;
    value["holdout_head"] = config.holdout_head;
    value["holdout_tail"] = config.holdout_tail;
    value["models"] = config.models;
    value["cv_ga_population"] = config.cv_ga_population;
    value["cv_ga_generations"] = config.cv_ga_generations;
    value["bootstrap_replicates"] = config.bootstrap_replicates;
    value["level"] = config.level;
    value["bootstrap_target"] = config.bootstrap_target;
    value["resample_regions"] = config.resample_regions;
    value["synth_regions"] = config.synth_regions;
    value["synth_days"] = config.synth_days;
    value["synth_harmonics"] = config.synth_harmonics;
    value["synth_rho"] = config.synth_rho;
    value["synth_sigma"] = config.synth_sigma;
    value["seed"] = config.seed;
    value["jobs"] = config.jobs;
    return value;
}

RunConfig load_config(const std::string& path) { return config_from_json(read_json_file(path)); }

void run_synth(const RunConfig& config) {
    const int regions = config.synth_regions;
    const int t_len = config.nodes;

    Scenario scenario;
    scenario.sample_length = t_len;
    scenario.seed = config.seed;
    scenario.noise_sigma = Vector::Constant(regions, config.synth_sigma);
    scenario.true_rho = Matrix::Constant(regions, regions, config.synth_rho * 0.1 / regions) +
                        config.synth_rho * Matrix::Identity(regions, regions);

    scenario.true_model.harmonics = config.synth_harmonics;
    scenario.true_model.frequencies = harmonic_frequencies(config.synth_harmonics, t_len);
    scenario.true_model.fit_length = t_len;
    scenario.true_model.region_ids.resize(regions);
    for (int p = 0; p < regions; ++p) scenario.true_model.region_ids[p] = "C" + std::to_string(p + 1);
    Rng rng(config.seed ^ 0x5bf03635ULL);
    scenario.true_model.cosine.resize(config.synth_harmonics, regions);
    scenario.true_model.sine.resize(config.synth_harmonics, regions);
    for (int p = 0; p < regions; ++p) {
        scenario.true_model.cosine(0, p) = rng.uniform(3.0, 4.5);  // sets the overall intensity scale
        scenario.true_model.sine(0, p) = rng.uniform(-0.3, 0.3);
        for (int k = 1; k < config.synth_harmonics; ++k) {
            scenario.true_model.cosine(k, p) = rng.uniform(-0.5, 0.5) / (k + 1);
            scenario.true_model.sine(k, p) = rng.uniform(-0.5, 0.5) / (k + 1);
        }
    }

    const SyntheticPanel synthetic = generate_panel(scenario);
    std::vector<double> edges(config.synth_days + 1);
    for (int d = 0; d <= config.synth_days; ++d)
        edges[d] = 1.0 + (static_cast<double>(t_len) - 1.0) * d / config.synth_days;
    const CountSimulation counts = generate_counts(synthetic.panel, edges, config.seed + 1);

    write_json_file(out_path(config, "scenario.json"), scenario_to_json(scenario));
    write_panel_csv(out_path(config, "true_panel.csv"), synthetic.panel);
    write_time_series_csv(out_path(config, "true_residuals.csv"), synthetic.residual.node_times,
                          synthetic.residual.region_ids, synthetic.residual.values);
    write_counts_csv(out_path(config, "counts.csv"), counts.counts);
    save_config(config, "synth");
}

void run_ingest(const RunConfig& config) {
    if (config.input.empty()) throw ValidationError("ingest requires --input COUNTS_CSV");
    const CountPanel counts = parse_counts(config.input);
    const Matrix cumulative = cumulative_curve(counts);
    const SmoothedCurves curves = smooth_and_sample(counts, cumulative, config.nodes);
    const LogRiskPanel hard = log_transform(curves, config.log_floor);

    const SpatialWeighting weighting = load_weighting(config, hard.regions());
    const LogRiskPanel soft = apply_weighting(hard, weighting);

    write_time_series_csv(out_path(config, "cumulative_smoothed.csv"), curves.node_times,
                          curves.region_ids, curves.values);
    write_time_series_csv(out_path(config, "intensity.csv"), curves.node_times, curves.region_ids,
                          curves.derivatives);
    write_panel_csv(out_path(config, "panel_hard.csv"), hard);
    write_panel_csv(out_path(config, "panel_soft.csv"), soft);
    write_labeled_matrix_csv(out_path(config, "weighting.csv"), hard.region_ids, weighting.matrix);
    save_config(config, "ingest");
}

void run_fit(const RunConfig& config) {
    const LogRiskPanel panel = load_panel(config);
    TrigFitOptions options;
    options.pin_b1 = config.pin_b1;

    int harmonics = config.harmonics;
    if (!config.candidates.empty()) {
        const SelectionReport report =
            select_harmonics(panel, config.candidates, config.selection_threshold, options);
        write_selection_csv(out_path(config, "selection.csv"), report);
        harmonics = report.chosen_harmonics;
    }

    const TrigModel model = fit_trig(panel, harmonics, options);
    const Vector risks = empirical_risk(model, panel);
    const Matrix fitted = predict(model, fit_times(model.fit_length));

    write_json_file(out_path(config, "trig_model.json"), trig_model_to_json(model));
    write_time_series_csv(out_path(config, "fitted.csv"), panel.node_times, panel.region_ids, fitted);
    {
        std::ostringstream out;
        out << "region,empirical_risk\n";
        for (int p = 0; p < panel.regions(); ++p)
            out << panel.region_ids[p] << "," << format_double(risks[p]) << "\n";
        write_text_file(out_path(config, "risks.csv"), out.str());
    }
    save_config(config, "fit");
}

void run_residual(const RunConfig& config) {
    const LogRiskPanel panel = load_panel(config);
    const TrigModel model = load_model(config);
    const ResidualPanel res = residuals(panel, model);
    const CovariancePair cov = empirical_covariances(res, config.center_covariances);
    const int truncation = effective_truncation(config, res.nodes(), res.regions());
    const AutocorrEstimate estimate = estimate_rho(cov, truncation);

    write_time_series_csv(out_path(config, "residuals.csv"), res.node_times, res.region_ids,
                          res.values);
    write_labeled_matrix_csv(out_path(config, "r0.csv"), res.region_ids, cov.r0);
    write_labeled_matrix_csv(out_path(config, "r1.csv"), res.region_ids, cov.r1);
    write_spectrum_csv(out_path(config, "spectrum.csv"), cov.eigenvalues);
    write_labeled_matrix_csv(out_path(config, "rho_classical.csv"), res.region_ids, estimate.rho);
    write_time_series_csv(out_path(config, "residual_pred_classical.csv"), res.node_times,
                          res.region_ids, residual_prediction_panel(estimate.rho, res));
    save_config(config, "residual");
}

void run_bayes(const RunConfig& config) {
    const LogRiskPanel panel = load_panel(config);
    const TrigModel model = load_model(config);
    const ResidualPanel res = residuals(panel, model);
    const BetaPrior prior = effective_prior(config, res);
    const BayesFit fit = optimize_posterior(res, prior, optimizer_options(config, false), config.seed);

    write_json_file(out_path(config, "bayes_fit.json"), bayes_fit_to_json(fit));
    write_labeled_matrix_csv(out_path(config, "rho_bayes.csv"), res.region_ids, fit.rho);
    for (int p = 0; p < res.regions(); ++p)
        write_trace_csv(out_path(config, "trace_" + res.region_ids[p] + ".csv"), fit.trace[p]);
    write_time_series_csv(out_path(config, "residual_pred_bayes.csv"), res.node_times, res.region_ids,
                          residual_prediction_panel(fit.rho, res));

    // classical estimate entries outside the prior support, reported only
    const CovariancePair cov = empirical_covariances(res, config.center_covariances);
    const int truncation = effective_truncation(config, res.nodes(), res.regions());
    const AutocorrEstimate classical = estimate_rho(cov, truncation);
    Json summary;
    summary["classical_fraction_outside_support"] =
        fraction_outside_support(classical.rho, prior.scale);
    summary["prior"] = {{"a", prior.a(0, 0)}, {"b", prior.b(0, 0)}, {"scale", prior.scale}};
    summary["seed"] = config.seed;
    write_json_file(out_path(config, "bayes_summary.json"), summary);
    save_config(config, "bayes");
}

void run_forecast(const RunConfig& config) {
    const LogRiskPanel panel = load_panel(config);
    const TrigModel model = load_model(config);
    const ResidualPanel res = residuals(panel, model);

    Matrix rho;
    if (config.rho_source == "bayes") {
        if (config.prediction_path.empty())
            throw ValidationError("forecast with --rho-source bayes requires --prediction BAYES_FIT_JSON");
        rho = bayes_fit_from_json(read_json_file(config.prediction_path)).rho;
    } else {
        const CovariancePair cov = empirical_covariances(res, config.center_covariances);
        rho = estimate_rho(cov, effective_truncation(config, res.nodes(), res.regions())).rho;
    }

    const Matrix regression = predict(model, fit_times(model.fit_length));
    const Matrix residual_pred = residual_prediction_panel(rho, res);

    std::optional<SpatialWeighting> inverse;
    if (config.inverse_weighting) inverse = load_weighting(config, panel.regions());
    const ForecastBundle bundle =
        combine_predictions(regression, residual_pred, panel.node_times, panel.region_ids,
                            inverse ? &*inverse : nullptr);

    write_time_series_csv(out_path(config, "forecast_logrisk.csv"), bundle.node_times,
                          bundle.region_ids, bundle.log_risk);
    write_time_series_csv(out_path(config, "forecast_risk.csv"), bundle.node_times, bundle.region_ids,
                          bundle.risk);
    write_time_series_csv(out_path(config, "forecast_cumulative.csv"), bundle.node_times,
                          bundle.region_ids, bundle.cumulative);
    save_config(config, "forecast");
}

void run_compare(const RunConfig& config) {
    const LogRiskPanel panel = load_panel(config);

    CvConfig cv;
    cv.folds = config.cv_folds;
    cv.runs = config.cv_runs;
    cv.seed = config.seed;
    cv.holdout_head = config.holdout_head;
    cv.holdout_tail = config.holdout_tail;
    cv.lags = config.cv_lags;
    cv.jobs = config.jobs;

    std::vector<std::string> names = config.models;
    if (names.empty()) names = {"GRNN", "MLP", "SVR", "BNN", "RBF", "GP", "Classical", "Bayesian"};

    std::vector<SmapeTable> ml_tables;
    std::vector<SmapeTable> pipeline_tables;
    Json report;
    report["seed"] = config.seed;
    report["mode"] = config.mode;
    report["folds"] = cv.folds;
    report["runs"] = cv.runs;
    report["tables"] = Json::array();

    for (const std::string& name : names) {
        SmapeTable table;
        if (name == "Classical" || name == "Bayesian") {
            PipelineSpec spec;
            spec.method = name == "Classical" ? RhoMethod::classical : RhoMethod::bayesian;
            spec.harmonics = config.harmonics;
            spec.truncation = config.truncation;
            spec.pin_b1 = config.pin_b1;
            spec.seed = config.seed;
            spec.optimizer = optimizer_options(config, true);
            spec.optimizer.jobs = 1;  // parallelism handled at the fold level
            if (spec.method == RhoMethod::bayesian)
                spec.prior = BetaPrior::shared(panel.regions(), config.prior_a, config.prior_b,
                                               config.prior_scale);
            table = kfold_cv(panel, [&spec](int, int) { return make_pipeline_cv_model(spec); }, cv);
            pipeline_tables.push_back(table);
        } else {
            MlModelSpec spec;
            spec.kind = model_kind_from_name(name);
            spec.lags = config.cv_lags;
            spec.seed = config.seed;
            spec.lag_window = spec.kind == ModelKind::grnn && config.mode == "soft";
            if (spec.kind == ModelKind::svr && config.mode == "soft")
                spec.svr_kernel = SvrKernel::gaussian;  // the survey's soft-data choice
            table = kfold_cv(panel, [&spec](int, int) { return make_ml_cv_model(spec); }, cv);
            ml_tables.push_back(table);
        }
        write_smape_csv(out_path(config, "smape_" + name + "_" + config.mode + ".csv"), table);
        Json entry;
        entry["model"] = name;
        entry["rows"] = std::vector<double>(table.rows.data(), table.rows.data() + table.rows.size());
        entry["mean"] = table.mean_row;
        entry["total"] = table.total_row;
        report["tables"].push_back(entry);
    }

    if (!ml_tables.empty())
        write_text_file(out_path(config, "smape_ml_" + config.mode + ".txt"),
                        smape_tables_text(ml_tables));
    if (!pipeline_tables.empty())
        write_text_file(out_path(config, "smape_pipeline_" + config.mode + ".txt"),
                        smape_tables_text(pipeline_tables));
    write_json_file(out_path(config, "compare_report.json"), report);
    save_config(config, "compare");
}

void run_bootstrap(const RunConfig& config) {
    BootstrapOptions options;
    options.replicates = config.bootstrap_replicates;
    options.seed = config.seed;
    options.jobs = config.jobs;

    Matrix data;
    RowStatistic statistic;
    std::string label;

    if (config.bootstrap_target == "risk") {
        const LogRiskPanel panel = load_panel(config);
        const TrigModel model = load_model(config);
        const ResidualPanel res = residuals(panel, model);
        data = config.resample_regions ? Matrix(res.values.transpose()) : res.values;
        // spatially averaged minimized empirical risk of the resample
        statistic = [](const Matrix& rows) { return rows.array().square().mean(); };
        label = "mean_empirical_risk";
    } else if (config.bootstrap_target == "smape") {
        const LogRiskPanel panel = load_panel(config);
        if (config.prediction_path.empty())
            throw ValidationError("bootstrap smape requires --prediction FORECAST_CSV");
        const LogRiskPanel predicted = read_panel_csv(config.prediction_path);
        if (predicted.values.rows() != panel.values.rows() ||
            predicted.values.cols() != panel.values.cols())
            throw ValidationError("bootstrap smape: prediction shape does not match the panel");
        const int regions = panel.regions();
        data.resize(panel.nodes(), 2 * regions);
        data.leftCols(regions) = panel.values;
        data.rightCols(regions) = predicted.values;
        statistic = [regions](const Matrix& rows) {
            double total = 0.0;
            for (int p = 0; p < regions; ++p)
                total += smape(rows.col(p), rows.col(regions + p));
            return total / regions;
        };
        label = "mean_smape";
    } else {
        throw ValidationError("unknown bootstrap target: " + config.bootstrap_target);
    }

    const BootstrapResult result = resample(data, statistic, options);
    const CiSet intervals = all_intervals(result, config.level);
    write_ci_csv(out_path(config, "ci_" + label + ".csv"), intervals, config.level,
                 options.replicates, config.seed);
    write_text_file(out_path(config, "ci_" + label + ".txt"),
                    ci_table_text({{std::to_string(options.replicates), intervals}}));
    {
        std::ostringstream out;
        out << label << "\n";
        for (int i = 0; i < result.replicates.size(); ++i)
            out << format_double(result.replicates[i]) << "\n";
        write_text_file(out_path(config, "bootstrap_replicates.csv"), out.str());
    }
    const DensityEstimate kde = density(result);
    write_density_csv(out_path(config, "density_" + label + ".csv"), kde);
    save_config(config, "bootstrap");
}

void run_report(const RunConfig& config) {
    // Bundle whatever smape tables the out directory holds into one text
    // rendering plus a JSON index.
    Json index;
    index["tables"] = Json::array();
    std::vector<SmapeTable> tables;
    for (const auto& entry : fs::directory_iterator(config.out_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("smape_", 0) != 0 || entry.path().extension() != ".csv") continue;
        const std::string text = read_text_file(entry.path().string());
        std::istringstream stream(text);
        std::string line;
        std::getline(stream, line);
        const auto header_pos = line.find(',');
        SmapeTable table;
        table.model = line.substr(header_pos + 1);
        std::vector<double> rows;
        while (std::getline(stream, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            const std::string label = line.substr(0, comma);
            const double value = std::stod(line.substr(comma + 1));
            if (label == "M.")
                table.mean_row = value;
            else if (label == "T.")
                table.total_row = value;
            else {
                table.region_ids.push_back(label);
                rows.push_back(value);
            }
        }
        table.rows = Eigen::Map<const Vector>(rows.data(), static_cast<int>(rows.size()));
        tables.push_back(table);
        index["tables"].push_back(name);
    }
    if (!tables.empty())
        write_text_file(out_path(config, "report_tables.txt"), smape_tables_text(tables));
    write_json_file(out_path(config, "report_index.json"), index);
    save_config(config, "report");
}

}  // namespace riskcast::cli
