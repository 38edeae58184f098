#pragma once

#include <string>
#include <vector>

#include "riskcast/bayes.hpp"
#include "riskcast/evaluation.hpp"
#include "riskcast/io.hpp"

namespace riskcast::cli {

// One flat configuration shared by every subcommand; a JSON config file is
// loaded first and individual flags override it.
struct RunConfig {
    // inputs
    std::string input;
    std::string panel_path;
    std::string model_path;
    std::string weighting_path;
    std::string centroids_path;
    std::string prediction_path;
    std::string out_dir = "out";

    // ingest
    int nodes = 265;
    double log_floor = 1e-6;
    std::string mode = "hard";  // hard | soft
    std::string weighting_kind = "identity";
    double weighting_bandwidth = 1.0;

    // trig fit
    int harmonics = 6;
    std::vector<int> candidates;
    double selection_threshold = 1.15;
    bool pin_b1 = false;

    // residual
    int truncation = 0;  // 0 -> floor(ln T)
    bool center_covariances = false;

    // bayes
    double prior_a = 14.0;
    double prior_b = 13.0;
    double prior_scale = 1.0 / 3.0;
    bool prior_from_bootstrap = false;
    int prior_bootstrap_samples = 100;
    int ga_population = 50;
    int ga_generations = 200;

    // forecast
    std::string rho_source = "classical";  // classical | bayes
    bool inverse_weighting = false;

    // compare
    int cv_folds = 10;
    int cv_runs = 10;
    int cv_lags = 5;
    int holdout_head = 10;
    int holdout_tail = 3;
    std::vector<std::string> models;  // empty -> all six ML + both pipelines
    int cv_ga_population = 24;
    int cv_ga_generations = 40;

    // bootstrap
    int bootstrap_replicates = 1000;
    double level = 0.95;
    std::string bootstrap_target = "risk";  // risk | smape
    bool resample_regions = false;

    // synth
    int synth_regions = 17;
    int synth_days = 67;
    int synth_harmonics = 3;
    double synth_rho = 0.2;
    double synth_sigma = 0.1;

    // global
    std::uint64_t seed = 1;
    int jobs = 1;
};

RunConfig config_from_json(const Json& value);
Json config_to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

void run_ingest(const RunConfig& config);
void run_fit(const RunConfig& config);
void run_residual(const RunConfig& config);
void run_bayes(const RunConfig& config);
void run_forecast(const RunConfig& config);
void run_compare(const RunConfig& config);
void run_bootstrap(const RunConfig& config);
void run_synth(const RunConfig& config);
void run_report(const RunConfig& config);

}  // namespace riskcast::cli
