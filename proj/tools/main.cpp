#include <CLI11.hpp>
#include <iostream>

#include "riskcast/cli.hpp"

namespace {

using riskcast::cli::RunConfig;

// exit codes: 0 ok, 2 validation, 3 numerical, 4 io
int dispatch(const std::string& command, const RunConfig& config) {
    try {
        if (command == "ingest") riskcast::cli::run_ingest(config);
        else if (command == "fit") riskcast::cli::run_fit(config);
        else if (command == "residual") riskcast::cli::run_residual(config);
        else if (command == "bayes") riskcast::cli::run_bayes(config);
        else if (command == "forecast") riskcast::cli::run_forecast(config);
        else if (command == "compare") riskcast::cli::run_compare(config);
        else if (command == "bootstrap") riskcast::cli::run_bootstrap(config);
        else if (command == "synth") riskcast::cli::run_synth(config);
        else if (command == "report") riskcast::cli::run_report(config);
        else {
            std::cerr << "unknown command: " << command << "\n";
            return 2;
        }
    } catch (const riskcast::ValidationError& error) {
        std::cerr << "validation error: " << error.what() << "\n";
        return 2;
    } catch (const riskcast::IoError& error) {
        std::cerr << "io error: " << error.what() << "\n";
        return 4;
    } catch (const riskcast::NumericalError& error) {
        std::cerr << "numerical error: " << error.what() << "\n";
        return 3;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig config;

    // The config file loads first; any flag that appears afterwards wins.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                config = riskcast::cli::load_config(argv[i + 1]);
            } catch (const riskcast::IoError& error) {
                std::cerr << "io error: " << error.what() << "\n";
                return 4;
            }
            break;
        }
    }

    CLI::App app{"riskcast - spatiotemporal count-risk forecasting"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    app.add_option("--out", config.out_dir, "output directory");
    app.add_option("--mode", config.mode, "data mode")->check(CLI::IsMember({"hard", "soft"}));
    app.add_option("--seed", config.seed, "random seed");
    app.add_option("--jobs", config.jobs, "worker pool size");

    std::map<std::string, CLI::App*> commands;
    for (const char* name : {"ingest", "fit", "residual", "bayes", "forecast", "compare",
                             "bootstrap", "synth", "report"})
        commands[name] = app.add_subcommand(name);

    commands["ingest"]->add_option("--input", config.input, "counts CSV (date,region,count)");
    commands["ingest"]->add_option("--nodes", config.nodes, "temporal node count");
    commands["ingest"]->add_option("--floor", config.log_floor, "intensity floor before log");
    commands["ingest"]->add_option("--weighting-kind", config.weighting_kind,
                                   "identity | gaussian | custom");
    commands["ingest"]->add_option("--weighting", config.weighting_path, "custom weighting CSV");
    commands["ingest"]->add_option("--centroids", config.centroids_path, "region centroid CSV");
    commands["ingest"]->add_option("--bandwidth", config.weighting_bandwidth,
                                   "gaussian weighting bandwidth");

    for (const char* name : {"fit", "residual", "bayes", "forecast", "compare", "bootstrap"})
        commands[name]->add_option("--panel", config.panel_path, "log-risk panel CSV");
    for (const char* name : {"residual", "bayes", "forecast", "bootstrap"})
        commands[name]->add_option("--model", config.model_path, "trigonometric model JSON");

    commands["fit"]->add_option("--harmonics", config.harmonics, "harmonic count N");
    commands["fit"]->add_option("--candidates", config.candidates, "candidate N values for selection");
    commands["fit"]->add_option("--threshold", config.selection_threshold, "selection ratio threshold");
    commands["fit"]->add_flag("--pin-b1", config.pin_b1, "drop the first sine column");

    commands["residual"]->add_option("--ktrunc", config.truncation,
                                     "spectral truncation (0 = floor(ln T))");
    commands["residual"]->add_flag("--center", config.center_covariances,
                                   "subtract residual means in the covariances");

    commands["bayes"]->add_option("--prior-a", config.prior_a, "Beta shape a");
    commands["bayes"]->add_option("--prior-b", config.prior_b, "Beta shape b");
    commands["bayes"]->add_option("--prior-scale", config.prior_scale, "support (0, scale)");
    commands["bayes"]->add_flag("--prior-from-bootstrap", config.prior_from_bootstrap,
                                "fit the prior from bootstrap rho samples");
    commands["bayes"]->add_option("--prior-bootstrap-samples", config.prior_bootstrap_samples,
                                  "bootstrap sample count for the prior");
    commands["bayes"]->add_option("--population", config.ga_population, "genetic population size");
    commands["bayes"]->add_option("--generations", config.ga_generations, "genetic generations");
    commands["bayes"]->add_option("--ktrunc", config.truncation, "classical truncation for reporting");

    commands["forecast"]->add_option("--rho-source", config.rho_source, "classical | bayes");
    commands["forecast"]->add_option("--prediction", config.prediction_path,
                                     "bayes_fit.json for --rho-source bayes");
    commands["forecast"]->add_flag("--inverse-weighting", config.inverse_weighting,
                                   "map soft predictions back to hard regions");
    commands["forecast"]->add_option("--weighting-kind", config.weighting_kind,
                                     "identity | gaussian | custom");
    commands["forecast"]->add_option("--weighting", config.weighting_path, "custom weighting CSV");
    commands["forecast"]->add_option("--ktrunc", config.truncation, "classical truncation");

    commands["compare"]->add_option("--folds", config.cv_folds, "cross-validation folds");
    commands["compare"]->add_option("--runs", config.cv_runs, "repetitions to average");
    commands["compare"]->add_option("--lags", config.cv_lags, "lag window j0");
    commands["compare"]->add_option("--models", config.models, "model subset to evaluate");
    commands["compare"]->add_option("--harmonics", config.harmonics, "pipeline harmonic count");
    commands["compare"]->add_option("--ktrunc", config.truncation, "pipeline truncation");

    commands["bootstrap"]->add_option("--replicates", config.bootstrap_replicates, "bootstrap B");
    commands["bootstrap"]->add_option("--level", config.level, "confidence level");
    commands["bootstrap"]->add_option("--target", config.bootstrap_target, "risk | smape");
    commands["bootstrap"]->add_option("--prediction", config.prediction_path,
                                      "forecast CSV for the smape target");
    commands["bootstrap"]->add_flag("--resample-regions", config.resample_regions,
                                    "resample regions instead of temporal nodes");

    commands["synth"]->add_option("--regions", config.synth_regions, "region count");
    commands["synth"]->add_option("--days", config.synth_days, "calendar days to simulate");
    commands["synth"]->add_option("--nodes", config.nodes, "temporal node count");
    commands["synth"]->add_option("--harmonics", config.synth_harmonics, "true harmonic count");
    commands["synth"]->add_option("--rho", config.synth_rho, "true diagonal autocorrelation");
    commands["synth"]->add_option("--sigma", config.synth_sigma, "innovation standard deviation");

    CLI11_PARSE(app, argc, argv);

    if (config.jobs <= 0) config.jobs = 1;
    return dispatch(app.get_subcommands().front()->get_name(), config);
}
