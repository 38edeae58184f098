#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "riskcast/bayes.hpp"
#include "riskcast/bootstrap.hpp"
#include "riskcast/evaluation.hpp"
#include "riskcast/ml/gp.hpp"
#include "riskcast/ml/grnn.hpp"
#include "riskcast/residual.hpp"
#include "riskcast/spline.hpp"
#include "riskcast/synth.hpp"
#include "riskcast/trig.hpp"

namespace py = pybind11;
using namespace riskcast;

namespace {

LogRiskPanel panel_from_values(const Matrix& values, bool soft) {
    LogRiskPanel panel;
    panel.values = values;
    panel.mode = soft ? DataMode::soft : DataMode::hard;
    panel.node_times.resize(values.rows());
    panel.region_ids.resize(values.cols());
    for (int t = 0; t < values.rows(); ++t) panel.node_times[t] = t + 1;
    for (int p = 0; p < values.cols(); ++p) panel.region_ids[p] = "C" + std::to_string(p + 1);
    return panel;
}

ResidualPanel residual_from_values(const Matrix& values) {
    ResidualPanel res;
    res.values = values;
    res.node_times.resize(values.rows());
    res.region_ids.resize(values.cols());
    for (int t = 0; t < values.rows(); ++t) res.node_times[t] = t + 1;
    for (int p = 0; p < values.cols(); ++p) res.region_ids[p] = "C" + std::to_string(p + 1);
    return res;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "riskcast core: trigonometric curve regression, AR residual "
              "prediction, bootstrap intervals, and ML baselines";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("smape", &smape, py::arg("observed"), py::arg("predicted"),
          "Symmetric mean absolute percentage error in [0, 2].");

    m.def(
        "smooth_series",
        [](const Vector& x, const Vector& y, int nodes, double lambda) {
            const SmoothingSpline spline(x, y, lambda);
            Vector grid(nodes), values(nodes), derivatives(nodes);
            for (int i = 0; i < nodes; ++i) {
                grid[i] = x[0] + (x[x.size() - 1] - x[0]) * static_cast<double>(i) / (nodes - 1);
                values[i] = spline.value(grid[i]);
                derivatives[i] = spline.derivative(grid[i]);
            }
            return py::make_tuple(grid, values, derivatives);
        },
        py::arg("x"), py::arg("y"), py::arg("nodes"), py::arg("lambda_") = -1.0,
        "Penalized cubic B-spline fit evaluated on an equispaced grid; "
        "lambda < 0 selects the penalty by GCV.");

    m.def(
        "design_matrix",
        [](const std::vector<double>& frequencies, const std::vector<double>& times, bool pin_b1) {
            return design_matrix(frequencies, times, pin_b1);
        },
        py::arg("frequencies"), py::arg("times"), py::arg("pin_b1") = false);

    m.def("harmonic_frequencies", &harmonic_frequencies, py::arg("harmonics"),
          py::arg("sample_length"));

    m.def(
        "fit_trig",
        [](const Matrix& values, int harmonics, bool soft) {
            const TrigModel model = fit_trig(panel_from_values(values, soft), harmonics);
            py::dict out;
            out["A"] = model.cosine;
            out["B"] = model.sine;
            out["frequencies"] = model.frequencies;
            out["T_fit"] = model.fit_length;
            return out;
        },
        py::arg("values"), py::arg("harmonics"), py::arg("soft") = false,
        "Least-squares Fourier coefficients per region; values is T x P.");

    m.def(
        "trig_predict",
        [](const Matrix& cosine, const Matrix& sine, const std::vector<double>& frequencies,
           const std::vector<double>& times) {
            TrigModel model;
            model.harmonics = static_cast<int>(frequencies.size());
            model.frequencies = frequencies;
            model.cosine = cosine;
            model.sine = sine;
            model.fit_length = static_cast<int>(times.size());
            return predict(model, times);
        },
        py::arg("A"), py::arg("B"), py::arg("frequencies"), py::arg("times"));

    m.def(
        "selection_ratio",
        [](int sample_length, const Matrix& design) { return selection_ratio(sample_length, design); },
        py::arg("sample_length"), py::arg("design"));

    m.def(
        "estimate_rho",
        [](const Matrix& residual_values, int truncation) {
            const ResidualPanel res = residual_from_values(residual_values);
            const CovariancePair cov = empirical_covariances(res);
            return estimate_rho(cov, truncation).rho;
        },
        py::arg("residuals"), py::arg("truncation"),
        "Spectrally truncated autocorrelation estimate from a T x P residual panel.");

    m.def(
        "optimize_posterior",
        [](const Matrix& residual_values, double a, double b, double scale, std::uint64_t seed,
           int population, int generations) {
            const ResidualPanel res = residual_from_values(residual_values);
            const BetaPrior prior = BetaPrior::shared(res.regions(), a, b, scale);
            PosteriorOptimizerOptions options;
            options.population = population;
            options.generations = generations;
            const BayesFit fit = optimize_posterior(res, prior, options, seed);
            py::dict out;
            out["rho"] = fit.rho;
            out["sigma"] = fit.sigma;
            out["objective"] = fit.objective;
            return out;
        },
        py::arg("residuals"), py::arg("a") = 14.0, py::arg("b") = 13.0, py::arg("scale") = 1.0 / 3.0,
        py::arg("seed") = 1, py::arg("population") = 50, py::arg("generations") = 200,
        "Posterior-mode autocorrelation under a scaled Beta prior.");

    m.def(
        "bootstrap_ci",
        [](const Matrix& rows, const std::function<double(const Matrix&)>& statistic, int replicates,
           std::uint64_t seed, double level) {
            BootstrapOptions options;
            options.replicates = replicates;
            options.seed = seed;
            const BootstrapResult result = resample(rows, statistic, options);
            py::dict out;
            for (const auto& [method, interval] : all_intervals(result, level))
                out[ci_method_name(method).c_str()] = py::make_tuple(interval.lower, interval.upper);
            out["point"] = result.point_estimate;
            return out;
        },
        py::arg("rows"), py::arg("statistic"), py::arg("replicates") = 1000, py::arg("seed") = 1,
        py::arg("level") = 0.95,
        "All five bootstrap intervals for a row statistic (I1 BCa, I2 normal, "
        "I3 percentile, I4 bias-corrected, I5 Student).");

    m.def(
        "generate_panel",
        [](int sample_length, int regions, double rho, double sigma, std::uint64_t seed,
           int harmonics) {
            Scenario scenario;
            scenario.sample_length = sample_length;
            scenario.seed = seed;
            scenario.noise_sigma = Vector::Constant(regions, sigma);
            scenario.true_rho = rho * Matrix::Identity(regions, regions);
            scenario.true_model.harmonics = harmonics;
            scenario.true_model.frequencies = harmonic_frequencies(harmonics, sample_length);
            scenario.true_model.fit_length = sample_length;
            scenario.true_model.cosine = Matrix::Constant(harmonics, regions, 1.0);
            scenario.true_model.sine = Matrix::Constant(harmonics, regions, -0.5);
            const SyntheticPanel synthetic = generate_panel(scenario);
            py::dict out;
            out["values"] = synthetic.panel.values;
            out["mean"] = synthetic.true_mean;
            out["residuals"] = synthetic.residual.values;
            return out;
        },
        py::arg("sample_length"), py::arg("regions"), py::arg("rho") = 0.5, py::arg("sigma") = 0.1,
        py::arg("seed") = 1, py::arg("harmonics") = 2,
        "Synthetic log-risk panel with known trigonometric mean and AR(1) residuals.");

    m.def(
        "grnn_predict",
        [](const Matrix& inputs, const Vector& targets, const Vector& query, double bandwidth) {
            LaggedDataset data;
            data.inputs = inputs;
            data.targets = targets;
            data.lags = static_cast<int>(inputs.cols());
            return grnn_predict(data, query, bandwidth);
        },
        py::arg("inputs"), py::arg("targets"), py::arg("query"), py::arg("bandwidth"));

    m.def(
        "gp_predict",
        [](const Matrix& inputs, const Vector& targets, const Matrix& queries, double length_scale,
           double signal_variance, double noise_variance) {
            LaggedDataset data;
            data.inputs = inputs;
            data.targets = targets;
            data.lags = static_cast<int>(inputs.cols());
            const GpModel model = gp_fit(data, length_scale, signal_variance, noise_variance);
            Vector out(queries.rows());
            for (int i = 0; i < queries.rows(); ++i)
                out[i] = gp_predict(model, queries.row(i).transpose());
            return out;
        },
        py::arg("inputs"), py::arg("targets"), py::arg("queries"), py::arg("length_scale") = 1.0,
        py::arg("signal_variance") = 1.0, py::arg("noise_variance") = 0.0,
        "Exact GP conditional mean with a squared-exponential kernel.");

    m.def(
        "kfold_smape",
        [](const Matrix& values, const std::string& model, int folds, int runs, std::uint64_t seed,
           int lags, bool soft) {
            LogRiskPanel panel = panel_from_values(values, soft);
            CvConfig config;
            config.folds = folds;
            config.runs = runs;
            config.seed = seed;
            config.lags = lags;
            SmapeTable table;
            if (model == "Classical" || model == "Bayesian") {
                PipelineSpec spec;
                spec.method = model == "Classical" ? RhoMethod::classical : RhoMethod::bayesian;
                spec.seed = seed;
                spec.optimizer.population = 16;
                spec.optimizer.generations = 20;
                table = kfold_cv(panel, [&spec](int, int) { return make_pipeline_cv_model(spec); },
                                 config);
            } else {
                MlModelSpec spec;
                spec.kind = model_kind_from_name(model);
                spec.lags = lags;
                spec.seed = seed;
                table = kfold_cv(panel, [&spec](int, int) { return make_ml_cv_model(spec); }, config);
            }
            py::dict out;
            out["rows"] = table.rows;
            out["mean"] = table.mean_row;
            out["total"] = table.total_row;
            return out;
        },
        py::arg("values"), py::arg("model"), py::arg("folds") = 5, py::arg("runs") = 1,
        py::arg("seed") = 1, py::arg("lags") = 5, py::arg("soft") = false,
        "Random k-fold cross-validation SMAPE table for one model.");

    m.attr("__version__") = "0.1.0";
}
