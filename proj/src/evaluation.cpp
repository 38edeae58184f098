#include "riskcast/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "riskcast/ml/bnn.hpp"
#include "riskcast/ml/gp.hpp"
#include "riskcast/ml/grnn.hpp"
#include "riskcast/ml/lagged.hpp"
#include "riskcast/ml/mlp.hpp"
#include "riskcast/ml/rbf.hpp"
#include "riskcast/parallel.hpp"
#include "riskcast/rng.hpp"

namespace riskcast {

double smape(const Vector& observed, const Vector& predicted) {
    if (observed.size() != predicted.size()) throw ValidationError("smape: length mismatch");
    if (observed.size() == 0) throw ValidationError("smape: empty input");
    double total = 0.0;
    for (int t = 0; t < observed.size(); ++t) {
        const double scale = (std::abs(observed[t]) + std::abs(predicted[t])) / 2.0;
        if (scale == 0.0) continue;  // 0/0 summand counts as zero
        total += std::abs(predicted[t] - observed[t]) / scale;
    }
    return total / observed.size();
}

SmapeTable SmapeTable::from_rows(std::string model, DataMode mode,
                                 std::vector<std::string> region_ids, Vector rows) {
    SmapeTable table;
    table.model = std::move(model);
    table.mode = mode;
    table.region_ids = std::move(region_ids);
    table.rows = std::move(rows);
    table.mean_row = table.rows.mean();
    table.total_row = table.rows.sum();
    return table;
}

std::vector<int> cv_universe(const LogRiskPanel& panel, const CvConfig& config) {
    const int t_len = panel.nodes();
    const int start = std::max({config.holdout_head, config.lags, 1});
    const int stop = t_len - config.holdout_tail;
    if (stop - start < config.folds)
        throw ValidationError("cv: fewer eligible nodes than folds");
    std::vector<int> universe;
    for (int t = start; t < stop; ++t) universe.push_back(t);
    return universe;
}

namespace {

std::vector<std::vector<int>> make_folds(const std::vector<int>& universe, int folds, Rng& rng) {
    std::vector<int> shuffled = universe;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
        const std::size_t j = rng.uniform_index(i);
        std::swap(shuffled[i - 1], shuffled[j]);
    }
    std::vector<std::vector<int>> out(folds);
    const std::size_t base = shuffled.size() / folds;
    const std::size_t extra = shuffled.size() % folds;
    std::size_t cursor = 0;
    for (int f = 0; f < folds; ++f) {
        const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        out[f].assign(shuffled.begin() + cursor, shuffled.begin() + cursor + size);
        std::sort(out[f].begin(), out[f].end());
        cursor += size;
    }
    return out;
}

Vector region_smapes(const LogRiskPanel& panel, const std::vector<int>& eval_nodes,
                     const Matrix& predictions) {
    Vector out(panel.regions());
    Vector observed(static_cast<int>(eval_nodes.size()));
    for (int p = 0; p < panel.regions(); ++p) {
        for (std::size_t i = 0; i < eval_nodes.size(); ++i)
            observed[static_cast<int>(i)] = panel.values(eval_nodes[i], p);
        out[p] = smape(observed, predictions.col(p));
    }
    return out;
}

}  // namespace

SmapeTable kfold_cv(const LogRiskPanel& panel, const CvModelFactory& factory, const CvConfig& config) {
    if (config.folds < 2) throw ValidationError("cv: need at least two folds");
    if (config.runs < 1) throw ValidationError("cv: need at least one run");
    const std::vector<int> universe = cv_universe(panel, config);
    if (static_cast<int>(universe.size()) < config.folds)
        throw ValidationError("cv: universe smaller than fold count");

    const Rng master(config.seed);
    const int slots = config.runs * config.folds;
    std::vector<Vector> fold_scores(slots);
    std::vector<std::vector<std::vector<int>>> run_folds(config.runs);
    for (int run = 0; run < config.runs; ++run) {
        Rng rng = master.derive(static_cast<std::uint64_t>(run));
        run_folds[run] = make_folds(universe, config.folds, rng);
    }

    std::string model_name;
    parallel_for(static_cast<std::size_t>(slots), config.jobs, [&](std::size_t slot) {
        const int run = static_cast<int>(slot) / config.folds;
        const int fold = static_cast<int>(slot) % config.folds;
        const std::vector<int>& eval_nodes = run_folds[run][fold];

        std::vector<int> train_nodes;
        for (int f = 0; f < config.folds; ++f)
            if (f != fold)
                train_nodes.insert(train_nodes.end(), run_folds[run][f].begin(), run_folds[run][f].end());
        std::sort(train_nodes.begin(), train_nodes.end());

        auto model = factory(run, fold);
        if (slot == 0) model_name = model->name();
        try {
            model->fit(panel, train_nodes);
            const Matrix predictions = model->predict(panel, eval_nodes);
            fold_scores[slot] = region_smapes(panel, eval_nodes, predictions);
        } catch (const ValidationError& error) {
            throw ValidationError("cv: model '" + model->name() + "' failed on fold of size " +
                                  std::to_string(eval_nodes.size()) + ": " + error.what());
        }
    });

    Vector accumulated = Vector::Zero(panel.regions());
    for (const Vector& score : fold_scores) accumulated += score;
    accumulated /= static_cast<double>(slots);
    return SmapeTable::from_rows(model_name, panel.mode, panel.region_ids, accumulated);
}

SmapeTable holdout_score(const LogRiskPanel& panel, CvModel& model, const CvConfig& config) {
    const std::vector<int> universe = cv_universe(panel, config);
    std::vector<int> holdout;
    for (int t = std::max(config.lags, 1); t < config.holdout_head; ++t) holdout.push_back(t);
    for (int t = panel.nodes() - config.holdout_tail; t < panel.nodes(); ++t) holdout.push_back(t);
    if (holdout.empty()) throw ValidationError("holdout: no nodes to score");
    model.fit(panel, universe);
    const Matrix predictions = model.predict(panel, holdout);
    return SmapeTable::from_rows(model.name() + " (holdout)", panel.mode, panel.region_ids,
                                 region_smapes(panel, holdout, predictions));
}

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::grnn: return "GRNN";
        case ModelKind::mlp: return "MLP";
        case ModelKind::svr: return "SVR";
        case ModelKind::bnn: return "BNN";
        case ModelKind::rbf: return "RBF";
        case ModelKind::gp: return "GP";
    }
    throw ValidationError("unknown model kind");
}

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "GRNN" || name == "grnn") return ModelKind::grnn;
    if (name == "MLP" || name == "mlp") return ModelKind::mlp;
    if (name == "SVR" || name == "svr") return ModelKind::svr;
    if (name == "BNN" || name == "bnn") return ModelKind::bnn;
    if (name == "RBF" || name == "rbf") return ModelKind::rbf;
    if (name == "GP" || name == "gp") return ModelKind::gp;
    throw ValidationError("unknown model kind: " + name);
}

namespace {

// One-step-ahead ML forecaster trained per region on lagged windows whose
// target node lies in the training set.
class MlCvModel final : public CvModel {
public:
    explicit MlCvModel(MlModelSpec spec) : spec_(std::move(spec)) {}

    std::string name() const override { return model_kind_name(spec_.kind); }

    void fit(const LogRiskPanel& panel, const std::vector<int>& train_nodes) override {
        const int regions = panel.regions();
        grnn_train_.clear();
        rbf_models_.clear();
        svr_models_.clear();
        mlp_models_.clear();
        bnn_models_.clear();
        gp_models_.clear();

        if (spec_.kind == ModelKind::grnn && spec_.lag_window) return;  // training-free

        for (int p = 0; p < regions; ++p) {
            const LaggedDataset full = build_lagged(panel, p, spec_.lags);
            const LaggedDataset train = filter_by_targets(full, train_nodes);
            if (train.size() < 1)
                throw ValidationError("no training samples for region " + panel.region_ids[p]);
            const std::uint64_t region_seed = spec_.seed + 7919ULL * static_cast<std::uint64_t>(p);
            switch (spec_.kind) {
                case ModelKind::grnn:
                    grnn_train_.push_back(train);
                    break;
                case ModelKind::rbf:
                    rbf_models_.push_back(
                        rbf_fit(train, spec_.spread, spec_.rbf_tolerance, spec_.rbf_max_nodes));
                    break;
                case ModelKind::svr: {
                    SvrOptions options;
                    options.gamma = spec_.svr_gamma;
                    svr_models_.push_back(
                        svr_fit(train, spec_.penalty, spec_.tube, spec_.svr_kernel, options));
                    break;
                }
                case ModelKind::mlp:
                    mlp_models_.push_back(mlp_fit(train, spec_.hidden, region_seed));
                    break;
                case ModelKind::bnn:
                    bnn_models_.push_back(bnn_fit(train, spec_.hidden, region_seed));
                    break;
                case ModelKind::gp:
                    gp_models_.push_back(spec_.gp_tuned
                                             ? gp_fit_tuned(train)
                                             : gp_fit(train, spec_.gp_length_scale,
                                                      spec_.gp_signal_variance, spec_.gp_noise_variance));
                    break;
            }
        }
    }

    Matrix predict(const LogRiskPanel& panel, const std::vector<int>& eval_nodes) override {
        const int regions = panel.regions();
        Matrix out(static_cast<int>(eval_nodes.size()), regions);

        if (spec_.kind == ModelKind::grnn && spec_.lag_window) {
            for (std::size_t i = 0; i < eval_nodes.size(); ++i) {
                const int t = eval_nodes[i];
                if (t < spec_.lags)
                    throw ValidationError("lag window reaches before the first node");
                const Matrix history = panel.values.topRows(t);  // rows 0..t-1
                out.row(static_cast<int>(i)) =
                    grnn_predict_soft(history, spec_.lags, spec_.bandwidth).transpose();
            }
            return out;
        }

        for (int p = 0; p < regions; ++p) {
            for (std::size_t i = 0; i < eval_nodes.size(); ++i) {
                const int t = eval_nodes[i];
                if (t < spec_.lags) throw ValidationError("lag window reaches before the first node");
                Vector window(spec_.lags);
                for (int j = 0; j < spec_.lags; ++j) window[j] = panel.values(t - 1 - j, p);
                double value = 0.0;
                switch (spec_.kind) {
                    case ModelKind::grnn:
                        value = grnn_predict(grnn_train_[p], window, spec_.bandwidth);
                        break;
                    case ModelKind::rbf:
                        value = rbf_predict(rbf_models_[p], window);
                        break;
                    case ModelKind::svr:
                        value = svr_predict(svr_models_[p], window);
                        break;
                    case ModelKind::mlp:
                        value = mlp_predict(mlp_models_[p], window);
                        break;
                    case ModelKind::bnn:
                        value = bnn_predict(bnn_models_[p], window);
                        break;
                    case ModelKind::gp:
                        value = gp_predict(gp_models_[p], window);
                        break;
                }
                out(static_cast<int>(i), p) = value;
            }
        }
        return out;
    }

private:
    MlModelSpec spec_;
    std::vector<LaggedDataset> grnn_train_;
    std::vector<RbfModel> rbf_models_;
    std::vector<SvrModel> svr_models_;
    std::vector<MlpModel> mlp_models_;
    std::vector<BnnModel> bnn_models_;
    std::vector<GpModel> gp_models_;
};

// Trigonometric regression refitted on the training nodes, residual operator
// refitted on training transitions, one-step prediction from the previous
// observed node.
class PipelineCvModel final : public CvModel {
public:
    explicit PipelineCvModel(PipelineSpec spec) : spec_(std::move(spec)) {}

    std::string name() const override {
        return spec_.method == RhoMethod::classical ? "Classical" : "Bayesian";
    }

    void fit(const LogRiskPanel& panel, const std::vector<int>& train_nodes) override {
        const int t_len = panel.nodes();
        const auto frequencies = harmonic_frequencies(spec_.harmonics, t_len);

        // least squares restricted to the training rows
        std::vector<double> train_times;
        train_times.reserve(train_nodes.size());
        for (const int t : train_nodes) train_times.push_back(static_cast<double>(t + 1));
        TrigFitOptions trig_options;
        trig_options.pin_b1 = spec_.pin_b1;
        const Matrix design = design_matrix(frequencies, train_times, spec_.pin_b1);
        Matrix train_values(static_cast<int>(train_nodes.size()), panel.regions());
        for (std::size_t i = 0; i < train_nodes.size(); ++i)
            train_values.row(static_cast<int>(i)) = panel.values.row(train_nodes[i]);
        const Matrix coefficients = design.colPivHouseholderQr().solve(train_values);

        model_ = TrigModel{};
        model_.harmonics = spec_.harmonics;
        model_.frequencies = frequencies;
        model_.region_ids = panel.region_ids;
        model_.fit_length = t_len;
        model_.pin_b1 = spec_.pin_b1;
        model_.cosine.setZero(spec_.harmonics, panel.regions());
        model_.sine.setZero(spec_.harmonics, panel.regions());
        int row = 0;
        for (int k = 0; k < spec_.harmonics; ++k) {
            model_.cosine.row(k) = coefficients.row(row++);
            if (k > 0 || !spec_.pin_b1) model_.sine.row(k) = coefficients.row(row++);
        }

        residual_ = residuals(panel, model_);
        const int truncation = spec_.truncation > 0
                                   ? spec_.truncation
                                   : default_truncation(static_cast<int>(train_nodes.size()));
        if (spec_.method == RhoMethod::classical) {
            const CovariancePair cov = empirical_covariances_masked(residual_, train_nodes);
            rho_ = estimate_rho(cov, std::min(truncation, panel.regions())).rho;
        } else {
            BetaPrior prior = spec_.prior;
            if (prior.a.size() == 0) prior = BetaPrior::survey_default(panel.regions());
            Vector sigma(panel.regions());
            Matrix kept(static_cast<int>(train_nodes.size()), panel.regions());
            for (std::size_t i = 0; i < train_nodes.size(); ++i)
                kept.row(static_cast<int>(i)) = residual_.values.row(train_nodes[i]);
            for (int p = 0; p < panel.regions(); ++p)
                sigma[p] = std::sqrt(kept.col(p).squaredNorm() /
                                     static_cast<double>(train_nodes.size()));
            const TransitionSet set = transitions_masked(residual_, train_nodes);
            rho_ = optimize_posterior(set, sigma, prior, spec_.optimizer, spec_.seed).rho;
        }
    }

    Matrix predict(const LogRiskPanel& panel, const std::vector<int>& eval_nodes) override {
        Matrix out(static_cast<int>(eval_nodes.size()), panel.regions());
        for (std::size_t i = 0; i < eval_nodes.size(); ++i) {
            const int t = eval_nodes[i];
            if (t < 1) throw ValidationError("pipeline: cannot predict the first node");
            const Matrix trig_here = riskcast::predict(model_, {static_cast<double>(t + 1)});
            const Matrix trig_prev = riskcast::predict(model_, {static_cast<double>(t)});
            const Vector previous_residual =
                panel.values.row(t - 1).transpose() - trig_prev.row(0).transpose();
            out.row(static_cast<int>(i)) =
                trig_here.row(0) + (rho_ * previous_residual).transpose();
        }
        return out;
    }

private:
    PipelineSpec spec_;
    TrigModel model_;
    ResidualPanel residual_;
    Matrix rho_;
};

}  // namespace

std::unique_ptr<CvModel> make_ml_cv_model(const MlModelSpec& spec) {
    return std::make_unique<MlCvModel>(spec);
}

std::unique_ptr<CvModel> make_pipeline_cv_model(const PipelineSpec& spec) {
    return std::make_unique<PipelineCvModel>(spec);
}

GridSearchResult grid_search(const LogRiskPanel& panel, const std::vector<MlModelSpec>& grid,
                             const CvConfig& config) {
    if (grid.empty()) throw ValidationError("grid_search: empty grid");
    GridSearchResult result;
    double best_score = std::numeric_limits<double>::infinity();
    for (const MlModelSpec& spec : grid) {
        const SmapeTable table =
            kfold_cv(panel, [&spec](int, int) { return make_ml_cv_model(spec); }, config);
        result.table.push_back({spec, table.mean_row});
        if (table.mean_row < best_score) {
            best_score = table.mean_row;
            result.best = spec;
        }
    }
    return result;
}

std::vector<double> default_grnn_bandwidths() { return {0.05, 0.1, 0.2, 0.3, 0.5, 0.6, 0.7}; }
std::vector<double> default_rbf_spreads() { return {2.5, 5.0, 7.5, 10.0, 12.5, 15.0, 17.5, 20.0}; }
std::vector<int> default_mlp_hidden() { return {0, 1, 3, 5, 7, 9}; }
std::vector<int> default_bnn_hidden() { return {1, 3, 5, 7, 9}; }

}  // namespace riskcast
