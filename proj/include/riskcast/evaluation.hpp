#pragma once

#include <functional>
#include <memory>

#include "riskcast/bayes.hpp"
#include "riskcast/ml/svr.hpp"
#include "riskcast/panel.hpp"
#include "riskcast/residual.hpp"

namespace riskcast {

// Symmetric mean absolute percentage error in [0, 2]; a 0/0 summand counts
// as zero.
double smape(const Vector& observed, const Vector& predicted);

struct CvConfig {
    int folds = 10;
    int runs = 10;
    std::uint64_t seed = 0;
    int holdout_head = 10;  // excluded from CV, scored out of sample
    int holdout_tail = 3;
    int lags = 5;  // j0 for the lagged models
    int jobs = 1;
};

// Per-region SMAPE summary in the layout of the comparison tables:
// one row per region plus the M. (mean) and T. (total) rows.
struct SmapeTable {
    std::string model;
    DataMode mode = DataMode::hard;
    std::vector<std::string> region_ids;
    Vector rows;
    double mean_row = 0.0;
    double total_row = 0.0;

    static SmapeTable from_rows(std::string model, DataMode mode,
                                std::vector<std::string> region_ids, Vector rows);
};

// A model that can be refitted on a node subset and asked for one-step
// predictions at held-out nodes.
class CvModel {
public:
    virtual ~CvModel() = default;
    virtual std::string name() const = 0;
    virtual void fit(const LogRiskPanel& panel, const std::vector<int>& train_nodes) = 0;
    // Returns |eval_nodes| x P predictions.
    virtual Matrix predict(const LogRiskPanel& panel, const std::vector<int>& eval_nodes) = 0;
};

using CvModelFactory = std::function<std::unique_ptr<CvModel>(int run, int fold)>;

// Node indices eligible for CV: holdout head/tail removed and enough history
// for the lag window.
std::vector<int> cv_universe(const LogRiskPanel& panel, const CvConfig& config);

// Random k-fold cross-validation repeated `runs` times: per run the universe
// is shuffled into k folds, each fold is scored by a model fitted on the
// rest, and the per-region SMAPEs are averaged over folds and runs.
SmapeTable kfold_cv(const LogRiskPanel& panel, const CvModelFactory& factory, const CvConfig& config);

// Fits on the whole CV universe and scores the held-out head/tail nodes.
SmapeTable holdout_score(const LogRiskPanel& panel, CvModel& model, const CvConfig& config);

enum class ModelKind { grnn, mlp, svr, bnn, rbf, gp };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct MlModelSpec {
    ModelKind kind = ModelKind::grnn;
    int lags = 5;
    std::uint64_t seed = 0;
    // GRNN
    double bandwidth = 0.05;
    bool lag_window = false;  // vector kernel over recent rows (soft-data default)
    // MLP / BNN
    int hidden = 1;
    // RBF
    double spread = 2.5;
    double rbf_tolerance = 1e-4;
    int rbf_max_nodes = 30;
    // SVR
    double penalty = 10.0;
    double tube = 1e-3;
    SvrKernel svr_kernel = SvrKernel::linear;
    double svr_gamma = 1.0;
    // GP
    bool gp_tuned = true;
    double gp_length_scale = 1.0;
    double gp_signal_variance = 1.0;
    double gp_noise_variance = 1e-6;
};

std::unique_ptr<CvModel> make_ml_cv_model(const MlModelSpec& spec);

// The trigonometric-regression-plus-residual pipeline evaluated as one spec.
struct PipelineSpec {
    RhoMethod method = RhoMethod::classical;
    int harmonics = 6;
    int truncation = 0;  // 0 -> floor(ln of training size)
    bool pin_b1 = false;
    BetaPrior prior;  // bayesian only; defaulted to the survey prior if empty
    PosteriorOptimizerOptions optimizer;
    std::uint64_t seed = 0;
};

std::unique_ptr<CvModel> make_pipeline_cv_model(const PipelineSpec& spec);

struct GridSearchEntry {
    MlModelSpec spec;
    double mean_smape;
};

struct GridSearchResult {
    MlModelSpec best;
    std::vector<GridSearchEntry> table;
};

// Mean-SMAPE argmin over the grid; ties keep the earlier candidate, so grids
// should be ordered from simple to complex.
GridSearchResult grid_search(const LogRiskPanel& panel, const std::vector<MlModelSpec>& grid,
                             const CvConfig& config);

// Candidate sets used by the survey.
std::vector<double> default_grnn_bandwidths();
std::vector<double> default_rbf_spreads();
std::vector<int> default_mlp_hidden();
std::vector<int> default_bnn_hidden();

}  // namespace riskcast
