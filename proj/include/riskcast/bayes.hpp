#pragma once

#include <cstdint>

#include "riskcast/panel.hpp"
#include "riskcast/residual.hpp"

namespace riskcast {

// Entrywise scaled-Beta prior for the autocorrelation projections; every
// rho(p,q) lives on (0, scale).
struct BetaPrior {
    Matrix a;  // P x P shape parameters, > 0
    Matrix b;  // P x P shape parameters, > 0
    double scale = 1.0;

    static BetaPrior flat(int regions, double scale = 1.0);
    static BetaPrior shared(int regions, double a, double b, double scale);
    // Scaled Beta(14, 13) on (0, 1/3), the survey's data-driven choice.
    static BetaPrior survey_default(int regions);
    void validate(int regions) const;
};

struct TraceEntry {
    int iteration;
    int phase;  // 0 genetic, 1 quasi-Newton
    double best_objective;
};

struct BayesFit {
    Matrix rho;        // P x P, entries strictly inside (0, scale)
    Vector sigma;      // per-region residual second moments
    Vector objective;  // per-region log-posterior at the optimum
    std::vector<std::vector<TraceEntry>> trace;  // per region
    BetaPrior prior;
    std::uint64_t seed = 0;
};

struct PosteriorOptimizerOptions {
    int population = 50;
    int generations = 200;
    double mutation_scale = 0.1;  // stddev as a fraction of the prior scale
    int max_newton_iterations = 200;
    double newton_tolerance = 1e-12;
    int jobs = 1;
};

// Lag-1 transition pairs the likelihood sums over: row i of `lagged` holds
// eps_{t-1}, row i of `leading` the matching eps_t.
struct TransitionSet {
    Matrix lagged;
    Matrix leading;
};

TransitionSet transitions(const ResidualPanel& res);
// Only pairs with both rows kept survive; rows need not be contiguous.
TransitionSet transitions_masked(const ResidualPanel& res, const std::vector<int>& keep_rows);

// Log of the joint likelihood-times-prior for one region's rho row; -inf
// outside the open box (0, scale)^P. Transitions run over consecutive rows
// of the residual panel.
double log_posterior(const Vector& rho_row, const ResidualPanel& res, int region,
                     const BetaPrior& prior, double sigma);

// Analytic gradient of log_posterior in rho_row (interior points only).
Vector log_posterior_gradient(const Vector& rho_row, const ResidualPanel& res, int region,
                              const BetaPrior& prior, double sigma);

struct PriorSuggestion {
    double a = 0.0;  // pooled method-of-moments fit
    double b = 0.0;
    Matrix a_entries;  // per-entry fits, P x P (empty when samples are pooled)
    Matrix b_entries;
    double scale = 1.0;
    double clipped_fraction = 0.0;  // share of samples pushed back into (0, scale)
};

// Method-of-moments Beta fit of bootstrap rho samples rescaled to (0,1).
// `samples` is B x (P*P), row-major by (p, q).
PriorSuggestion fit_prior_from_bootstrap(const Matrix& samples, double scale, int regions);

BayesFit optimize_posterior(const ResidualPanel& res, const BetaPrior& prior,
                            const PosteriorOptimizerOptions& options, std::uint64_t seed);

// Same optimizer on an explicit transition set with given per-region sigmas.
BayesFit optimize_posterior(const TransitionSet& set, const Vector& sigma, const BetaPrior& prior,
                            const PosteriorOptimizerOptions& options, std::uint64_t seed);

// One-step Bayesian residual prediction rho~ * eps_{t-1}; t is 1-based in [2, T].
Vector bayes_predict(const BayesFit& fit, const ResidualPanel& res, int t);

// Share of entries of a classical estimate that fall outside (0, scale);
// reported, never enforced.
double fraction_outside_support(const Matrix& rho, double scale);

struct ForecastBundle {
    std::vector<double> node_times;
    std::vector<std::string> region_ids;
    Matrix log_risk;    // regression + residual prediction
    Matrix risk;        // exp(log_risk)
    Matrix cumulative;  // running trapezoid integral of risk
};

// Adds the regression and residual predictors, exponentiates, integrates,
// and optionally maps soft values back to hard regions through the inverse
// weighting matrix.
ForecastBundle combine_predictions(const Matrix& regression, const Matrix& residual_prediction,
                                   const std::vector<double>& node_times,
                                   const std::vector<std::string>& region_ids,
                                   const SpatialWeighting* inverse_weighting = nullptr);

}  // namespace riskcast
