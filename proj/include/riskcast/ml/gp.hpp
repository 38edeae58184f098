#pragma once

#include "riskcast/ml/lagged.hpp"

namespace riskcast {

// Exact Gaussian process conditional mean with a squared-exponential kernel;
// hyperparameters come from a log marginal likelihood grid search.
struct GpModel {
    Matrix train_inputs;
    Vector alpha;  // (K + noise I)^{-1} y
    double length_scale = 1.0;
    double signal_variance = 1.0;
    double noise_variance = 0.0;
    double log_marginal = 0.0;
};

double se_kernel(const Vector& a, const Vector& b, double length_scale, double signal_variance);

GpModel gp_fit(const LaggedDataset& train, double length_scale, double signal_variance,
               double noise_variance);

// Grid search over (length_scale, signal_variance, noise_variance) factors
// anchored at data-driven scales.
GpModel gp_fit_tuned(const LaggedDataset& train);

double gp_predict(const GpModel& model, const Vector& query);

// Precomputed-Gram interface shared with the soft-data variant: solve
// (K + noise I) alpha = y through a Cholesky factorization (jitter added only
// if the factorization fails).
Vector gp_solve(const Matrix& gram, const Vector& targets, double noise_variance);
double gp_predict_gram(const Vector& cross_covariances, const Vector& alpha);

// Soft-data GP over temporal nodes: the parametric kernel is replaced by the
// empirical cross-sectional covariance between node rows, and the noise by
// the weighting-projected innovation variance of each region. Returns one
// prediction per region at the query node.
Vector soft_gp_predict(const LogRiskPanel& panel, const SpatialWeighting& weighting,
                       const Vector& hard_noise_variances, const std::vector<int>& train_nodes,
                       int query_node);

}  // namespace riskcast
