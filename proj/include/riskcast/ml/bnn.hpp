#pragma once

#include "riskcast/ml/mlp.hpp"

namespace riskcast {

// Regularized network trained on J = nu*E_O + (1-nu)*E_W; nu is picked on a
// fixed grid by the Laplace evidence approximation with a Gauss-Newton
// Hessian, alternating with weight refits until J settles.
struct BnnModel {
    MlpModel network;
    double nu = 0.5;
    double data_error = 0.0;    // E_O at the optimum
    double weight_error = 0.0;  // E_W at the optimum
    double objective = 0.0;     // J
};

struct BnnOptions {
    MlpOptions inner;
    int max_outer_iterations = 20;
    double objective_tolerance = 1e-8;
    std::vector<double> nu_grid;  // defaults to 0.05, 0.10, ..., 0.95
};

// Evidence-driven fit (the default training procedure).
BnnModel bnn_fit(const LaggedDataset& train, int hidden_nodes, std::uint64_t seed,
                 const BnnOptions& options = {});

// Fixed regularization weight; exposed for regularization-path checks.
BnnModel bnn_fit_fixed_nu(const LaggedDataset& train, int hidden_nodes, double nu,
                          std::uint64_t seed, const MlpOptions& options = {});

double bnn_predict(const BnnModel& model, const Vector& query);

}  // namespace riskcast
