#pragma once

#include "riskcast/ml/lagged.hpp"

namespace riskcast {

enum class SvrKernel { linear, gaussian };

// Epsilon-insensitive support vector regression solved in the primal by
// averaged subgradient descent; the Gaussian variant optimizes the
// representer coefficients against the kernel Gram matrix.
struct SvrModel {
    SvrKernel kernel = SvrKernel::linear;
    Vector beta;   // linear weights (linear kernel)
    Vector alpha;  // representer coefficients (gaussian kernel)
    Matrix support_inputs;
    double bias = 0.0;
    double gamma = 1.0;  // gaussian kernel scale
    double objective = 0.0;
    bool converged = true;
};

struct SvrOptions {
    int max_iterations = 4000;
    double tolerance = 1e-8;
    double gamma = 1.0;  // used by the gaussian kernel
};

SvrModel svr_fit(const LaggedDataset& train, double penalty, double tube,
                 SvrKernel kernel = SvrKernel::linear, const SvrOptions& options = {});

double svr_predict(const SvrModel& model, const Vector& query);

}  // namespace riskcast
