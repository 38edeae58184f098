#pragma once

#include "riskcast/ml/lagged.hpp"

namespace riskcast {

// Gaussian radial basis network grown greedily: a node is centred on the
// worst-fit training input, then all output weights are re-solved by least
// squares, until the error target or the sample size is reached.
struct RbfModel {
    Matrix centers;  // NH x d
    Vector weights;  // NH
    double spread = 1.0;
    std::vector<double> error_path;  // training SSE after each node
};

RbfModel rbf_fit(const LaggedDataset& train, double spread, double tolerance,
                 int max_nodes = -1);

double rbf_predict(const RbfModel& model, const Vector& query);

}  // namespace riskcast
