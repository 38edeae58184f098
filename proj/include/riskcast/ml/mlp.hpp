#pragma once

#include <cstdint>

#include "riskcast/ml/lagged.hpp"

namespace riskcast {

// Single hidden layer of logistic units with a linear output; trained by
// full-batch gradient descent with momentum on standardized data. Zero
// hidden nodes degrade to the exact closed-form affine regression.
struct MlpModel {
    Matrix hidden_weights;  // NH x (d+1), bias in the last column
    Vector output_weights;  // NH+1, bias first
    Vector input_mean;
    Vector input_scale;
    double target_mean = 0.0;
    double target_scale = 1.0;
    Vector affine;  // d+1 closed-form coefficients when NH == 0 (bias first)
    int hidden_nodes = 0;
    double final_loss = 0.0;
};

struct MlpOptions {
    int max_iterations = 2000;
    double learning_rate = 0.1;
    double momentum = 0.9;
    double tolerance = 1e-12;
};

MlpModel mlp_fit(const LaggedDataset& train, int hidden_nodes, std::uint64_t seed,
                 const MlpOptions& options = {});

double mlp_predict(const MlpModel& model, const Vector& query);

}  // namespace riskcast
