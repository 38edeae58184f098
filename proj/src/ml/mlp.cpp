#include "riskcast/ml/mlp.hpp"

#include <cmath>

#include "riskcast/rng.hpp"

namespace riskcast {

namespace {

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

struct Standardizer {
    Vector mean;
    Vector scale;
    double target_mean = 0.0;
    double target_scale = 1.0;

    Standardizer(const Matrix& inputs, const Vector& targets) {
        mean = inputs.colwise().mean();
        scale.resize(inputs.cols());
        for (int j = 0; j < inputs.cols(); ++j) {
            const double variance =
                (inputs.col(j).array() - mean[j]).square().sum() / std::max<int>(1, inputs.rows() - 1);
            scale[j] = std::sqrt(variance);
            if (scale[j] < 1e-12) scale[j] = 1.0;
        }
        target_mean = targets.mean();
        const double target_variance =
            (targets.array() - target_mean).square().sum() / std::max<int>(1, targets.size() - 1);
        target_scale = std::sqrt(target_variance);
        if (target_scale < 1e-12) target_scale = 1.0;
    }

    Matrix transform(const Matrix& inputs) const {
        Matrix out = inputs;
        out.rowwise() -= mean.transpose();
        out.array().rowwise() /= scale.transpose().array();
        return out;
    }
};

// Forward pass on standardized inputs augmented with a trailing 1.
Vector forward(const Matrix& hidden, const Vector& output, const Matrix& augmented) {
    const int samples = static_cast<int>(augmented.rows());
    Vector out = Vector::Constant(samples, output[0]);
    if (hidden.rows() == 0) return out;
    const Matrix activations = (augmented * hidden.transpose()).unaryExpr([](double u) {
        return logistic(u);
    });
    out += activations * output.tail(output.size() - 1);
    return out;
}

}  // namespace

MlpModel mlp_fit(const LaggedDataset& train, int hidden_nodes, std::uint64_t seed,
                 const MlpOptions& options) {
    if (hidden_nodes < 0) throw ValidationError("mlp: hidden node count must be non-negative");
    if (train.size() < 1) throw ValidationError("mlp: empty training set");

    MlpModel model;
    model.hidden_nodes = hidden_nodes;

    if (hidden_nodes == 0) {
        // exact affine least squares on the raw scale
        Matrix design(train.size(), train.inputs.cols() + 1);
        design.col(0).setOnes();
        design.rightCols(train.inputs.cols()) = train.inputs;
        model.affine = design.colPivHouseholderQr().solve(train.targets);
        model.final_loss = (design * model.affine - train.targets).squaredNorm() / train.size();
        return model;
    }

    const Standardizer standardizer(train.inputs, train.targets);
    model.input_mean = standardizer.mean;
    model.input_scale = standardizer.scale;
    model.target_mean = standardizer.target_mean;
    model.target_scale = standardizer.target_scale;

    const Matrix standardized = standardizer.transform(train.inputs);
    Matrix augmented(standardized.rows(), standardized.cols() + 1);
    augmented.leftCols(standardized.cols()) = standardized;
    augmented.col(standardized.cols()).setOnes();
    const Vector targets =
        (train.targets.array() - standardizer.target_mean) / standardizer.target_scale;

    const int dim = static_cast<int>(augmented.cols());
    Rng rng(seed);
    Matrix hidden(hidden_nodes, dim);
    Vector output(hidden_nodes + 1);
    for (int i = 0; i < hidden.size(); ++i) hidden.data()[i] = rng.uniform(-0.5, 0.5);
    for (int i = 0; i < output.size(); ++i) output[i] = rng.uniform(-0.5, 0.5);

    const int samples = train.size();
    auto loss_of = [&](const Matrix& h, const Vector& o) {
        return (forward(h, o, augmented) - targets).squaredNorm() / samples;
    };

    double learning_rate = options.learning_rate;
    double loss = loss_of(hidden, output);
    Matrix hidden_velocity = Matrix::Zero(hidden_nodes, dim);
    Vector output_velocity = Vector::Zero(hidden_nodes + 1);
    int nan_backoffs = 0;

    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        // gradients
        const Matrix pre_activation = augmented * hidden.transpose();
        const Matrix activations = pre_activation.unaryExpr([](double u) { return logistic(u); });
        const Vector fitted =
            Vector::Constant(samples, output[0]) + activations * output.tail(hidden_nodes);
        const Vector error = 2.0 * (fitted - targets) / samples;

        Vector output_gradient(hidden_nodes + 1);
        output_gradient[0] = error.sum();
        output_gradient.tail(hidden_nodes) = activations.transpose() * error;
        const Matrix delta = (activations.array() * (1.0 - activations.array())).matrix();
        Matrix hidden_gradient(hidden_nodes, dim);
        for (int k = 0; k < hidden_nodes; ++k) {
            const Vector signal = error.array() * output[k + 1] * delta.col(k).array();
            hidden_gradient.row(k) = signal.transpose() * augmented;
        }

        hidden_velocity = options.momentum * hidden_velocity - learning_rate * hidden_gradient;
        output_velocity = options.momentum * output_velocity - learning_rate * output_gradient;
        const Matrix hidden_next = hidden + hidden_velocity;
        const Vector output_next = output + output_velocity;
        const double loss_next = loss_of(hidden_next, output_next);

        if (!std::isfinite(loss_next)) {
            ++nan_backoffs;
            if (nan_backoffs > 5) throw NumericalError("mlp: training diverged after 5 backoffs");
            learning_rate *= 0.2;
            hidden_velocity.setZero();
            output_velocity.setZero();
            continue;
        }
        if (loss_next > loss) {
            // rejected step keeps the accepted-loss sequence non-increasing
            learning_rate *= 0.5;
            hidden_velocity.setZero();
            output_velocity.setZero();
            if (learning_rate < 1e-15) break;
            continue;
        }
        const double improvement = loss - loss_next;
        hidden = hidden_next;
        output = output_next;
        loss = loss_next;
        if (improvement < options.tolerance * (1.0 + loss)) break;
    }

    model.hidden_weights = hidden;
    model.output_weights = output;
    model.final_loss = loss;
    return model;
}

double mlp_predict(const MlpModel& model, const Vector& query) {
    if (model.hidden_nodes == 0) {
        double out = model.affine[0];
        for (int j = 0; j < query.size(); ++j) out += model.affine[j + 1] * query[j];
        return out;
    }
    Vector standardized =
        ((query - model.input_mean).array() / model.input_scale.array()).matrix();
    Vector augmented(standardized.size() + 1);
    augmented.head(standardized.size()) = standardized;
    augmented[standardized.size()] = 1.0;
    double out = model.output_weights[0];
    for (int k = 0; k < model.hidden_nodes; ++k)
        out += model.output_weights[k + 1] * logistic(model.hidden_weights.row(k).dot(augmented));
    return model.target_mean + model.target_scale * out;
}

}  // namespace riskcast
