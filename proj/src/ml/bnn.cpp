#include "riskcast/ml/bnn.hpp"

#include <cmath>

#include "riskcast/rng.hpp"

namespace riskcast {

namespace {

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

struct Workspace {
    Matrix augmented;  // standardized inputs with trailing 1
    Vector targets;    // standardized targets
    int hidden_nodes;

    int weight_count() const {
        return hidden_nodes * static_cast<int>(augmented.cols()) + hidden_nodes + 1;
    }
};

Vector forward(const Matrix& hidden, const Vector& output, const Workspace& ws) {
    Vector out = Vector::Constant(ws.augmented.rows(), output[0]);
    if (hidden.rows() == 0) return out;
    const Matrix activations =
        (ws.augmented * hidden.transpose()).unaryExpr([](double u) { return logistic(u); });
    out += activations * output.tail(output.size() - 1);
    return out;
}

double data_error(const Matrix& hidden, const Vector& output, const Workspace& ws) {
    return (forward(hidden, output, ws) - ws.targets).squaredNorm();
}

double weight_error(const Matrix& hidden, const Vector& output) {
    return hidden.squaredNorm() + output.squaredNorm();
}

// Gauss-Newton spectrum of E_O at the current weights, used for the Laplace
// log-determinant in the evidence.
Vector gauss_newton_spectrum(const Matrix& hidden, const Vector& output, const Workspace& ws) {
    const int samples = static_cast<int>(ws.augmented.rows());
    const int dim = static_cast<int>(ws.augmented.cols());
    const int nh = ws.hidden_nodes;
    const int weights = nh * dim + nh + 1;
    Matrix jacobian(samples, weights);
    const Matrix pre = ws.augmented * hidden.transpose();
    const Matrix activations = pre.unaryExpr([](double u) { return logistic(u); });
    for (int m = 0; m < samples; ++m) {
        int col = 0;
        jacobian(m, col++) = 1.0;  // d/d eta_0
        for (int k = 0; k < nh; ++k) jacobian(m, col++) = activations(m, k);
        for (int k = 0; k < nh; ++k) {
            const double slope = output[k + 1] * activations(m, k) * (1.0 - activations(m, k));
            for (int j = 0; j < dim; ++j) jacobian(m, col++) = slope * ws.augmented(m, j);
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eigen(jacobian.transpose() * jacobian);
    return eigen.eigenvalues().cwiseMax(0.0);
}

// Gradient-descent minimization of J = nu E_O + (1-nu) E_W with momentum,
// rejected steps, and NaN backoff, mirroring the MLP trainer.
void minimize_objective(Matrix& hidden, Vector& output, double nu, const Workspace& ws,
                        const MlpOptions& options) {
    const int samples = static_cast<int>(ws.augmented.rows());
    const int dim = static_cast<int>(ws.augmented.cols());
    const int nh = ws.hidden_nodes;

    auto objective_of = [&](const Matrix& h, const Vector& o) {
        return nu * data_error(h, o, ws) + (1.0 - nu) * weight_error(h, o);
    };

    double learning_rate = options.learning_rate / (nu * samples + 1.0);
    double objective = objective_of(hidden, output);
    Matrix hidden_velocity = Matrix::Zero(nh, dim);
    Vector output_velocity = Vector::Zero(nh + 1);
    int nan_backoffs = 0;

    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        const Matrix pre = ws.augmented * hidden.transpose();
        const Matrix activations = pre.unaryExpr([](double u) { return logistic(u); });
        const Vector fitted = Vector::Constant(samples, output[0]) + activations * output.tail(nh);
        const Vector error = 2.0 * nu * (fitted - ws.targets);

        Vector output_gradient(nh + 1);
        output_gradient[0] = error.sum();
        output_gradient.tail(nh) = activations.transpose() * error;
        output_gradient += 2.0 * (1.0 - nu) * output;

        Matrix hidden_gradient(nh, dim);
        for (int k = 0; k < nh; ++k) {
            const Vector signal =
                error.array() * output[k + 1] * (activations.col(k).array() * (1.0 - activations.col(k).array()));
            hidden_gradient.row(k) = signal.transpose() * ws.augmented;
        }
        hidden_gradient += 2.0 * (1.0 - nu) * hidden;

        hidden_velocity = options.momentum * hidden_velocity - learning_rate * hidden_gradient;
        output_velocity = options.momentum * output_velocity - learning_rate * output_gradient;
        const Matrix hidden_next = hidden + hidden_velocity;
        const Vector output_next = output + output_velocity;
        const double objective_next = objective_of(hidden_next, output_next);

        if (!std::isfinite(objective_next)) {
            ++nan_backoffs;
            if (nan_backoffs > 5) throw NumericalError("bnn: training diverged after 5 backoffs");
            learning_rate *= 0.2;
            hidden_velocity.setZero();
            output_velocity.setZero();
            continue;
        }
        if (objective_next > objective) {
            learning_rate *= 0.5;
            hidden_velocity.setZero();
            output_velocity.setZero();
            if (learning_rate < 1e-16) break;
            continue;
        }
        const double improvement = objective - objective_next;
        hidden = hidden_next;
        output = output_next;
        objective = objective_next;
        if (improvement < options.tolerance * (1.0 + objective)) break;
    }
}

Workspace make_workspace(const LaggedDataset& train, int hidden_nodes, MlpModel& model) {
    model.hidden_nodes = hidden_nodes;
    model.input_mean = train.inputs.colwise().mean();
    model.input_scale.resize(train.inputs.cols());
    for (int j = 0; j < train.inputs.cols(); ++j) {
        const double variance = (train.inputs.col(j).array() - model.input_mean[j]).square().sum() /
                                std::max<int>(1, train.size() - 1);
        model.input_scale[j] = std::sqrt(variance);
        if (model.input_scale[j] < 1e-12) model.input_scale[j] = 1.0;
    }
    model.target_mean = train.targets.mean();
    const double target_variance =
        (train.targets.array() - model.target_mean).square().sum() / std::max<int>(1, train.size() - 1);
    model.target_scale = std::sqrt(target_variance);
    if (model.target_scale < 1e-12) model.target_scale = 1.0;

    Workspace ws;
    ws.hidden_nodes = hidden_nodes;
    Matrix standardized = train.inputs;
    standardized.rowwise() -= model.input_mean.transpose();
    standardized.array().rowwise() /= model.input_scale.transpose().array();
    ws.augmented.resize(standardized.rows(), standardized.cols() + 1);
    ws.augmented.leftCols(standardized.cols()) = standardized;
    ws.augmented.col(standardized.cols()).setOnes();
    ws.targets = (train.targets.array() - model.target_mean) / model.target_scale;
    return ws;
}

void seed_weights(Matrix& hidden, Vector& output, int hidden_nodes, int dim, std::uint64_t seed) {
    Rng rng(seed);
    hidden.resize(hidden_nodes, dim);
    output.resize(hidden_nodes + 1);
    for (int i = 0; i < hidden.size(); ++i) hidden.data()[i] = rng.uniform(-0.5, 0.5);
    for (int i = 0; i < output.size(); ++i) output[i] = rng.uniform(-0.5, 0.5);
}

}  // namespace

BnnModel bnn_fit_fixed_nu(const LaggedDataset& train, int hidden_nodes, double nu,
                          std::uint64_t seed, const MlpOptions& options) {
    if (hidden_nodes < 1) throw ValidationError("bnn: need at least one hidden node");
    if (nu <= 0.0 || nu >= 1.0) throw ValidationError("bnn: nu must lie in (0, 1)");
    if (train.size() < 1) throw ValidationError("bnn: empty training set");

    BnnModel model;
    Workspace ws = make_workspace(train, hidden_nodes, model.network);
    Matrix hidden;
    Vector output;
    seed_weights(hidden, output, hidden_nodes, static_cast<int>(ws.augmented.cols()), seed);
    minimize_objective(hidden, output, nu, ws, options);

    model.nu = nu;
    model.network.hidden_weights = hidden;
    model.network.output_weights = output;
    model.data_error = data_error(hidden, output, ws);
    model.weight_error = weight_error(hidden, output);
    model.objective = nu * model.data_error + (1.0 - nu) * model.weight_error;
    model.network.final_loss = model.data_error / train.size();
    return model;
}

BnnModel bnn_fit(const LaggedDataset& train, int hidden_nodes, std::uint64_t seed,
                 const BnnOptions& options) {
    if (hidden_nodes < 1) throw ValidationError("bnn: need at least one hidden node");
    if (train.size() < 1) throw ValidationError("bnn: empty training set");

    std::vector<double> grid = options.nu_grid;
    if (grid.empty())
        for (double nu = 0.05; nu < 0.951; nu += 0.05) grid.push_back(nu);

    BnnModel model;
    Workspace ws = make_workspace(train, hidden_nodes, model.network);
    Matrix hidden;
    Vector output;
    seed_weights(hidden, output, hidden_nodes, static_cast<int>(ws.augmented.cols()), seed);

    const int samples = train.size();
    const int weight_count = ws.weight_count();
    double nu = 0.5;
    double previous_objective = std::numeric_limits<double>::infinity();

    for (int outer = 0; outer < options.max_outer_iterations; ++outer) {
        minimize_objective(hidden, output, nu, ws, options.inner);
        const double e_data = data_error(hidden, output, ws);
        const double e_weights = weight_error(hidden, output);
        const double objective = nu * e_data + (1.0 - nu) * e_weights;

        // Laplace evidence on the nu grid using the current Gauss-Newton
        // spectrum; only the Hessian changes with nu.
        const Vector spectrum = gauss_newton_spectrum(hidden, output, ws);
        double best_nu = nu;
        double best_evidence = -std::numeric_limits<double>::infinity();
        for (const double candidate : grid) {
            double log_det = 0.0;
            for (int i = 0; i < spectrum.size(); ++i)
                log_det += std::log(2.0 * candidate * spectrum[i] + 2.0 * (1.0 - candidate));
            const double evidence = 0.5 * samples * std::log(candidate / M_PI) +
                                    0.5 * weight_count * std::log((1.0 - candidate) / M_PI) -
                                    (candidate * e_data + (1.0 - candidate) * e_weights) +
                                    0.5 * weight_count * std::log(2.0 * M_PI) - 0.5 * log_det;
            if (evidence > best_evidence) {
                best_evidence = evidence;
                best_nu = candidate;
            }
        }
        nu = best_nu;

        if (std::abs(previous_objective - objective) < options.objective_tolerance) {
            previous_objective = objective;
            break;
        }
        previous_objective = objective;
    }

    minimize_objective(hidden, output, nu, ws, options.inner);
    model.nu = nu;
    model.network.hidden_weights = hidden;
    model.network.output_weights = output;
    model.data_error = data_error(hidden, output, ws);
    model.weight_error = weight_error(hidden, output);
    model.objective = nu * model.data_error + (1.0 - nu) * model.weight_error;
    model.network.final_loss = model.data_error / samples;
    return model;
}

double bnn_predict(const BnnModel& model, const Vector& query) { return mlp_predict(model.network, query); }

}  // namespace riskcast
