#include "riskcast/ml/svr.hpp"

#include <algorithm>
#include <cmath>

namespace riskcast {

namespace {

double median_of(const Vector& values) {
    std::vector<double> sorted(values.data(), values.data() + values.size());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double gaussian(const Vector& a, const Vector& b, double gamma) {
    return std::exp(-gamma * (a - b).squaredNorm());
}

}  // namespace

SvrModel svr_fit(const LaggedDataset& train, double penalty, double tube, SvrKernel kernel,
                 const SvrOptions& options) {
    if (penalty < 0.0) throw ValidationError("svr: penalty must be non-negative");
    if (tube < 0.0) throw ValidationError("svr: tube width must be non-negative");
    if (train.size() < 1) throw ValidationError("svr: empty training set");

    const int samples = train.size();
    const int dim = static_cast<int>(train.inputs.cols());

    SvrModel model;
    model.kernel = kernel;
    model.gamma = options.gamma;
    model.bias = median_of(train.targets);

    Matrix gram;
    if (kernel == SvrKernel::gaussian) {
        model.support_inputs = train.inputs;
        gram.resize(samples, samples);
        for (int i = 0; i < samples; ++i)
            for (int j = 0; j <= i; ++j) {
                gram(i, j) = gaussian(train.inputs.row(i).transpose(), train.inputs.row(j).transpose(),
                                      options.gamma);
                gram(j, i) = gram(i, j);
            }
        model.alpha = Vector::Zero(samples);
    } else {
        model.beta = Vector::Zero(dim);
    }

    auto objective_of = [&](const Vector& weights, double bias) {
        Vector fitted;
        double regularizer;
        if (kernel == SvrKernel::gaussian) {
            fitted = gram * weights;
            regularizer = 0.5 * weights.dot(fitted);
        } else {
            fitted = train.inputs * weights;
            regularizer = 0.5 * weights.squaredNorm();
        }
        double loss = 0.0;
        for (int m = 0; m < samples; ++m) {
            const double slack = std::abs(train.targets[m] - fitted[m] - bias) - tube;
            if (slack > 0.0) loss += slack;
        }
        return regularizer + penalty * loss;
    };

    Vector weights = kernel == SvrKernel::gaussian ? model.alpha : model.beta;
    double bias = model.bias;
    Vector weights_sum = weights;
    double bias_sum = bias;

    // scale-aware base step: the regularizer gradient alone has unit scale
    const double input_scale = std::max(1.0, train.inputs.rowwise().norm().mean());
    const double base_step = 1.0 / (1.0 + penalty * input_scale * input_scale);

    double previous = objective_of(weights, bias);
    model.converged = false;
    int steps_taken = 0;
    for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
        ++steps_taken;
        Vector fitted = kernel == SvrKernel::gaussian ? Vector(gram * weights)
                                                      : Vector(train.inputs * weights);
        Vector sign_active = Vector::Zero(samples);
        for (int m = 0; m < samples; ++m) {
            const double residual = train.targets[m] - fitted[m] - bias;
            if (std::abs(residual) > tube) sign_active[m] = residual > 0.0 ? 1.0 : -1.0;
        }
        Vector gradient;
        if (kernel == SvrKernel::gaussian) {
            gradient = gram * (weights - penalty * sign_active);
        } else {
            gradient = weights - penalty * train.inputs.transpose() * sign_active;
        }
        const double bias_gradient = -penalty * sign_active.sum();

        const double step = base_step / std::sqrt(static_cast<double>(iteration) + 1.0);
        weights -= step * gradient;
        bias -= step * bias_gradient;
        weights_sum += weights;
        bias_sum += bias;

        if ((iteration + 1) % 50 == 0) {
            const double current = objective_of(weights, bias);
            if (std::abs(previous - current) <= options.tolerance * (1.0 + std::abs(previous))) {
                model.converged = true;
                break;
            }
            previous = current;
        }
    }

    // Polyak averaging smooths the subgradient trajectory.
    const double count = static_cast<double>(steps_taken + 1);
    Vector averaged = weights_sum / count;
    double averaged_bias = bias_sum / count;
    if (objective_of(averaged, averaged_bias) <= objective_of(weights, bias)) {
        weights = averaged;
        bias = averaged_bias;
    }

    model.bias = bias;
    model.objective = objective_of(weights, bias);
    if (kernel == SvrKernel::gaussian)
        model.alpha = weights;
    else
        model.beta = weights;
    return model;
}

double svr_predict(const SvrModel& model, const Vector& query) {
    if (model.kernel == SvrKernel::gaussian) {
        double out = model.bias;
        for (int m = 0; m < model.support_inputs.rows(); ++m)
            out += model.alpha[m] *
                   gaussian(model.support_inputs.row(m).transpose(), query, model.gamma);
        return out;
    }
    return model.beta.dot(query) + model.bias;
}

}  // namespace riskcast
