#include "riskcast/ml/gp.hpp"

#include <cmath>

namespace riskcast {

double se_kernel(const Vector& a, const Vector& b, double length_scale, double signal_variance) {
    return signal_variance * std::exp(-(a - b).squaredNorm() / (2.0 * length_scale * length_scale));
}

Vector gp_solve(const Matrix& gram, const Vector& targets, double noise_variance) {
    if (gram.rows() != gram.cols()) throw ValidationError("gp: Gram matrix must be square");
    if (gram.rows() != targets.size()) throw ValidationError("gp: Gram size does not match targets");
    if (noise_variance < 0.0) throw ValidationError("gp: noise variance must be non-negative");

    const int n = static_cast<int>(gram.rows());
    Matrix system = gram + noise_variance * Matrix::Identity(n, n);
    Eigen::LLT<Matrix> chol(system);
    if (chol.info() != Eigen::Success) {
        const double jitter = 1e-8 * std::max(1.0, system.trace() / n);
        chol.compute(system + jitter * Matrix::Identity(n, n));
        if (chol.info() != Eigen::Success)
            throw NumericalError("gp: Gram matrix not positive definite after jitter");
    }
    return chol.solve(targets);
}

double gp_predict_gram(const Vector& cross_covariances, const Vector& alpha) {
    if (cross_covariances.size() != alpha.size())
        throw ValidationError("gp: cross covariance size mismatch");
    return cross_covariances.dot(alpha);
}

namespace {

Matrix se_gram(const Matrix& inputs, double length_scale, double signal_variance) {
    const int n = static_cast<int>(inputs.rows());
    Matrix gram(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            gram(i, j) = se_kernel(inputs.row(i).transpose(), inputs.row(j).transpose(), length_scale,
                                   signal_variance);
            gram(j, i) = gram(i, j);
        }
    return gram;
}

double log_marginal_likelihood(const Matrix& gram, const Vector& targets, double noise_variance) {
    const int n = static_cast<int>(gram.rows());
    Matrix system = gram + noise_variance * Matrix::Identity(n, n);
    Eigen::LLT<Matrix> chol(system);
    if (chol.info() != Eigen::Success) {
        const double jitter = 1e-8 * std::max(1.0, system.trace() / n);
        chol.compute(system + jitter * Matrix::Identity(n, n));
        if (chol.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    }
    const Vector alpha = chol.solve(targets);
    double log_det = 0.0;
    for (int i = 0; i < n; ++i) log_det += std::log(chol.matrixL()(i, i));
    return -0.5 * targets.dot(alpha) - log_det - 0.5 * n * std::log(2.0 * M_PI);
}

}  // namespace

GpModel gp_fit(const LaggedDataset& train, double length_scale, double signal_variance,
               double noise_variance) {
    if (length_scale <= 0.0 || signal_variance <= 0.0)
        throw ValidationError("gp: kernel parameters must be positive");
    if (train.size() < 1) throw ValidationError("gp: empty training set");

    GpModel model;
    model.train_inputs = train.inputs;
    model.length_scale = length_scale;
    model.signal_variance = signal_variance;
    model.noise_variance = noise_variance;
    const Matrix gram = se_gram(train.inputs, length_scale, signal_variance);
    model.alpha = gp_solve(gram, train.targets, noise_variance);
    model.log_marginal = log_marginal_likelihood(gram, train.targets, noise_variance);
    return model;
}

GpModel gp_fit_tuned(const LaggedDataset& train) {
    if (train.size() < 2) throw ValidationError("gp: need at least two samples to tune");

    // data-driven anchors: median pairwise distance and target variance
    std::vector<double> distances;
    const int probe = std::min(train.size(), 200);
    for (int i = 0; i < probe; ++i)
        for (int j = i + 1; j < probe; ++j)
            distances.push_back((train.inputs.row(i) - train.inputs.row(j)).norm());
    std::sort(distances.begin(), distances.end());
    double anchor_scale = distances.empty() ? 1.0 : distances[distances.size() / 2];
    if (anchor_scale <= 0.0) anchor_scale = 1.0;
    const double target_mean = train.targets.mean();
    double anchor_variance =
        (train.targets.array() - target_mean).square().sum() / std::max(1, train.size() - 1);
    if (anchor_variance <= 0.0) anchor_variance = 1.0;

    const double scale_factors[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    const double variance_factors[] = {0.25, 1.0, 4.0};
    const double noise_factors[] = {1e-6, 1e-4, 1e-2, 1e-1};

    GpModel best;
    double best_evidence = -std::numeric_limits<double>::infinity();
    for (const double sf : scale_factors) {
        const double length_scale = sf * anchor_scale;
        for (const double vf : variance_factors) {
            const double signal_variance = vf * anchor_variance;
            const Matrix gram = se_gram(train.inputs, length_scale, signal_variance);
            for (const double nf : noise_factors) {
                const double noise = nf * anchor_variance;
                const double evidence = log_marginal_likelihood(gram, train.targets, noise);
                if (evidence > best_evidence) {
                    best_evidence = evidence;
                    best.length_scale = length_scale;
                    best.signal_variance = signal_variance;
                    best.noise_variance = noise;
                }
            }
        }
    }
    return gp_fit(train, best.length_scale, best.signal_variance, best.noise_variance);
}

double gp_predict(const GpModel& model, const Vector& query) {
    Vector cross(model.train_inputs.rows());
    for (int i = 0; i < model.train_inputs.rows(); ++i)
        cross[i] = se_kernel(model.train_inputs.row(i).transpose(), query, model.length_scale,
                             model.signal_variance);
    return gp_predict_gram(cross, model.alpha);
}

Vector soft_gp_predict(const LogRiskPanel& panel, const SpatialWeighting& weighting,
                       const Vector& hard_noise_variances, const std::vector<int>& train_nodes,
                       int query_node) {
    const int regions = panel.regions();
    if (hard_noise_variances.size() != regions)
        throw ValidationError("soft gp: noise variance size must equal P");
    if (train_nodes.empty()) throw ValidationError("soft gp: no training nodes");
    for (const int node : train_nodes)
        if (node < 0 || node >= panel.nodes()) throw ValidationError("soft gp: training node out of range");
    if (query_node < 0 || query_node >= panel.nodes())
        throw ValidationError("soft gp: query node out of range");
    weighting.validate();
    if (weighting.matrix.rows() != regions) throw ValidationError("soft gp: weighting dimension mismatch");

    const int n_train = static_cast<int>(train_nodes.size());

    // Column means over the training nodes; the empirical covariance between
    // node rows is taken across the regional cross-section.
    Vector column_means = Vector::Zero(regions);
    for (const int node : train_nodes) column_means += panel.values.row(node).transpose();
    column_means /= static_cast<double>(n_train);

    Matrix centered(n_train, regions);
    for (int i = 0; i < n_train; ++i)
        centered.row(i) = panel.values.row(train_nodes[i]) - column_means.transpose();
    const Vector centered_query = panel.values.row(query_node).transpose() - column_means;

    const Matrix gram = centered * centered.transpose() / static_cast<double>(regions);
    const Vector cross = centered * centered_query / static_cast<double>(regions);

    // Projected innovation covariance W diag(sigma^2) W^T; each region keeps
    // its own diagonal entry as observation noise.
    const Matrix projected_noise = weighting.matrix *
                                   hard_noise_variances.asDiagonal() *
                                   weighting.matrix.transpose();

    Vector predictions(regions);
    for (int p = 0; p < regions; ++p) {
        Vector targets(n_train);
        for (int i = 0; i < n_train; ++i) targets[i] = panel.values(train_nodes[i], p) - column_means[p];
        const Vector alpha = gp_solve(gram, targets, projected_noise(p, p));
        predictions[p] = column_means[p] + gp_predict_gram(cross, alpha);
    }
    return predictions;
}

}  // namespace riskcast
