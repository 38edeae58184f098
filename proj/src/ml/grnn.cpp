#include "riskcast/ml/grnn.hpp"

#include <cmath>

namespace riskcast {

namespace {

double gaussian_kernel(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI); }

}  // namespace

double grnn_predict(const LaggedDataset& train, const Vector& query, double bandwidth) {
    if (bandwidth <= 0.0) throw ValidationError("grnn: bandwidth must be positive");
    if (train.size() < 1) throw ValidationError("grnn: empty training set");
    if (query.size() != train.inputs.cols()) throw ValidationError("grnn: query dimension mismatch");

    double weight_sum = 0.0;
    double weighted_targets = 0.0;
    int nearest = 0;
    double nearest_distance = std::numeric_limits<double>::infinity();
    for (int m = 0; m < train.size(); ++m) {
        const double distance = (train.inputs.row(m).transpose() - query).norm();
        if (distance < nearest_distance) {
            nearest_distance = distance;
            nearest = m;
        }
        const double weight = gaussian_kernel(distance / bandwidth);
        weight_sum += weight;
        weighted_targets += weight * train.targets[m];
    }
    if (weight_sum <= 0.0) return train.targets[nearest];  // all kernels underflowed
    return weighted_targets / weight_sum;
}

Vector grnn_predict_soft(const Matrix& history, int lags, double bandwidth) {
    if (bandwidth <= 0.0) throw ValidationError("grnn: bandwidth must be positive");
    if (lags < 2) throw ValidationError("grnn soft: need at least two lags");
    if (history.rows() < lags) throw ValidationError("grnn soft: history shorter than the lag window");

    const int t = static_cast<int>(history.rows()) - 1;  // newest row
    double weight_sum = 0.0;
    Vector blended = Vector::Zero(history.cols());
    int nearest_j = 1;
    double nearest_distance = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= lags - 1; ++j) {
        const double distance = (history.row(t) - history.row(t - j)).norm();
        if (distance < nearest_distance) {
            nearest_distance = distance;
            nearest_j = j;
        }
        const double weight = gaussian_kernel(distance / bandwidth);
        weight_sum += weight;
        blended += weight * history.row(t - j + 1).transpose();
    }
    if (weight_sum <= 0.0) return history.row(t - nearest_j + 1).transpose();
    return blended / weight_sum;
}

}  // namespace riskcast
