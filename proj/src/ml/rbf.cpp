#include "riskcast/ml/rbf.hpp"

#include <cmath>
#include <set>

namespace riskcast {

namespace {

double node_value(const Vector& x, const Vector& center, double spread) {
    return std::exp(-(x - center).squaredNorm() / (spread * spread));
}

}  // namespace

RbfModel rbf_fit(const LaggedDataset& train, double spread, double tolerance, int max_nodes) {
    if (spread <= 0.0) throw ValidationError("rbf: spread must be positive");
    if (train.size() < 1) throw ValidationError("rbf: empty training set");
    const int samples = train.size();
    const int limit = max_nodes < 0 ? samples : std::min(max_nodes, samples);

    RbfModel model;
    model.spread = spread;
    Vector fitted = Vector::Zero(samples);
    std::set<int> used;
    Matrix design(samples, 0);

    while (static_cast<int>(used.size()) < limit) {
        // worst-fit training input not already a center
        int worst = -1;
        double worst_error = -1.0;
        for (int m = 0; m < samples; ++m) {
            if (used.count(m)) continue;
            const double error = std::abs(train.targets[m] - fitted[m]);
            if (error > worst_error) {
                worst_error = error;
                worst = m;
            }
        }
        if (worst < 0) break;
        const double max_error = (train.targets - fitted).cwiseAbs().maxCoeff();
        if (!model.error_path.empty() && max_error <= tolerance) break;

        used.insert(worst);
        design.conservativeResize(samples, design.cols() + 1);
        for (int m = 0; m < samples; ++m)
            design(m, design.cols() - 1) =
                node_value(train.inputs.row(m).transpose(), train.inputs.row(worst).transpose(), spread);

        // all output weights re-solved by least squares
        model.weights = design.colPivHouseholderQr().solve(train.targets);
        fitted = design * model.weights;
        model.error_path.push_back((train.targets - fitted).squaredNorm());

        model.centers.conservativeResize(model.centers.rows() + 1, train.inputs.cols());
        model.centers.row(model.centers.rows() - 1) = train.inputs.row(worst);

        if ((train.targets - fitted).cwiseAbs().maxCoeff() <= tolerance) break;
    }
    return model;
}

double rbf_predict(const RbfModel& model, const Vector& query) {
    double out = 0.0;
    for (int j = 0; j < model.centers.rows(); ++j)
        out += model.weights[j] * node_value(query, model.centers.row(j).transpose(), model.spread);
    return out;
}

}  // namespace riskcast
