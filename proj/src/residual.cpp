#include "riskcast/residual.hpp"

#include <algorithm>
#include <cmath>

namespace riskcast {

ResidualPanel residuals(const LogRiskPanel& panel, const TrigModel& model) {
    if (panel.nodes() != model.fit_length)
        throw ValidationError("residuals: panel grid does not match the fitted grid");
    if (panel.regions() != static_cast<int>(model.cosine.cols()))
        throw ValidationError("residuals: region count mismatch");
    ResidualPanel res;
    res.node_times = panel.node_times;
    res.region_ids = panel.region_ids;
    res.values = panel.values - predict(model, fit_times(model.fit_length));
    return res;
}

namespace {

CovariancePair covariances_from_parts(const Matrix& rows_for_r0, const Matrix& lagged,
                                      const Matrix& leading) {
    CovariancePair cov;
    cov.r0 = (rows_for_r0.transpose() * rows_for_r0) / static_cast<double>(rows_for_r0.rows());
    cov.r0 = 0.5 * (cov.r0 + cov.r0.transpose());  // enforce exact symmetry

    // r1(p,q) = mean over pairs of Y_t(q) Y_{t+1}(p)
    cov.r1 = (leading.transpose() * lagged) / static_cast<double>(lagged.rows());

    Eigen::SelfAdjointEigenSolver<Matrix> eigen(cov.r0);
    if (eigen.info() != Eigen::Success) throw NumericalError("empirical_covariances: eigensolve failed");
    // Eigen returns ascending order; flip to non-increasing.
    cov.eigenvalues = eigen.eigenvalues().reverse();
    cov.eigenvectors = eigen.eigenvectors().rowwise().reverse();
    return cov;
}

}  // namespace

CovariancePair empirical_covariances(const ResidualPanel& res, bool center) {
    const int t_len = res.nodes();
    if (t_len < 2) throw ValidationError("empirical_covariances: need at least two time points");

    Matrix values = res.values;
    if (center) values.rowwise() -= values.colwise().mean();

    return covariances_from_parts(values, values.topRows(t_len - 1), values.bottomRows(t_len - 1));
}

CovariancePair empirical_covariances_masked(const ResidualPanel& res, const std::vector<int>& keep_rows,
                                            bool center) {
    if (keep_rows.size() < 2)
        throw ValidationError("empirical_covariances: need at least two kept rows");
    std::vector<int> rows = keep_rows;
    std::sort(rows.begin(), rows.end());
    for (const int r : rows)
        if (r < 0 || r >= res.nodes()) throw ValidationError("empirical_covariances: row out of range");

    Matrix values = res.values;
    if (center) {
        Vector mean = Vector::Zero(res.regions());
        for (const int r : rows) mean += values.row(r).transpose();
        mean /= static_cast<double>(rows.size());
        values.rowwise() -= mean.transpose();
    }

    Matrix kept(static_cast<int>(rows.size()), res.regions());
    for (std::size_t i = 0; i < rows.size(); ++i) kept.row(static_cast<int>(i)) = values.row(rows[i]);

    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        if (rows[i + 1] == rows[i] + 1) pairs.emplace_back(rows[i], rows[i + 1]);
    if (pairs.empty())
        throw ValidationError("empirical_covariances: kept rows contain no consecutive pair");

    Matrix lagged(static_cast<int>(pairs.size()), res.regions());
    Matrix leading(static_cast<int>(pairs.size()), res.regions());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        lagged.row(static_cast<int>(i)) = values.row(pairs[i].first);
        leading.row(static_cast<int>(i)) = values.row(pairs[i].second);
    }
    return covariances_from_parts(kept, lagged, leading);
}

AutocorrEstimate estimate_rho(const CovariancePair& cov, int truncation) {
    const int regions = static_cast<int>(cov.r0.rows());
    if (truncation < 1 || truncation > regions)
        throw ValidationError("estimate_rho: truncation must lie in [1, P]");

    const double largest = cov.eigenvalues[0];
    const double threshold = std::max(largest, 0.0) * 1e-12;
    Matrix pseudo_inverse = Matrix::Zero(regions, regions);
    Matrix projector = Matrix::Zero(regions, regions);
    for (int k = 0; k < truncation; ++k) {
        const double eigenvalue = cov.eigenvalues[k];
        if (eigenvalue <= threshold || eigenvalue <= 1e-12)
            throw NumericalError("estimate_rho: eigenvalue " + std::to_string(k + 1) +
                                 " below threshold; usable rank is " + std::to_string(k));
        const Vector direction = cov.eigenvectors.col(k);
        pseudo_inverse += direction * direction.transpose() / eigenvalue;
        projector += direction * direction.transpose();
    }

    AutocorrEstimate estimate;
    estimate.truncation = truncation;
    estimate.method = RhoMethod::classical;
    estimate.rho = projector * cov.r1 * pseudo_inverse;
    return estimate;
}

int default_truncation(int sample_length) {
    if (sample_length < 2) throw ValidationError("default_truncation: sample too short");
    return std::max(1, static_cast<int>(std::floor(std::log(static_cast<double>(sample_length)))));
}

Vector plugin_predict(const AutocorrEstimate& estimate, const ResidualPanel& res, int t) {
    if (t < 2 || t > res.nodes())
        throw ValidationError("plugin_predict: node index out of range (needs 2 <= t <= T)");
    if (estimate.rho.cols() != res.regions())
        throw ValidationError("plugin_predict: estimate and residual panel disagree on regions");
    return estimate.rho * res.values.row(t - 2).transpose();
}

}  // namespace riskcast
