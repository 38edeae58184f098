#include "riskcast/trig.hpp"

#include <cmath>

namespace riskcast {

std::vector<double> harmonic_frequencies(int harmonics, int sample_length) {
    if (harmonics < 0) throw ValidationError("harmonic count must be non-negative");
    if (sample_length < 1) throw ValidationError("sample length must be positive");
    std::vector<double> frequencies(harmonics);
    for (int k = 0; k < harmonics; ++k)
        frequencies[k] = 2.0 * M_PI * (k + 1) / static_cast<double>(sample_length);
    return frequencies;
}

std::vector<double> fit_times(int sample_length) {
    std::vector<double> times(sample_length);
    for (int t = 0; t < sample_length; ++t) times[t] = static_cast<double>(t + 1);
    return times;
}

Matrix design_matrix(const std::vector<double>& frequencies, const std::vector<double>& times,
                     bool pin_b1) {
    if (frequencies.empty()) throw ValidationError("design_matrix: no frequencies");
    if (times.empty()) throw ValidationError("design_matrix: no times");
    const int n = static_cast<int>(frequencies.size());
    const int rows = static_cast<int>(times.size());
    const int cols = 2 * n - (pin_b1 ? 1 : 0);
    Matrix design(rows, cols);
    for (int t = 0; t < rows; ++t) {
        int column = 0;
        for (int k = 0; k < n; ++k) {
            const double phase = frequencies[k] * times[t];
            design(t, column++) = std::cos(phase);
            if (k > 0 || !pin_b1) design(t, column++) = std::sin(phase);
        }
    }
    return design;
}

namespace {

void check_frequencies(const std::vector<double>& frequencies) {
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
        if (frequencies[k] <= 0.0) throw ValidationError("frequencies must be positive");
        if (k > 0 && frequencies[k] <= frequencies[k - 1])
            throw ValidationError("frequencies must be strictly increasing");
    }
}

// QR with column pivoting; reports the offending frequency pair when the
// design collapses.
Eigen::ColPivHouseholderQR<Matrix> checked_qr(const Matrix& design, const std::vector<double>& frequencies,
                                              double condition_limit) {
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    const auto& r_diag = qr.matrixR().diagonal();
    const double largest = std::abs(r_diag[0]);
    const double smallest = std::abs(r_diag[r_diag.size() - 1]);
    if (qr.rank() < design.cols() || largest > condition_limit * smallest) {
        std::string detail = "rank-deficient trigonometric design";
        for (std::size_t a = 0; a + 1 < frequencies.size(); ++a) {
            if (std::abs(frequencies[a + 1] - frequencies[a]) < 1e-12) {
                detail += " (frequencies " + std::to_string(a + 1) + " and " + std::to_string(a + 2) +
                          " coincide)";
                break;
            }
        }
        throw NumericalError(detail);
    }
    return qr;
}

}  // namespace

TrigModel fit_trig(const LogRiskPanel& panel, int harmonics, const std::vector<double>& frequencies,
                   const TrigFitOptions& options) {
    if (harmonics < 1) throw ValidationError("fit_trig: need at least one harmonic");
    if (static_cast<int>(frequencies.size()) != harmonics)
        throw ValidationError("fit_trig: frequency list does not match harmonic count");
    check_frequencies(frequencies);
    const int sample_length = panel.nodes();
    if (sample_length < 2 * harmonics)
        throw ValidationError("fit_trig: sample shorter than coefficient count");

    const auto times = fit_times(sample_length);
    const Matrix design = design_matrix(frequencies, times, options.pin_b1);
    const auto qr = checked_qr(design, frequencies, options.condition_limit);
    const Matrix coefficients = qr.solve(panel.values);  // cols x P

    TrigModel model;
    model.harmonics = harmonics;
    model.frequencies = frequencies;
    model.region_ids = panel.region_ids;
    model.fit_length = sample_length;
    model.pin_b1 = options.pin_b1;
    model.cosine.setZero(harmonics, panel.regions());
    model.sine.setZero(harmonics, panel.regions());
    int row = 0;
    for (int k = 0; k < harmonics; ++k) {
        model.cosine.row(k) = coefficients.row(row++);
        if (k > 0 || !options.pin_b1) model.sine.row(k) = coefficients.row(row++);
    }
    return model;
}

TrigModel fit_trig(const LogRiskPanel& panel, int harmonics, const TrigFitOptions& options) {
    return fit_trig(panel, harmonics, harmonic_frequencies(harmonics, panel.nodes()), options);
}

Matrix predict(const TrigModel& model, const std::vector<double>& times) {
    const int rows = static_cast<int>(times.size());
    const int regions = static_cast<int>(model.cosine.cols());
    Matrix out = Matrix::Zero(rows, regions);
    for (int t = 0; t < rows; ++t) {
        for (int k = 0; k < model.harmonics; ++k) {
            const double phase = model.frequencies[k] * times[t];
            const double c = std::cos(phase);
            const double s = std::sin(phase);
            for (int p = 0; p < regions; ++p)
                out(t, p) += model.cosine(k, p) * c + model.sine(k, p) * s;
        }
    }
    return out;
}

Vector empirical_risk(const TrigModel& model, const LogRiskPanel& panel) {
    if (panel.nodes() != model.fit_length)
        throw ValidationError("empirical_risk: panel grid does not match the fitted grid");
    const Matrix fitted = predict(model, fit_times(model.fit_length));
    const Matrix residual = panel.values - fitted;
    return residual.array().square().colwise().mean();
}

double selection_ratio(int sample_length, const Matrix& design) {
    if (design.cols() == 0) return 1.0;
    if (sample_length <= design.cols())
        throw ValidationError("selection_ratio: coefficient count must be below sample length");
    const Matrix gram = design.transpose() * design;
    Eigen::SelfAdjointEigenSolver<Matrix> eigen(gram);
    if (eigen.info() != Eigen::Success) throw NumericalError("selection_ratio: eigensolve failed");
    const double smallest = eigen.eigenvalues().minCoeff();
    if (smallest <= 0.0) throw NumericalError("selection_ratio: Phi^T Phi is singular");
    const double inverse_sum = eigen.eigenvalues().cwiseInverse().sum();
    const double m = static_cast<double>(design.cols());
    const double t = static_cast<double>(sample_length);
    return 1.0 / (1.0 - m / t) * (1.0 + inverse_sum / t);
}

SelectionReport select_harmonics(const LogRiskPanel& panel, const std::vector<int>& candidates,
                                 double threshold, const TrigFitOptions& options) {
    if (candidates.empty()) throw ValidationError("select_harmonics: no candidates");
    const int sample_length = panel.nodes();
    SelectionReport report;
    report.threshold = threshold;
    int best = -1;
    for (const int n : candidates) {
        if (2 * n >= sample_length)
            throw ValidationError("select_harmonics: candidate " + std::to_string(n) +
                                  " needs 2N < T");
        const auto frequencies = harmonic_frequencies(n, sample_length);
        const Matrix design = design_matrix(frequencies, fit_times(sample_length), options.pin_b1);
        const double ratio = selection_ratio(sample_length, design);
        const TrigModel model = fit_trig(panel, n, frequencies, options);
        const double mean_risk = empirical_risk(model, panel).mean();
        report.candidates.push_back({n, ratio, mean_risk});
        if (ratio <= threshold && n > best) best = n;
    }
    if (best < 0)
        throw ValidationError(
            "select_harmonics: no candidate satisfies the ratio threshold; increase the threshold");
    report.chosen_harmonics = best;
    return report;
}

}  // namespace riskcast
