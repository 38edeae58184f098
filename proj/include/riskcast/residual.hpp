#pragma once

#include "riskcast/panel.hpp"
#include "riskcast/trig.hpp"

namespace riskcast {

// Regression residuals Y_t = observed - fitted on the node grid.
struct ResidualPanel {
    std::vector<double> node_times;
    std::vector<std::string> region_ids;
    Matrix values;  // T x P

    int nodes() const { return static_cast<int>(values.rows()); }
    int regions() const { return static_cast<int>(values.cols()); }
};

// Lag-0 and lag-1 empirical covariance operators with the spectrum of R0.
struct CovariancePair {
    Matrix r0;          // symmetric P x P
    Matrix r1;          // P x P, r1(p,q) = (1/(T-1)) sum Y_t(q) Y_{t+1}(p)
    Vector eigenvalues;  // non-increasing
    Matrix eigenvectors;  // orthonormal columns, aligned with eigenvalues
};

enum class RhoMethod { classical, bayesian };

struct AutocorrEstimate {
    Matrix rho;  // P x P, prediction is rho * Y_{t-1}
    int truncation = 0;
    RhoMethod method = RhoMethod::classical;
};

ResidualPanel residuals(const LogRiskPanel& panel, const TrigModel& model);

// Uncentered products as written in the operator definitions; `center`
// subtracts column means first.
CovariancePair empirical_covariances(const ResidualPanel& res, bool center = false);

// Restriction to a subset of rows: R0 averages the kept rows, R1 the lag-1
// pairs whose two rows are both kept. Equals the full version when every row
// is kept.
CovariancePair empirical_covariances_masked(const ResidualPanel& res, const std::vector<int>& keep_rows,
                                            bool center = false);

// Spectrally truncated estimator: rho = Pi_k R1 R0^+ with the pseudo-inverse
// and projector built from the top `truncation` eigenpairs of R0. At full
// rank this is exactly R1 R0^{-1}.
AutocorrEstimate estimate_rho(const CovariancePair& cov, int truncation);

// Default truncation floor(ln T); the survey analysis overrides it to 8.
int default_truncation(int sample_length);

// One-step plug-in prediction rho * Y_{t-1}; t is a 1-based node index in [2, T].
Vector plugin_predict(const AutocorrEstimate& estimate, const ResidualPanel& res, int t);

}  // namespace riskcast
