#pragma once

#include <cstdint>
#include <optional>

#include "riskcast/panel.hpp"
#include "riskcast/residual.hpp"
#include "riskcast/trig.hpp"

namespace riskcast {

// Ground-truth generator: trigonometric mean plus a stationary vector AR(1)
// residual, optionally pushed through the Poisson count channel.
struct Scenario {
    TrigModel true_model;
    Matrix true_rho;       // spectral radius < 1
    Vector noise_sigma;    // per-region innovation standard deviations
    int sample_length = 0;  // T
    std::uint64_t seed = 0;
    std::optional<Matrix> innovation_covariance;  // overrides diag(sigma^2)

    int regions() const { return static_cast<int>(true_rho.rows()); }
    void validate() const;
};

double spectral_radius(const Matrix& m);

// Solves C = A C A^T + Q for the stationary covariance.
Matrix solve_discrete_lyapunov(const Matrix& transition, const Matrix& innovation);

// epsilon_0 from the stationary law, then the AR recursion.
ResidualPanel generate_residuals(const Scenario& scenario);

struct SyntheticPanel {
    LogRiskPanel panel;
    Matrix true_mean;       // trig component
    ResidualPanel residual;  // injected noise
};

SyntheticPanel generate_panel(const Scenario& scenario);

// Poisson counts per (day interval, region): mean = trapezoid integral of
// exp(log-risk) over the interval in node-time units.
struct CountSimulation {
    CountPanel counts;
    Matrix poisson_means;  // intervals x P, for replay checks
};

CountSimulation generate_counts(const LogRiskPanel& panel, const std::vector<double>& interval_edges,
                                std::uint64_t seed);

}  // namespace riskcast
