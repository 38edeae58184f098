#include "riskcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "riskcast/rng.hpp"

namespace riskcast {

double spectral_radius(const Matrix& m) {
    const Eigen::EigenSolver<Matrix> solver(m);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void Scenario::validate() const {
    if (sample_length < 2) throw ValidationError("scenario: sample length must be at least 2");
    if (true_rho.rows() != true_rho.cols()) throw ValidationError("scenario: rho must be square");
    if (noise_sigma.size() != true_rho.rows())
        throw ValidationError("scenario: noise sigma size must match rho");
    if ((noise_sigma.array() <= 0.0).any())
        throw ValidationError("scenario: noise sigma must be positive");
    if (spectral_radius(true_rho) >= 1.0)
        throw ValidationError("scenario: spectral radius of rho must be below 1 (stationarity)");
    if (innovation_covariance) {
        if (innovation_covariance->rows() != true_rho.rows() ||
            innovation_covariance->cols() != true_rho.cols())
            throw ValidationError("scenario: innovation covariance dimension mismatch");
    }
}

Matrix solve_discrete_lyapunov(const Matrix& transition, const Matrix& innovation) {
    const int n = static_cast<int>(transition.rows());
    // vec(C) = (I - A (x) A)^{-1} vec(Q)
    Matrix kron(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            kron.block(i * n, j * n, n, n) = transition(i, j) * transition;
    const Matrix system = Matrix::Identity(n * n, n * n) - kron;
    const Eigen::Map<const Vector> q_vec(innovation.data(), n * n);
    const Vector c_vec = system.partialPivLu().solve(q_vec);
    Matrix covariance = Eigen::Map<const Matrix>(c_vec.data(), n, n);
    return 0.5 * (covariance + covariance.transpose());
}

ResidualPanel generate_residuals(const Scenario& scenario) {
    scenario.validate();
    const int regions = scenario.regions();
    const int t_len = scenario.sample_length;

    Matrix innovation_cov;
    if (scenario.innovation_covariance) {
        innovation_cov = *scenario.innovation_covariance;
    } else {
        innovation_cov = scenario.noise_sigma.array().square().matrix().asDiagonal();
    }

    const Matrix stationary = solve_discrete_lyapunov(scenario.true_rho, innovation_cov);
    Eigen::LLT<Matrix> stationary_chol(stationary +
                                       1e-14 * stationary.trace() * Matrix::Identity(regions, regions));
    if (stationary_chol.info() != Eigen::Success)
        throw NumericalError("generate_residuals: stationary covariance is not positive definite");
    Eigen::LLT<Matrix> innovation_chol(innovation_cov +
                                       1e-14 * innovation_cov.trace() * Matrix::Identity(regions, regions));
    if (innovation_chol.info() != Eigen::Success)
        throw NumericalError("generate_residuals: innovation covariance is not positive definite");

    Rng rng(scenario.seed);
    auto draw_standard = [&rng](int n) {
        Vector z(n);
        for (int i = 0; i < n; ++i) z[i] = rng.normal();
        return z;
    };

    ResidualPanel res;
    res.region_ids.resize(regions);
    for (int p = 0; p < regions; ++p) res.region_ids[p] = "R" + std::to_string(p + 1);
    res.node_times.resize(t_len);
    for (int t = 0; t < t_len; ++t) res.node_times[t] = static_cast<double>(t + 1);
    res.values.resize(t_len, regions);

    Vector state = stationary_chol.matrixL() * draw_standard(regions);
    res.values.row(0) = state.transpose();
    for (int t = 1; t < t_len; ++t) {
        state = scenario.true_rho * state + innovation_chol.matrixL() * draw_standard(regions);
        res.values.row(t) = state.transpose();
    }
    return res;
}

SyntheticPanel generate_panel(const Scenario& scenario) {
    scenario.validate();
    if (scenario.true_model.harmonics < 1)
        throw ValidationError("generate_panel: scenario needs a trigonometric model");
    if (static_cast<int>(scenario.true_model.cosine.cols()) != scenario.regions())
        throw ValidationError("generate_panel: model regions do not match rho");

    SyntheticPanel out;
    out.residual = generate_residuals(scenario);
    out.true_mean = predict(scenario.true_model, fit_times(scenario.sample_length));

    out.panel.node_times = out.residual.node_times;
    out.panel.region_ids = scenario.true_model.region_ids.empty() ? out.residual.region_ids
                                                                  : scenario.true_model.region_ids;
    out.panel.mode = DataMode::hard;
    out.panel.values = out.true_mean + out.residual.values;
    return out;
}

CountSimulation generate_counts(const LogRiskPanel& panel, const std::vector<double>& interval_edges,
                                std::uint64_t seed) {
    if (interval_edges.size() < 2)
        throw ValidationError("generate_counts: need at least one interval (two edges)");
    for (std::size_t i = 1; i < interval_edges.size(); ++i) {
        if (interval_edges[i] <= interval_edges[i - 1])
            throw ValidationError("generate_counts: interval edges must be strictly increasing");
    }
    if (!panel.values.allFinite()) throw ValidationError("generate_counts: panel must be finite");

    const int intervals = static_cast<int>(interval_edges.size()) - 1;
    const int regions = panel.regions();
    const int t_len = panel.nodes();

    CountSimulation sim;
    sim.poisson_means.setZero(intervals, regions);

    // Trapezoid integral of exp(log-risk) accumulated per interval, with the
    // node grid refined by the interval edges.
    for (int p = 0; p < regions; ++p) {
        auto intensity_at = [&](double time) {
            // linear interpolation of log-risk between nodes, then exp
            if (time <= panel.node_times.front()) return std::exp(panel.values(0, p));
            if (time >= panel.node_times.back()) return std::exp(panel.values(t_len - 1, p));
            const auto upper = std::upper_bound(panel.node_times.begin(), panel.node_times.end(), time);
            const int hi = static_cast<int>(upper - panel.node_times.begin());
            const int lo = hi - 1;
            const double weight =
                (time - panel.node_times[lo]) / (panel.node_times[hi] - panel.node_times[lo]);
            const double log_risk = (1.0 - weight) * panel.values(lo, p) + weight * panel.values(hi, p);
            return std::exp(log_risk);
        };
        for (int i = 0; i < intervals; ++i) {
            const double lo = interval_edges[i];
            const double hi = interval_edges[i + 1];
            // nodes strictly inside the interval plus both edges
            std::vector<double> grid{lo};
            for (const double node : panel.node_times)
                if (node > lo && node < hi) grid.push_back(node);
            grid.push_back(hi);
            double integral = 0.0;
            for (std::size_t g = 1; g < grid.size(); ++g)
                integral += 0.5 * (intensity_at(grid[g - 1]) + intensity_at(grid[g])) * (grid[g] - grid[g - 1]);
            if (integral > 1e12) throw NumericalError("generate_counts: Poisson mean overflow");
            sim.poisson_means(i, p) = integral;
        }
    }

    Rng rng(seed);
    sim.counts.region_ids = panel.region_ids;
    sim.counts.dates.resize(intervals);
    for (int i = 0; i < intervals; ++i) {
        // synthetic calendar anchored at 2020-03-08
        const long serial = parse_date("2020-03-08") + i;
        // serial -> civil date (inverse of days_from_civil)
        long z = serial + 719468;
        const long era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const long year = static_cast<long>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned day = doy - (153 * mp + 2) / 5 + 1;
        const unsigned month = mp + (mp < 10 ? 3 : -9);
        char buffer[48];
        std::snprintf(buffer, sizeof(buffer), "%04ld-%02u-%02u", year + (month <= 2), month, day);
        sim.counts.dates[i] = buffer;
    }
    sim.counts.counts.resize(intervals, regions);
    for (int i = 0; i < intervals; ++i)
        for (int p = 0; p < regions; ++p)
            sim.counts.counts(i, p) = static_cast<std::int64_t>(rng.poisson(sim.poisson_means(i, p)));
    return sim;
}

}  // namespace riskcast
