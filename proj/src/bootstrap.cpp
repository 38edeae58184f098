#include "riskcast/bootstrap.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

#include "riskcast/parallel.hpp"
#include "riskcast/rng.hpp"

namespace riskcast {

namespace {

double normal_quantile(double probability) {
    static const boost::math::normal_distribution<double> standard_normal;
    return boost::math::quantile(standard_normal, probability);
}

double normal_cdf(double x) {
    static const boost::math::normal_distribution<double> standard_normal;
    return boost::math::cdf(standard_normal, x);
}

double student_quantile(double probability, double dof) {
    const boost::math::students_t_distribution<double> dist(dof);
    return boost::math::quantile(dist, probability);
}

double sample_sd(const Vector& values) {
    const double mean = values.mean();
    return std::sqrt((values.array() - mean).square().sum() / (values.size() - 1));
}

bool degenerate(const Vector& replicates) {
    return (replicates.array() == replicates[0]).all();
}

}  // namespace

std::string ci_method_name(CiMethod method) {
    switch (method) {
        case CiMethod::bca: return "I1";
        case CiMethod::normal: return "I2";
        case CiMethod::basic_percentile: return "I3";
        case CiMethod::bias_corrected: return "I4";
        case CiMethod::student: return "I5";
    }
    throw ValidationError("unknown CI method");
}

const std::vector<CiMethod>& all_ci_methods() {
    static const std::vector<CiMethod> methods{CiMethod::bca, CiMethod::normal,
                                               CiMethod::basic_percentile, CiMethod::bias_corrected,
                                               CiMethod::student};
    return methods;
}

double quantile_type7(const Vector& sample, double probability) {
    if (sample.size() == 0) throw ValidationError("quantile of an empty sample");
    if (probability < 0.0 || probability > 1.0)
        throw ValidationError("quantile probability outside [0, 1]");
    std::vector<double> sorted(sample.data(), sample.data() + sample.size());
    std::sort(sorted.begin(), sorted.end());
    const double position = probability * (sorted.size() - 1);
    const std::size_t below = static_cast<std::size_t>(std::floor(position));
    if (below + 1 >= sorted.size()) return sorted.back();
    const double fraction = position - below;
    return sorted[below] * (1.0 - fraction) + sorted[below + 1] * fraction;
}

BootstrapResult resample(const Matrix& data, const RowStatistic& statistic,
                         const BootstrapOptions& options) {
    const int rows = static_cast<int>(data.rows());
    if (rows < 1) throw ValidationError("resample: empty sample");
    if (options.replicates < 2) throw ValidationError("resample: need at least 2 replicates");

    BootstrapResult result;
    result.seed = options.seed;
    result.point_estimate = statistic(data);
    result.replicates.resize(options.replicates);

    const Rng master(options.seed);
    parallel_for(static_cast<std::size_t>(options.replicates), options.jobs, [&](std::size_t i) {
        Rng rng = master.derive(i);
        Matrix resampled(rows, data.cols());
        for (int r = 0; r < rows; ++r)
            resampled.row(r) = data.row(static_cast<int>(rng.uniform_index(rows)));
        const double value = statistic(resampled);
        if (!std::isfinite(value))
            throw NumericalError("resample: statistic failed on replicate " + std::to_string(i));
        result.replicates[static_cast<int>(i)] = value;
    });

    if (options.with_jackknife && rows > 1) {
        result.jackknife.resize(rows);
        Matrix reduced(rows - 1, data.cols());
        for (int leave = 0; leave < rows; ++leave) {
            int write = 0;
            for (int r = 0; r < rows; ++r)
                if (r != leave) reduced.row(write++) = data.row(r);
            result.jackknife[leave] = statistic(reduced);
        }
    }
    return result;
}

Interval ci(const BootstrapResult& result, CiMethod method, double level) {
    if (level <= 0.0 || level >= 1.0) throw ValidationError("ci: level must lie in (0, 1)");
    const int b_count = static_cast<int>(result.replicates.size());
    const double alpha = 1.0 - level;
    if (static_cast<double>(b_count) * alpha / 2.0 < 1.0)
        throw ValidationError("ci: too few replicates for the requested level");

    if (degenerate(result.replicates))
        return {result.point_estimate, result.point_estimate};

    const double sd = sample_sd(result.replicates);
    switch (method) {
        case CiMethod::basic_percentile:
            return {quantile_type7(result.replicates, alpha / 2.0),
                    quantile_type7(result.replicates, 1.0 - alpha / 2.0)};
        case CiMethod::normal: {
            const double bias = result.replicates.mean() - result.point_estimate;
            const double z = normal_quantile(1.0 - alpha / 2.0);
            const double center = result.point_estimate - bias;
            return {center - z * sd, center + z * sd};
        }
        case CiMethod::student: {
            const double t = student_quantile(1.0 - alpha / 2.0, b_count - 1);
            return {result.point_estimate - t * sd, result.point_estimate + t * sd};
        }
        case CiMethod::bias_corrected:
        case CiMethod::bca: {
            const double below =
                (result.replicates.array() < result.point_estimate).cast<double>().sum();
            double fraction = below / b_count;
            fraction = std::clamp(fraction, 0.5 / b_count, 1.0 - 0.5 / b_count);
            const double z0 = normal_quantile(fraction);

            double acceleration = 0.0;
            if (method == CiMethod::bca) {
                if (result.jackknife.size() < 2)
                    throw ValidationError("ci: BCa needs jackknife statistics; rerun with jackknife");
                const double jack_mean = result.jackknife.mean();
                const Eigen::ArrayXd deltas = jack_mean - result.jackknife.array();
                const double sum_sq = deltas.square().sum();
                if (sum_sq > 0.0)
                    acceleration = deltas.cube().sum() / (6.0 * std::pow(sum_sq, 1.5));
            }

            auto adjusted = [&](double z_alpha) {
                const double numerator = z0 + z_alpha;
                return normal_cdf(z0 + numerator / (1.0 - acceleration * numerator));
            };
            const double z_lo = normal_quantile(alpha / 2.0);
            const double z_hi = normal_quantile(1.0 - alpha / 2.0);
            return {quantile_type7(result.replicates, adjusted(z_lo)),
                    quantile_type7(result.replicates, adjusted(z_hi))};
        }
    }
    throw ValidationError("unknown CI method");
}

CiSet all_intervals(const BootstrapResult& result, double level) {
    CiSet set;
    for (const CiMethod method : all_ci_methods()) set[method] = ci(result, method, level);
    return set;
}

DensityEstimate density(const BootstrapResult& result, int grid_size) {
    if (grid_size < 2) throw ValidationError("density: grid size must be at least 2");
    if (degenerate(result.replicates))
        throw ValidationError("density: degenerate replicates; use the point interval instead");

    const Vector& replicates = result.replicates;
    const int b_count = static_cast<int>(replicates.size());
    const double sd = sample_sd(replicates);
    const double iqr = quantile_type7(replicates, 0.75) - quantile_type7(replicates, 0.25);
    double spread = std::min(sd, iqr / 1.349);
    if (spread <= 0.0) spread = sd;
    const double bandwidth = 0.9 * spread * std::pow(static_cast<double>(b_count), -0.2);

    DensityEstimate estimate;
    estimate.bandwidth = bandwidth;
    const double lo = replicates.minCoeff() - 3.0 * bandwidth;
    const double hi = replicates.maxCoeff() + 3.0 * bandwidth;
    estimate.grid.resize(grid_size);
    estimate.values.resize(grid_size);
    const double inv = 1.0 / (bandwidth * std::sqrt(2.0 * M_PI) * b_count);
    for (int g = 0; g < grid_size; ++g) {
        const double x = lo + (hi - lo) * static_cast<double>(g) / (grid_size - 1);
        estimate.grid[g] = x;
        const Eigen::ArrayXd standardized = (replicates.array() - x) / bandwidth;
        estimate.values[g] = inv * (-0.5 * standardized.square()).exp().sum();
    }
    return estimate;
}

}  // namespace riskcast
