#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "riskcast/errors.hpp"

namespace riskcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class DataMode { hard, soft };

// Raw daily counts, one column per region, rows sorted by date.
struct CountPanel {
    std::vector<std::string> region_ids;
    std::vector<std::string> dates;  // ISO-8601, strictly increasing
    Eigen::MatrixX<std::int64_t> counts;

    int days() const { return static_cast<int>(counts.rows()); }
    int regions() const { return static_cast<int>(counts.cols()); }
};

// Log-intensity values at the temporal nodes; the central sample object.
struct LogRiskPanel {
    std::vector<double> node_times;
    std::vector<std::string> region_ids;
    Matrix values;  // T x P
    DataMode mode = DataMode::hard;

    int nodes() const { return static_cast<int>(values.rows()); }
    int regions() const { return static_cast<int>(values.cols()); }
};

// Row-stochastic spatial mixing matrix standing in for the compactly
// supported window family: identity keeps hard data, a kernel row blends
// neighbouring regions into soft data.
struct SpatialWeighting {
    enum class Kind { identity, gaussian_kernel, custom };

    Kind kind = Kind::identity;
    Matrix matrix;

    static SpatialWeighting identity(int regions);
    // centroids: P x d coordinates; rows are normalized Gaussian kernel weights.
    static SpatialWeighting gaussian(const Matrix& centroids, double bandwidth);
    static SpatialWeighting custom(const Matrix& matrix);

    void validate() const;
};

struct CsvSchema {
    std::string date_column = "date";
    std::string region_column = "region";
    std::string count_column = "count";
};

// Smoothed cumulative curves sampled at the temporal nodes.
struct SmoothedCurves {
    std::vector<double> node_times;
    std::vector<std::string> region_ids;
    Matrix values;       // smoothed cumulative counts, T x P
    Matrix derivatives;  // intensities, clamped at 0, T x P
};

CountPanel parse_counts(const std::string& path, const CsvSchema& schema = {});
CountPanel parse_counts_text(const std::string& text, const CsvSchema& schema = {});

// Prefix sums over days; non-decreasing per region.
Matrix cumulative_curve(const CountPanel& panel);

// Penalized cubic B-spline fit of each cumulative column, evaluated with its
// first derivative at `node_count` equispaced nodes over [first day, last day].
SmoothedCurves smooth_and_sample(const CountPanel& panel, const Matrix& cumulative, int node_count);

LogRiskPanel log_transform(const SmoothedCurves& curves, double floor = 1e-6);

// Soft panel: values_soft = values_hard * W^T (each output region is a
// weighted combination of hard regions). Identity weighting is bit-exact.
LogRiskPanel apply_weighting(const LogRiskPanel& panel, const SpatialWeighting& weighting);

// ISO-8601 calendar date -> serial day number (days since 1970-01-01).
long parse_date(const std::string& iso);

}  // namespace riskcast
