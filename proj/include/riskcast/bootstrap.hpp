#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "riskcast/panel.hpp"

namespace riskcast {

// Statistic evaluated on a resampled index multiset of the original rows.
using RowStatistic = std::function<double(const Matrix& rows)>;

struct BootstrapResult {
    Vector replicates;
    double point_estimate = 0.0;
    std::uint64_t seed = 0;
    Vector jackknife;  // leave-one-out statistics, used by the BCa interval
};

enum class CiMethod { bca, normal, basic_percentile, bias_corrected, student };

std::string ci_method_name(CiMethod method);

// I1..I5 in the order the interval tables list them.
const std::vector<CiMethod>& all_ci_methods();

struct Interval {
    double lower;
    double upper;
};

using CiSet = std::map<CiMethod, Interval>;

struct BootstrapOptions {
    int replicates = 1000;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool with_jackknife = true;  // disable to skip the leave-one-out pass
};

// I.i.d. with-replacement resampling of the rows of `data` (a vector is a
// one-column matrix); replicate i = statistic(resampled rows). Rows are the
// exchangeable unit, so panel statistics keep all regions at a node together.
BootstrapResult resample(const Matrix& data, const RowStatistic& statistic,
                         const BootstrapOptions& options);

Interval ci(const BootstrapResult& result, CiMethod method, double level = 0.95);
CiSet all_intervals(const BootstrapResult& result, double level = 0.95);

// Type-7 quantile (linear interpolation) of an unsorted sample.
double quantile_type7(const Vector& sample, double probability);

struct DensityEstimate {
    Vector grid;
    Vector values;
    double bandwidth = 0.0;
};

// Gaussian KDE with Silverman bandwidth on [min, max] padded by 3 bandwidths.
DensityEstimate density(const BootstrapResult& result, int grid_size = 512);

}  // namespace riskcast
