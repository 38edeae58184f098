#include "riskcast/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "riskcast/spline.hpp"

namespace riskcast {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream stream(line);
    while (std::getline(stream, field, ',')) {
        // trim surrounding whitespace
        const auto begin = field.find_first_not_of(" \t\r");
        const auto end = field.find_last_not_of(" \t\r");
        fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

long parse_date(const std::string& iso) {
    int year = 0, month = 0, day = 0;
    char dash1 = 0, dash2 = 0;
    std::istringstream stream(iso);
    stream >> year >> dash1 >> month >> dash2 >> day;
    if (stream.fail() || dash1 != '-' || dash2 != '-' || month < 1 || month > 12 || day < 1 || day > 31)
        throw ValidationError("invalid ISO-8601 date: '" + iso + "'");
    // days_from_civil (Howard Hinnant's algorithm)
    const int adjusted_year = year - (month <= 2);
    const long era = (adjusted_year >= 0 ? adjusted_year : adjusted_year - 399) / 400;
    const unsigned year_of_era = static_cast<unsigned>(adjusted_year - era * 400);
    const unsigned day_of_year = (153u * (month + (month > 2 ? -3 : 9)) + 2u) / 5u + day - 1;
    const unsigned day_of_era = year_of_era * 365 + year_of_era / 4 - year_of_era / 100 + day_of_year;
    return era * 146097 + static_cast<long>(day_of_era) - 719468;
}

CountPanel parse_counts_text(const std::string& text, const CsvSchema& schema) {
    std::istringstream stream(text);
    std::string line;
    if (!std::getline(stream, line)) throw ValidationError("no records: input is empty");
    const auto header = split_csv_line(line);

    auto column_of = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw ValidationError("missing column '" + name + "' in header");
        return static_cast<int>(it - header.begin());
    };
    const int date_col = column_of(schema.date_column);
    const int region_col = column_of(schema.region_column);
    const int count_col = column_of(schema.count_column);

    std::map<long, std::string> date_by_serial;
    std::vector<std::string> region_order;
    std::set<std::string> region_seen;
    std::map<std::pair<long, std::string>, std::int64_t> cells;

    int line_no = 1;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_csv_line(line);
        const int needed = std::max({date_col, region_col, count_col});
        if (static_cast<int>(fields.size()) <= needed)
            throw ValidationError("malformed row at line " + std::to_string(line_no) +
                                  ": expected at least " + std::to_string(needed + 1) + " fields");
        long serial;
        try {
            serial = parse_date(fields[date_col]);
        } catch (const ValidationError&) {
            throw ValidationError("malformed row at line " + std::to_string(line_no) + ": bad date '" +
                                  fields[date_col] + "'");
        }
        const std::string& region = fields[region_col];
        if (region.empty())
            throw ValidationError("malformed row at line " + std::to_string(line_no) + ": empty region");
        std::int64_t count = 0;
        try {
            std::size_t used = 0;
            count = std::stoll(fields[count_col], &used);
            if (used != fields[count_col].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ValidationError("malformed row at line " + std::to_string(line_no) + ": bad count '" +
                                  fields[count_col] + "'");
        }
        if (count < 0)
            throw ValidationError("malformed row at line " + std::to_string(line_no) +
                                  ": negative count");

        const auto key = std::make_pair(serial, region);
        if (cells.count(key))
            throw ValidationError("duplicate (date, region) record at line " + std::to_string(line_no) +
                                  ": (" + fields[date_col] + ", " + region + ")");
        cells[key] = count;
        date_by_serial.emplace(serial, fields[date_col]);
        if (region_seen.insert(region).second) region_order.push_back(region);
    }

    if (cells.empty()) throw ValidationError("no records");

    CountPanel panel;
    panel.region_ids = region_order;
    panel.dates.reserve(date_by_serial.size());
    std::vector<long> serials;
    for (const auto& [serial, date] : date_by_serial) {
        serials.push_back(serial);
        panel.dates.push_back(date);
    }
    panel.counts.setZero(static_cast<int>(serials.size()), static_cast<int>(region_order.size()));
    for (int d = 0; d < panel.days(); ++d) {
        for (int p = 0; p < panel.regions(); ++p) {
            const auto it = cells.find({serials[d], panel.region_ids[p]});
            if (it != cells.end()) panel.counts(d, p) = it->second;
        }
    }
    return panel;
}

CountPanel parse_counts(const std::string& path, const CsvSchema& schema) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open input file: " + path);
    std::stringstream buffer;
    buffer << file.rdbuf();
    return parse_counts_text(buffer.str(), schema);
}

Matrix cumulative_curve(const CountPanel& panel) {
    Matrix cumulative(panel.days(), panel.regions());
    for (int p = 0; p < panel.regions(); ++p) {
        std::int64_t running = 0;
        for (int d = 0; d < panel.days(); ++d) {
            running += panel.counts(d, p);
            cumulative(d, p) = static_cast<double>(running);
        }
    }
    return cumulative;
}

SmoothedCurves smooth_and_sample(const CountPanel& panel, const Matrix& cumulative, int node_count) {
    const int days = static_cast<int>(cumulative.rows());
    const int regions = static_cast<int>(cumulative.cols());
    if (days < 4) throw ValidationError("insufficient data: need at least 4 days for cubic smoothing");
    if (node_count < days) throw ValidationError("node count must be at least the number of days");
    if (static_cast<int>(panel.dates.size()) != days)
        throw ValidationError("cumulative rows do not match panel dates");

    Eigen::VectorXd day_axis(days);
    const long origin = parse_date(panel.dates.front());
    for (int d = 0; d < days; ++d) day_axis[d] = static_cast<double>(parse_date(panel.dates[d]) - origin);

    SmoothedCurves out;
    out.region_ids = panel.region_ids;
    out.node_times.resize(node_count);
    const double span = day_axis[days - 1] - day_axis[0];
    for (int t = 0; t < node_count; ++t)
        out.node_times[t] = day_axis[0] + span * static_cast<double>(t) / (node_count - 1);

    out.values.resize(node_count, regions);
    out.derivatives.resize(node_count, regions);
    for (int p = 0; p < regions; ++p) {
        const SmoothingSpline spline(day_axis, cumulative.col(p));
        for (int t = 0; t < node_count; ++t) {
            out.values(t, p) = spline.value(out.node_times[t]);
            out.derivatives(t, p) = std::max(spline.derivative(out.node_times[t]), 0.0);
        }
    }
    return out;
}

LogRiskPanel log_transform(const SmoothedCurves& curves, double floor) {
    if (floor <= 0.0) throw ValidationError("log floor must be positive");
    LogRiskPanel panel;
    panel.node_times = curves.node_times;
    panel.region_ids = curves.region_ids;
    panel.mode = DataMode::hard;
    panel.values = curves.derivatives.unaryExpr(
        [floor](double intensity) { return std::log(std::max(intensity, floor)); });
    return panel;
}

LogRiskPanel apply_weighting(const LogRiskPanel& panel, const SpatialWeighting& weighting) {
    weighting.validate();
    if (weighting.matrix.rows() != panel.regions())
        throw ValidationError("weighting dimension does not match panel regions");
    LogRiskPanel out;
    out.node_times = panel.node_times;
    out.region_ids = panel.region_ids;
    out.mode = DataMode::soft;
    if (weighting.kind == SpatialWeighting::Kind::identity) {
        out.values = panel.values;  // bit-exact identity path
    } else {
        out.values = panel.values * weighting.matrix.transpose();
    }
    return out;
}

SpatialWeighting SpatialWeighting::identity(int regions) {
    if (regions < 1) throw ValidationError("weighting needs at least one region");
    SpatialWeighting w;
    w.kind = Kind::identity;
    w.matrix = Matrix::Identity(regions, regions);
    return w;
}

SpatialWeighting SpatialWeighting::gaussian(const Matrix& centroids, double bandwidth) {
    if (bandwidth <= 0.0) throw ValidationError("gaussian weighting requires bandwidth > 0");
    const int regions = static_cast<int>(centroids.rows());
    if (regions < 1) throw ValidationError("weighting needs at least one region");
    SpatialWeighting w;
    w.kind = Kind::gaussian_kernel;
    w.matrix.resize(regions, regions);
    for (int p = 0; p < regions; ++p) {
        double row_sum = 0.0;
        for (int q = 0; q < regions; ++q) {
            const double distance2 = (centroids.row(p) - centroids.row(q)).squaredNorm();
            const double weight = std::exp(-0.5 * distance2 / (bandwidth * bandwidth));
            w.matrix(p, q) = weight;
            row_sum += weight;
        }
        w.matrix.row(p) /= row_sum;
    }
    return w;
}

SpatialWeighting SpatialWeighting::custom(const Matrix& matrix) {
    SpatialWeighting w;
    w.kind = Kind::custom;
    w.matrix = matrix;
    w.validate();
    return w;
}

void SpatialWeighting::validate() const {
    if (matrix.rows() != matrix.cols() || matrix.rows() < 1)
        throw ValidationError("weighting matrix must be square and non-empty");
    for (int p = 0; p < matrix.rows(); ++p) {
        double row_sum = 0.0;
        for (int q = 0; q < matrix.cols(); ++q) {
            if (matrix(p, q) < 0.0) throw ValidationError("weighting entries must be non-negative");
            row_sum += matrix(p, q);
        }
        if (std::abs(row_sum - 1.0) > 1e-12)
            throw ValidationError("weighting rows must sum to 1 (row " + std::to_string(p) + " sums to " +
                                  std::to_string(row_sum) + ")");
    }
    if (kind == Kind::identity && !matrix.isIdentity(0.0))
        throw ValidationError("identity weighting must be the exact identity matrix");
}

}  // namespace riskcast
