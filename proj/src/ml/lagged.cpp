#include "riskcast/ml/lagged.hpp"

#include <algorithm>

namespace riskcast {

LaggedDataset build_lagged(const LogRiskPanel& panel, int region, int lags) {
    if (region < 0 || region >= panel.regions()) throw ValidationError("build_lagged: bad region index");
    if (lags < 1) throw ValidationError("build_lagged: need at least one lag");
    const int t_len = panel.nodes();
    if (t_len <= lags) throw ValidationError("build_lagged: series no longer than the lag window");

    LaggedDataset data;
    data.lags = lags;
    const int samples = t_len - lags;
    data.inputs.resize(samples, lags);
    data.targets.resize(samples);
    data.target_nodes.resize(samples);
    for (int m = 0; m < samples; ++m) {
        const int t = lags - 1 + m;  // newest node inside the window
        for (int j = 0; j < lags; ++j) data.inputs(m, j) = panel.values(t - j, region);
        data.targets[m] = panel.values(t + 1, region);
        data.target_nodes[m] = t + 1;
    }
    return data;
}

LaggedDataset filter_by_targets(const LaggedDataset& data, const std::vector<int>& keep_nodes) {
    std::vector<int> rows;
    for (int m = 0; m < data.size(); ++m) {
        if (std::find(keep_nodes.begin(), keep_nodes.end(), data.target_nodes[m]) != keep_nodes.end())
            rows.push_back(m);
    }
    LaggedDataset out;
    out.lags = data.lags;
    out.inputs.resize(static_cast<int>(rows.size()), data.inputs.cols());
    out.targets.resize(static_cast<int>(rows.size()));
    out.target_nodes.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.inputs.row(static_cast<int>(i)) = data.inputs.row(rows[i]);
        out.targets[static_cast<int>(i)] = data.targets[rows[i]];
        out.target_nodes[i] = data.target_nodes[rows[i]];
    }
    return out;
}

}  // namespace riskcast
