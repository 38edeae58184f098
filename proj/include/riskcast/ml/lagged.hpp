#pragma once

#include "riskcast/panel.hpp"

namespace riskcast {

// One-step-ahead supervised view of a single region's series: inputs are the
// j0 most recent values (newest first), targets the next value.
struct LaggedDataset {
    Matrix inputs;   // M x j0
    Vector targets;  // M
    int lags = 0;
    std::vector<int> target_nodes;  // original node index of each target

    int size() const { return static_cast<int>(targets.size()); }
};

LaggedDataset build_lagged(const LogRiskPanel& panel, int region, int lags);

// Subset by target node membership; keeps the lag structure intact.
LaggedDataset filter_by_targets(const LaggedDataset& data, const std::vector<int>& keep_nodes);

}  // namespace riskcast
