#pragma once

#include "riskcast/ml/lagged.hpp"

namespace riskcast {

// Nadaraya-Watson kernel regression with the Gaussian kernel
// K(u) = exp(-u^2/2)/sqrt(2*pi); falls back to the nearest neighbour when
// every weight underflows.
double grnn_predict(const LaggedDataset& train, const Vector& query, double bandwidth);

// Lag-window variant over the full regional vector: the next panel row is a
// kernel-weighted blend of the rows following past states that resemble the
// current one. `history` rows are time-ordered, newest last.
Vector grnn_predict_soft(const Matrix& history, int lags, double bandwidth);

}  // namespace riskcast
