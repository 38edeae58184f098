#pragma once

#include <string>
#include <vector>

#include "riskcast/panel.hpp"

namespace riskcast {

// Per-region Fourier coefficients over a shared frequency grid. Fitting runs
// against the node index axis t = 1..T, matching the harmonic convention
// frequencies[k] = 2*pi*(k+1)/T.
struct TrigModel {
    int harmonics = 0;                 // N
    std::vector<double> frequencies;   // strictly increasing, size N
    std::vector<std::string> region_ids;
    Matrix cosine;  // A, N x P
    Matrix sine;    // B, N x P (row 0 forced to zero when pin_b1)
    int fit_length = 0;  // T used in fitting
    bool pin_b1 = false;
};

struct SelectionCandidate {
    int harmonics;
    double ratio;
    double mean_risk;
};

struct SelectionReport {
    std::vector<SelectionCandidate> candidates;
    int chosen_harmonics = 0;
    double threshold = 0.0;
};

struct TrigFitOptions {
    bool pin_b1 = false;           // drop the sin(phi_1 t) column
    double condition_limit = 1e10;  // rank error above this
};

// Default harmonic grid phi_k = 2*pi*k/T, k = 1..N.
std::vector<double> harmonic_frequencies(int harmonics, int sample_length);

// Node index axis 1..T used as regression times.
std::vector<double> fit_times(int sample_length);

// Columns alternate cos(phi_k t), sin(phi_k t); the sin column of the first
// harmonic is omitted when pin_b1 is set.
Matrix design_matrix(const std::vector<double>& frequencies, const std::vector<double>& times,
                     bool pin_b1 = false);

TrigModel fit_trig(const LogRiskPanel& panel, int harmonics, const std::vector<double>& frequencies,
                   const TrigFitOptions& options = {});
TrigModel fit_trig(const LogRiskPanel& panel, int harmonics, const TrigFitOptions& options = {});

// g_t evaluated at the requested times for every region.
Matrix predict(const TrigModel& model, const std::vector<double>& times);

// Minimized empirical quadratic risk per region: (1/T) sum (value - fit)^2.
Vector empirical_risk(const TrigModel& model, const LogRiskPanel& panel);

// Expected-loss inflation factor (1 - m/T)^-1 (1 + sum_i 1/lambda_i / T)
// where m counts the estimated coefficients and lambda_i are the eigenvalues
// of Phi^T Phi. Equals 1 exactly for an empty design.
double selection_ratio(int sample_length, const Matrix& design);

SelectionReport select_harmonics(const LogRiskPanel& panel, const std::vector<int>& candidates,
                                 double threshold, const TrigFitOptions& options = {});

}  // namespace riskcast
