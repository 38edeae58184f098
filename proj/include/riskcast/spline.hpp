#pragma once

#include <Eigen/Dense>
#include <vector>

#include "riskcast/errors.hpp"

namespace riskcast {

// Penalized cubic B-spline smoother. Knots sit at the data sites; the
// roughness penalty is the squared fourth-order divided difference of the
// coefficients over the Greville abscissae, whose null space is exactly the
// cubic polynomials. The smoothing parameter is chosen by generalized
// cross-validation over a log-spaced grid.
class SmoothingSpline {
public:
    // x strictly increasing, size >= 4. lambda < 0 requests GCV selection.
    SmoothingSpline(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double lambda = -1.0);

    double value(double x) const;
    double derivative(double x) const;

    double lambda() const { return lambda_; }
    double gcv_score() const { return gcv_; }

private:
    void build_basis(const Eigen::VectorXd& x);
    void fit(const Eigen::VectorXd& y, double lambda);

    Eigen::VectorXd knots_;         // clamped knot vector, degree 3
    Eigen::VectorXd coefficients_;  // n_basis
    Eigen::MatrixXd design_;        // n_data x n_basis
    Eigen::MatrixXd penalty_;       // n_basis x n_basis, D^T D
    double lambda_ = 0.0;
    double gcv_ = 0.0;
    int n_basis_ = 0;
};

// Cox-de Boor evaluation of all order-k B-splines that are non-zero at x.
// Returns the index of the first non-zero basis function.
int bspline_basis(double x, int order, const Eigen::VectorXd& knots, Eigen::VectorXd& values,
                  int derivative_order = 0);

}  // namespace riskcast
