#include "riskcast/spline.hpp"

#include <algorithm>
#include <cmath>

namespace riskcast {

int bspline_basis(double x, int order, const Eigen::VectorXd& knots, Eigen::VectorXd& values,
                  int derivative_order) {
    const int n_knots = static_cast<int>(knots.size());
    const double lo = knots[order - 1];
    const double hi = knots[n_knots - order];
    if (x < lo) x = lo;
    if (x > hi) x = hi;

    // Knot span containing x (rightmost span at the upper boundary).
    int span;
    if (x >= hi) {
        span = n_knots - order - 1;
        while (span > 0 && knots[span] == knots[span + 1]) --span;
    } else {
        span = static_cast<int>(std::upper_bound(knots.data() + order - 1, knots.data() + n_knots - order, x) -
                                knots.data()) -
               1;
    }

    const int degree = order - 1;
    std::vector<double> left(order), right(order);
    std::vector<std::vector<double>> ndu(order, std::vector<double>(order));
    ndu[0][0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    values.resize(order);
    if (derivative_order == 0) {
        for (int j = 0; j <= degree; ++j) values[j] = ndu[j][degree];
        return span - degree;
    }

    // Derivatives via the standard a-coefficient recursion.
    std::vector<std::vector<double>> ders(derivative_order + 1, std::vector<double>(order, 0.0));
    for (int j = 0; j <= degree; ++j) ders[0][j] = ndu[j][degree];
    for (int r = 0; r <= degree; ++r) {
        int s1 = 0, s2 = 1;
        std::vector<std::vector<double>> a(2, std::vector<double>(order, 0.0));
        a[0][0] = 1.0;
        for (int k = 1; k <= derivative_order; ++k) {
            double d = 0.0;
            const int rk = r - k;
            const int pk = degree - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = r - 1 <= pk ? k - 1 : degree - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
                d += a[s2][k] * ndu[r][pk];
            }
            ders[k][r] = d;
            std::swap(s1, s2);
        }
    }
    double factor = degree;
    for (int k = 1; k <= derivative_order; ++k) {
        for (int j = 0; j <= degree; ++j) ders[k][j] *= factor;
        factor *= degree - k;
    }
    for (int j = 0; j <= degree; ++j) values[j] = ders[derivative_order][j];
    return span - degree;
}

namespace {

Eigen::MatrixXd evaluate_design(const Eigen::VectorXd& sites, const Eigen::VectorXd& knots, int n_basis) {
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(sites.size(), n_basis);
    Eigen::VectorXd local;
    for (int i = 0; i < sites.size(); ++i) {
        const int first = bspline_basis(sites[i], 4, knots, local);
        for (int j = 0; j < 4; ++j) {
            const int column = first + j;
            if (column >= 0 && column < n_basis) design(i, column) = local[j];
        }
    }
    return design;
}

}  // namespace

SmoothingSpline::SmoothingSpline(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double lambda) {
    if (x.size() != y.size()) throw ValidationError("SmoothingSpline: x and y sizes differ");
    if (x.size() < 4) throw ValidationError("SmoothingSpline: need at least 4 points for a cubic fit");
    for (int i = 1; i < x.size(); ++i) {
        if (x[i] <= x[i - 1]) throw ValidationError("SmoothingSpline: x must be strictly increasing");
    }
    build_basis(x);

    if (lambda >= 0.0) {
        fit(y, lambda);
        return;
    }

    // GCV over a log grid; lambda spans a plain cubic fit down to near
    // interpolation. Scanning from the smooth end and demanding a relative
    // improvement keeps exact polynomial data on the well-conditioned side.
    double best_lambda = 1e8;
    double best_score = std::numeric_limits<double>::infinity();
    for (double exponent = 8.0; exponent >= -10.0; exponent -= 0.5) {
        const double candidate = std::pow(10.0, exponent);
        fit(y, candidate);
        if (gcv_ < best_score * (1.0 - 1e-6)) {
            best_score = gcv_;
            best_lambda = candidate;
        }
    }
    fit(y, best_lambda);
}

void SmoothingSpline::build_basis(const Eigen::VectorXd& x) {
    constexpr int order = 4;  // cubic
    const int n = static_cast<int>(x.size());
    knots_.resize(n + 2 * (order - 1));
    for (int i = 0; i < order; ++i) knots_[i] = x[0];
    for (int i = 1; i + 1 < n; ++i) knots_[order - 1 + i] = x[i];
    for (int i = 0; i < order; ++i) knots_[n + 2 * (order - 1) - order + i] = x[n - 1];
    n_basis_ = static_cast<int>(knots_.size()) - order;

    design_ = evaluate_design(x, knots_, n_basis_);

    // Roughness penalty: squared distance of the coefficient vector from the
    // subspace representing global cubic polynomials. Cubics are fitted
    // penalty-free for any knot spacing, so exact polynomial data survive
    // smoothing unchanged; lambda -> infinity degrades to a cubic regression.
    const int dense = std::max(4 * n_basis_, 64);
    Eigen::VectorXd grid(dense);
    for (int i = 0; i < dense; ++i)
        grid[i] = x[0] + (x[n - 1] - x[0]) * static_cast<double>(i) / (dense - 1);
    const Eigen::MatrixXd dense_design = evaluate_design(grid, knots_, n_basis_);
    Eigen::MatrixXd monomials(dense, 4);
    const double mid = 0.5 * (x[0] + x[n - 1]);
    const double half_span = std::max(0.5 * (x[n - 1] - x[0]), 1e-12);
    for (int i = 0; i < dense; ++i) {
        const double u = (grid[i] - mid) / half_span;  // conditioning
        monomials(i, 0) = 1.0;
        monomials(i, 1) = u;
        monomials(i, 2) = u * u;
        monomials(i, 3) = u * u * u;
    }
    // Coefficient vectors representing 1, u, u^2, u^3 exactly.
    const Eigen::MatrixXd cubic_coeffs =
        dense_design.colPivHouseholderQr().solve(monomials);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(cubic_coeffs);
    const Eigen::MatrixXd q_full = qr.householderQ();
    const Eigen::MatrixXd q = q_full.leftCols(4);
    penalty_ = Eigen::MatrixXd::Identity(n_basis_, n_basis_) - q * q.transpose();
}

void SmoothingSpline::fit(const Eigen::VectorXd& y, double lambda) {
    const int n = static_cast<int>(design_.rows());
    const Eigen::MatrixXd gram = design_.transpose() * design_ + lambda * penalty_;
    Eigen::LDLT<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success)
        throw NumericalError("SmoothingSpline: singular penalized system");
    coefficients_ = solver.solve(design_.transpose() * y);
    lambda_ = lambda;

    const Eigen::VectorXd fitted = design_ * coefficients_;
    const double rss = (y - fitted).squaredNorm();
    // trace(S) = trace((X'X + lambda P)^-1 X'X)
    const Eigen::MatrixXd smoother_core = solver.solve(design_.transpose() * design_);
    const double edf = smoother_core.trace();
    const double denom = 1.0 - edf / n;
    gcv_ = denom <= 1e-10 ? std::numeric_limits<double>::infinity() : (rss / n) / (denom * denom);
}

double SmoothingSpline::value(double x) const {
    Eigen::VectorXd local;
    const int first = bspline_basis(x, 4, knots_, local);
    double out = 0.0;
    for (int j = 0; j < 4; ++j) {
        const int column = first + j;
        if (column >= 0 && column < n_basis_) out += local[j] * coefficients_[column];
    }
    return out;
}

double SmoothingSpline::derivative(double x) const {
    Eigen::VectorXd local;
    const int first = bspline_basis(x, 4, knots_, local, 1);
    double out = 0.0;
    for (int j = 0; j < 4; ++j) {
        const int column = first + j;
        if (column >= 0 && column < n_basis_) out += local[j] * coefficients_[column];
    }
    return out;
}

}  // namespace riskcast
