#include "riskcast/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskcast/parallel.hpp"
#include "riskcast/rng.hpp"

namespace riskcast {

namespace {

constexpr double kNegativeInfinity = -std::numeric_limits<double>::infinity();

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

bool interior(const Vector& rho_row, double scale) {
    return (rho_row.array() > 0.0).all() && (rho_row.array() < scale).all();
}

double log_posterior_impl(const Vector& rho_row, const TransitionSet& view, int region,
                          const BetaPrior& prior, double sigma) {
    const double s = prior.scale;
    if (!interior(rho_row, s)) return kNegativeInfinity;
    const double sigma_safe = std::max(sigma, 1e-12);

    const Vector innovations = view.leading.col(region) - view.lagged * rho_row;
    const double transitions = static_cast<double>(view.lagged.rows());
    double value = -transitions * std::log(sigma_safe * std::sqrt(2.0 * M_PI)) -
                   innovations.squaredNorm() / (2.0 * sigma_safe * sigma_safe);

    for (int q = 0; q < rho_row.size(); ++q) {
        const double a = prior.a(region, q);
        const double b = prior.b(region, q);
        const double u = rho_row[q] / s;
        value += (a - 1.0) * std::log(u) + (b - 1.0) * std::log(1.0 - u) - std::log(s) - log_beta(a, b);
    }
    return value;
}

Vector gradient_impl(const Vector& rho_row, const TransitionSet& view, int region,
                     const BetaPrior& prior, double sigma) {
    const double s = prior.scale;
    const double sigma_safe = std::max(sigma, 1e-12);
    const Vector innovations = view.leading.col(region) - view.lagged * rho_row;
    Vector gradient = view.lagged.transpose() * innovations / (sigma_safe * sigma_safe);
    for (int q = 0; q < rho_row.size(); ++q) {
        const double a = prior.a(region, q);
        const double b = prior.b(region, q);
        gradient[q] += (a - 1.0) / rho_row[q] - (b - 1.0) / (s - rho_row[q]);
    }
    return gradient;
}

// BFGS ascent in logit coordinates u = ln(rho/(s-rho)); the box constraint
// becomes implicit and the chain-rule factor is rho(s-rho)/s.
struct NewtonResult {
    Vector rho;
    double objective;
    int iterations;
};

NewtonResult newton_refine(const Vector& start, const TransitionSet& view, int region,
                           const BetaPrior& prior, double sigma,
                           const PosteriorOptimizerOptions& options) {
    const double s = prior.scale;
    const int dim = static_cast<int>(start.size());

    auto to_rho = [s](const Vector& u) {
        Vector rho(u.size());
        for (int i = 0; i < u.size(); ++i) rho[i] = s / (1.0 + std::exp(-u[i]));
        return rho;
    };
    auto to_logit = [s](const Vector& rho) {
        Vector u(rho.size());
        for (int i = 0; i < rho.size(); ++i) u[i] = std::log(rho[i] / (s - rho[i]));
        return u;
    };
    auto objective_of = [&](const Vector& u) {
        return log_posterior_impl(to_rho(u), view, region, prior, sigma);
    };
    auto gradient_of = [&](const Vector& u) {
        const Vector rho = to_rho(u);
        const Vector g_rho = gradient_impl(rho, view, region, prior, sigma);
        Vector g(u.size());
        for (int i = 0; i < u.size(); ++i) g[i] = g_rho[i] * rho[i] * (s - rho[i]) / s;
        return g;
    };

    Vector u = to_logit(start);
    double value = objective_of(u);
    Vector gradient = gradient_of(u);
    Matrix inverse_hessian = Matrix::Identity(dim, dim);

    int iteration = 0;
    for (; iteration < options.max_newton_iterations; ++iteration) {
        if (gradient.norm() < options.newton_tolerance * (1.0 + std::abs(value))) break;
        Vector direction = inverse_hessian * gradient;
        if (direction.dot(gradient) <= 0.0) direction = gradient;  // reset on bad curvature

        // Armijo backtracking on the ascent direction.
        double step = 1.0;
        const double slope = gradient.dot(direction);
        Vector u_next;
        double value_next = kNegativeInfinity;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving) {
            u_next = u + step * direction;
            value_next = objective_of(u_next);
            if (std::isfinite(value_next) && value_next >= value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const Vector gradient_next = gradient_of(u_next);
        const Vector position_delta = u_next - u;
        const Vector gradient_delta = gradient_next - gradient;  // note: ascent
        const double curvature = -position_delta.dot(gradient_delta);
        if (curvature > 1e-12) {
            // BFGS update on the negated gradient (descent convention).
            const Vector y = -gradient_delta;
            const double rho_bfgs = 1.0 / position_delta.dot(y);
            const Matrix identity = Matrix::Identity(dim, dim);
            inverse_hessian = (identity - rho_bfgs * position_delta * y.transpose()) * inverse_hessian *
                                  (identity - rho_bfgs * y * position_delta.transpose()) +
                              rho_bfgs * position_delta * position_delta.transpose();
        }
        u = u_next;
        value = value_next;
        gradient = gradient_next;
        if (position_delta.norm() < 1e-14) break;
    }

    return {to_rho(u), value, iteration};
}

}  // namespace

BetaPrior BetaPrior::flat(int regions, double scale) { return shared(regions, 1.0, 1.0, scale); }

BetaPrior BetaPrior::shared(int regions, double a, double b, double scale) {
    BetaPrior prior;
    prior.a = Matrix::Constant(regions, regions, a);
    prior.b = Matrix::Constant(regions, regions, b);
    prior.scale = scale;
    prior.validate(regions);
    return prior;
}

BetaPrior BetaPrior::survey_default(int regions) { return shared(regions, 14.0, 13.0, 1.0 / 3.0); }

void BetaPrior::validate(int regions) const {
    if (a.rows() != regions || a.cols() != regions || b.rows() != regions || b.cols() != regions)
        throw ValidationError("prior: shape matrices must be P x P");
    if ((a.array() <= 0.0).any() || (b.array() <= 0.0).any())
        throw ValidationError("prior: shape parameters must be positive");
    if (scale <= 0.0) throw ValidationError("prior: scale must be positive");
}

double log_posterior(const Vector& rho_row, const ResidualPanel& res, int region,
                     const BetaPrior& prior, double sigma) {
    if (region < 0 || region >= res.regions()) throw ValidationError("log_posterior: bad region index");
    if (rho_row.size() != res.regions())
        throw ValidationError("log_posterior: rho row size must equal P");
    prior.validate(res.regions());
    if (sigma <= 0.0) throw ValidationError("log_posterior: sigma must be positive");
    const TransitionSet view = transitions(res);
    return log_posterior_impl(rho_row, view, region, prior, sigma);
}

Vector log_posterior_gradient(const Vector& rho_row, const ResidualPanel& res, int region,
                              const BetaPrior& prior, double sigma) {
    if (!interior(rho_row, prior.scale))
        throw ValidationError("log_posterior_gradient: rho must be interior");
    const TransitionSet view = transitions(res);
    return gradient_impl(rho_row, view, region, prior, sigma);
}

PriorSuggestion fit_prior_from_bootstrap(const Matrix& samples, double scale, int regions) {
    const int b_count = static_cast<int>(samples.rows());
    if (b_count < 30) throw ValidationError("fit_prior_from_bootstrap: need at least 30 samples");
    if (scale <= 0.0) throw ValidationError("fit_prior_from_bootstrap: scale must be positive");
    if (samples.cols() != regions * regions)
        throw ValidationError("fit_prior_from_bootstrap: samples must have P*P columns");

    const double margin = 1e-9;
    long clipped = 0;
    Matrix scaled(samples.rows(), samples.cols());
    for (int i = 0; i < samples.rows(); ++i) {
        for (int j = 0; j < samples.cols(); ++j) {
            double u = samples(i, j) / scale;
            if (u <= 0.0 || u >= 1.0) {
                ++clipped;
                u = std::clamp(u, margin, 1.0 - margin);
            }
            scaled(i, j) = u;
        }
    }

    auto moments_fit = [](const Eigen::Ref<const Vector>& u, double& a, double& b) {
        const double mean = u.mean();
        const double variance = (u.array() - mean).square().sum() / (u.size() - 1);
        if (variance <= 0.0)
            throw ValidationError("fit_prior_from_bootstrap: degenerate samples (zero variance)");
        const double common = mean * (1.0 - mean) / variance - 1.0;
        if (common <= 0.0)
            throw ValidationError("fit_prior_from_bootstrap: variance too large for a Beta fit");
        a = mean * common;
        b = (1.0 - mean) * common;
    };

    PriorSuggestion suggestion;
    suggestion.scale = scale;
    suggestion.clipped_fraction = static_cast<double>(clipped) / (samples.rows() * samples.cols());

    const Eigen::Map<const Vector> pooled(scaled.data(), scaled.size());
    moments_fit(pooled, suggestion.a, suggestion.b);

    suggestion.a_entries.resize(regions, regions);
    suggestion.b_entries.resize(regions, regions);
    for (int p = 0; p < regions; ++p) {
        for (int q = 0; q < regions; ++q) {
            double a_entry = 0.0, b_entry = 0.0;
            moments_fit(scaled.col(p * regions + q), a_entry, b_entry);
            suggestion.a_entries(p, q) = a_entry;
            suggestion.b_entries(p, q) = b_entry;
        }
    }
    return suggestion;
}

TransitionSet transitions(const ResidualPanel& res) {
    const int t_len = res.nodes();
    if (t_len < 2) throw ValidationError("transitions: need at least two time points");
    TransitionSet set;
    set.lagged = res.values.topRows(t_len - 1);
    set.leading = res.values.bottomRows(t_len - 1);
    return set;
}

TransitionSet transitions_masked(const ResidualPanel& res, const std::vector<int>& keep_rows) {
    std::vector<int> rows = keep_rows;
    std::sort(rows.begin(), rows.end());
    for (const int r : rows)
        if (r < 0 || r >= res.nodes()) throw ValidationError("transitions: row out of range");
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        if (rows[i + 1] == rows[i] + 1) pairs.emplace_back(rows[i], rows[i + 1]);
    if (pairs.empty()) throw ValidationError("transitions: kept rows contain no consecutive pair");
    TransitionSet set;
    set.lagged.resize(static_cast<int>(pairs.size()), res.regions());
    set.leading.resize(static_cast<int>(pairs.size()), res.regions());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        set.lagged.row(static_cast<int>(i)) = res.values.row(pairs[i].first);
        set.leading.row(static_cast<int>(i)) = res.values.row(pairs[i].second);
    }
    return set;
}

BayesFit optimize_posterior(const ResidualPanel& res, const BetaPrior& prior,
                            const PosteriorOptimizerOptions& options, std::uint64_t seed) {
    const int regions = res.regions();
    const int t_len = res.nodes();
    if (t_len < regions + 2)
        throw ValidationError("optimize_posterior: need T >= P + 2 time points");
    // Uncentered second moment, the sigma_p the objective plugs in.
    Vector sigma(regions);
    for (int p = 0; p < regions; ++p)
        sigma[p] = std::sqrt(res.values.col(p).squaredNorm() / static_cast<double>(t_len));
    return optimize_posterior(transitions(res), sigma, prior, options, seed);
}

BayesFit optimize_posterior(const TransitionSet& view, const Vector& sigma, const BetaPrior& prior,
                            const PosteriorOptimizerOptions& options, std::uint64_t seed) {
    const int regions = static_cast<int>(view.lagged.cols());
    prior.validate(regions);
    if (sigma.size() != regions) throw ValidationError("optimize_posterior: sigma size must equal P");
    if (view.lagged.rows() != view.leading.rows() || view.lagged.rows() < 1)
        throw ValidationError("optimize_posterior: empty or inconsistent transition set");
    if (options.population < 2 || options.generations < 1)
        throw ValidationError("optimize_posterior: bad optimizer options");

    const double s = prior.scale;
    const double margin = 1e-9 * s;

    BayesFit fit;
    fit.prior = prior;
    fit.seed = seed;
    fit.rho.resize(regions, regions);
    fit.sigma = sigma;
    fit.objective.resize(regions);
    fit.trace.resize(regions);

    const Rng master(seed);
    parallel_for(static_cast<std::size_t>(regions), options.jobs, [&](std::size_t region_index) {
        const int p = static_cast<int>(region_index);
        Rng rng = master.derive(region_index);
        const double sigma = fit.sigma[p];
        auto objective_of = [&](const Vector& rho) {
            return log_posterior_impl(rho, view, p, prior, sigma);
        };

        // Phase 1: genetic search with elitism.
        std::vector<Vector> population(options.population);
        std::vector<double> scores(options.population);
        for (int i = 0; i < options.population; ++i) {
            Vector candidate(regions);
            for (int q = 0; q < regions; ++q) candidate[q] = rng.uniform(margin, s - margin);
            population[i] = candidate;
            scores[i] = objective_of(candidate);
        }
        int best_index =
            static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
        if (!std::isfinite(scores[best_index]))
            throw NumericalError("optimize_posterior: objective non-finite at every initial individual");

        Vector best = population[best_index];
        double best_score = scores[best_index];
        auto& trace = fit.trace[p];
        trace.push_back({0, 0, best_score});

        const double mutation_sigma = options.mutation_scale * s;
        for (int generation = 1; generation <= options.generations; ++generation) {
            std::vector<Vector> next(options.population);
            next[0] = best;  // elite
            for (int i = 1; i < options.population; ++i) {
                // tournament of 3
                int winner = static_cast<int>(rng.uniform_index(options.population));
                for (int round = 0; round < 2; ++round) {
                    const int challenger = static_cast<int>(rng.uniform_index(options.population));
                    if (scores[challenger] > scores[winner]) winner = challenger;
                }
                Vector child = population[winner];
                for (int q = 0; q < regions; ++q) {
                    child[q] += mutation_sigma * rng.normal();
                    child[q] = std::clamp(child[q], margin, s - margin);
                }
                next[i] = child;
            }
            population = std::move(next);
            for (int i = 0; i < options.population; ++i) {
                scores[i] = objective_of(population[i]);
                if (scores[i] > best_score) {
                    best_score = scores[i];
                    best = population[i];
                }
            }
            trace.push_back({generation, 0, best_score});
        }

        // Phase 2: quasi-Newton refinement; never worse than the genetic best.
        const NewtonResult refined = newton_refine(best, view, p, prior, sigma, options);
        if (std::isfinite(refined.objective) && refined.objective >= best_score) {
            best = refined.rho;
            best_score = refined.objective;
        }
        trace.push_back({refined.iterations, 1, best_score});

        fit.rho.row(p) = best.transpose();
        fit.objective[p] = best_score;
    });

    return fit;
}

Vector bayes_predict(const BayesFit& fit, const ResidualPanel& res, int t) {
    if (t < 2 || t > res.nodes())
        throw ValidationError("bayes_predict: node index out of range (needs 2 <= t <= T)");
    if (fit.rho.cols() != res.regions())
        throw ValidationError("bayes_predict: fit and residual panel disagree on regions");
    return fit.rho * res.values.row(t - 2).transpose();
}

double fraction_outside_support(const Matrix& rho, double scale) {
    long outside = 0;
    for (int i = 0; i < rho.rows(); ++i)
        for (int j = 0; j < rho.cols(); ++j)
            if (rho(i, j) <= 0.0 || rho(i, j) >= scale) ++outside;
    return static_cast<double>(outside) / static_cast<double>(rho.size());
}

ForecastBundle combine_predictions(const Matrix& regression, const Matrix& residual_prediction,
                                   const std::vector<double>& node_times,
                                   const std::vector<std::string>& region_ids,
                                   const SpatialWeighting* inverse_weighting) {
    if (regression.rows() != residual_prediction.rows() ||
        regression.cols() != residual_prediction.cols())
        throw ValidationError("combine_predictions: regression and residual shapes differ");
    if (static_cast<int>(node_times.size()) != regression.rows())
        throw ValidationError("combine_predictions: node times do not match rows");

    ForecastBundle bundle;
    bundle.node_times = node_times;
    bundle.region_ids = region_ids;
    bundle.log_risk = regression + residual_prediction;

    if (inverse_weighting != nullptr) {
        const Matrix& w = inverse_weighting->matrix;
        if (w.rows() != regression.cols())
            throw ValidationError("combine_predictions: weighting dimension mismatch");
        const Eigen::FullPivLU<Matrix> lu(w);
        if (!lu.isInvertible())
            throw NumericalError("combine_predictions: weighting matrix is singular");
        // soft = hard * W^T  =>  hard = soft * W^{-T}
        bundle.log_risk = bundle.log_risk * lu.inverse().transpose();
    }

    bundle.risk = bundle.log_risk.array().exp();
    bundle.cumulative.setZero(bundle.risk.rows(), bundle.risk.cols());
    for (int t = 1; t < bundle.risk.rows(); ++t) {
        const double dt = node_times[t] - node_times[t - 1];
        bundle.cumulative.row(t) =
            bundle.cumulative.row(t - 1) + 0.5 * dt * (bundle.risk.row(t) + bundle.risk.row(t - 1));
    }
    return bundle;
}

}  // namespace riskcast
