#include "spectool/lsq.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spectool::lsq {

namespace {

void clip_to_bounds(std::vector<double>& params,
                    const std::vector<std::optional<Bounds>>& bounds) {
    if (bounds.empty()) return;
    for (std::size_t j = 0; j < params.size(); ++j)
        if (bounds[j]) params[j] = std::clamp(params[j], bounds[j]->lo, bounds[j]->hi);
}

// residuals r_i = y_i - f(p, x_i); returns false on non-finite model output
bool eval_residuals(const FitProblem& p, const std::vector<double>& params,
                    std::vector<double>& r) {
    r.resize(p.x_data.size());
    for (std::size_t i = 0; i < p.x_data.size(); ++i) {
        const double f = p.model(params, p.x_data[i]);
        if (!std::isfinite(f)) return false;
        r[i] = p.y_data[i] - f;
    }
    return true;
}

double sum_sq(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return s;
}

// J_ij = d f(p, x_i) / d p_j
bool eval_jacobian(const FitProblem& p, const std::vector<double>& params, Eigen::MatrixXd& J) {
    const auto n = static_cast<Eigen::Index>(p.x_data.size());
    const auto m = static_cast<Eigen::Index>(params.size());
    J.resize(n, m);
    if (p.jacobian) {
        std::vector<double> row(params.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            p.jacobian(params, p.x_data[i], row);
            for (Eigen::Index j = 0; j < m; ++j) {
                if (!std::isfinite(row[j])) return false;
                J(i, j) = row[j];
            }
        }
        return true;
    }
    // central finite differences
    std::vector<double> pp = params;
    for (Eigen::Index j = 0; j < m; ++j) {
        const double pj = params[j];
        const double h = 1e-6 * std::max(std::abs(pj), 1.0);
        pp[j] = pj + h;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double fp = p.model(pp, p.x_data[i]);
            if (!std::isfinite(fp)) return false;
            J(i, j) = fp;
        }
        pp[j] = pj - h;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double fm = p.model(pp, p.x_data[i]);
            if (!std::isfinite(fm)) return false;
            J(i, j) = (J(i, j) - fm) / (2.0 * h);
        }
        pp[j] = pj;
    }
    return true;
}

}  // namespace

FitResult fit(const FitProblem& problem, const FitOptions& options) {
    const std::size_t n = problem.x_data.size();
    const std::size_t m = problem.initial_params.size();
    if (!problem.model) throw std::invalid_argument("fit: model function required");
    if (m == 0) throw std::invalid_argument("fit: at least one parameter required");
    if (problem.y_data.size() != n)
        throw std::invalid_argument("fit: x_data and y_data must have equal length");
    if (n < m)
        throw std::invalid_argument("fit: need at least as many data points as parameters");
    if (!problem.bounds.empty() && problem.bounds.size() != m)
        throw std::invalid_argument("fit: bounds must be empty or one per parameter");
    if (!problem.max_step.empty() && problem.max_step.size() != m)
        throw std::invalid_argument("fit: max_step must be empty or one per parameter");

    FitResult res;
    res.params = problem.initial_params;
    clip_to_bounds(res.params, problem.bounds);

    if (!eval_residuals(problem, res.params, res.residuals))
        throw std::domain_error("fit: model not finite at initial parameters");
    res.cost = sum_sq(res.residuals);
    res.cost_history.push_back(res.cost);

    if (res.cost <= std::numeric_limits<double>::min()) {
        res.converged = true;
        res.message = "zero cost at initial parameters";
        return res;
    }

    double lambda = options.damping_init;
    Eigen::MatrixXd J;
    std::vector<double> trial_params(m), trial_residuals;

    for (int iter = 0; iter < options.max_iter; ++iter) {
        if (!eval_jacobian(problem, res.params, J)) {
            res.message = "non-finite model output in jacobian evaluation";
            return res;
        }
        Eigen::Map<const Eigen::VectorXd> r(res.residuals.data(), static_cast<Eigen::Index>(n));
        const Eigen::MatrixXd jtj = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-12);

        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            Eigen::VectorXd step = a.ldlt().solve(g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                if (lambda > options.damping_cap) {
                    res.message = "singular normal equations; damping cap exceeded";
                    return res;
                }
                continue;
            }
            if (!problem.max_step.empty()) {
                bool oversized = false;
                for (std::size_t j = 0; j < m; ++j) {
                    const double cap = problem.max_step[j];
                    if (cap > 0.0 && std::abs(step[static_cast<Eigen::Index>(j)]) > cap)
                        oversized = true;
                }
                if (oversized) {
                    lambda *= 10.0;
                    if (lambda > options.damping_cap) {
                        res.message = "damping cap exceeded while limiting the step size";
                        return res;
                    }
                    continue;
                }
            }
            for (std::size_t j = 0; j < m; ++j)
                trial_params[j] = res.params[j] + step[static_cast<Eigen::Index>(j)];
            clip_to_bounds(trial_params, problem.bounds);

            if (!eval_residuals(problem, trial_params, trial_residuals)) {
                res.message = "non-finite model output during iteration";
                return res;
            }
            const double trial_cost = sum_sq(trial_residuals);
            if (!std::isfinite(trial_cost)) {
                res.message = "non-finite cost during iteration";
                return res;
            }

            if (trial_cost <= res.cost) {
                double step_norm = 0.0;
                for (std::size_t j = 0; j < m; ++j) {
                    const double d = trial_params[j] - res.params[j];
                    step_norm += d * d;
                }
                step_norm = std::sqrt(step_norm);
                const double rel_drop = (res.cost - trial_cost) / std::max(res.cost, 1e-300);
                res.params = trial_params;
                res.residuals = trial_residuals;
                res.cost = trial_cost;
                res.cost_history.push_back(res.cost);
                res.iterations = iter + 1;
                lambda = std::max(lambda / 10.0, 1e-12);
                accepted = true;
                if (rel_drop < options.tol_cost || step_norm < options.tol_step) {
                    res.converged = true;
                    return res;
                }
            } else {
                lambda *= 10.0;
                if (lambda > options.damping_cap) {
                    res.message = "damping cap exceeded without cost reduction";
                    return res;
                }
            }
        }
    }
    res.message = "max iterations reached";
    return res;
}

}  // namespace spectool::lsq
