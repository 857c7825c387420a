// Damped nonlinear least squares (Levenberg-Marquardt) with optional
// per-parameter box bounds enforced by projection. All fitting in this
// project funnels through fit().
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spectool::lsq {

// y = model(params, x), evaluated point-wise.
using ModelFn = std::function<double(std::span<const double>, double)>;
// Analytic partials d model / d params at one x, written into `out`
// (out.size() == params.size()). Optional; central differences otherwise.
using JacobianFn = std::function<void(std::span<const double>, double, std::span<double>)>;

struct Bounds {
    double lo;
    double hi;
};

struct FitProblem {
    ModelFn model;
    JacobianFn jacobian;  // may be empty
    std::vector<double> initial_params;
    std::vector<double> x_data;
    std::vector<double> y_data;
    std::vector<std::optional<Bounds>> bounds;  // empty or one entry per parameter
    // Per-parameter trust limit: a proposed step larger than this escalates
    // the damping instead of being taken. Empty or non-positive = unlimited.
    std::vector<double> max_step;
};

struct FitOptions {
    int max_iter = 200;
    double tol_cost = 1e-10;   // relative cost change on an accepted step
    double tol_step = 1e-10;   // parameter step norm
    double damping_init = 1e-3;
    double damping_cap = 1e10;
};

struct FitResult {
    std::vector<double> params;
    std::vector<double> residuals;  // y_data - model
    bool converged = false;
    int iterations = 0;  // accepted steps
    double cost = 0.0;   // sum of squared residuals
    std::vector<double> cost_history;  // cost after each accepted step, starting at the initial cost
    std::string message;
};

// Levenberg-Marquardt descent from problem.initial_params. The returned cost
// never exceeds the initial cost; converged=true when the relative cost
// change or the step norm drops below tolerance. Singular normal equations
// escalate the damping; exceeding the damping cap or a non-finite model value
// mid-iteration aborts with converged=false and a diagnostic message.
FitResult fit(const FitProblem& problem, const FitOptions& options = {});

}  // namespace spectool::lsq
