#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace fairpath {

/// Objective callback: returns f(x) and writes the gradient into `grad`.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct BoundedLbfgsOptions {
    int memory = 10;
    int max_iters = 2000;
    /// Stop when the projected gradient's max-norm falls below this.
    double pg_tol = 1e-8;
    /// Stop when the relative objective decrease of a step falls below this.
    double f_rel_tol = 1e-12;
    int max_backtracks = 60;
};

struct BoundedLbfgsResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Objective value after each accepted step (the starting value first).
    std::vector<double> trace;
};

/// Projected limited-memory BFGS for min f(x) subject to lower <= x <= upper.
/// Variables with lower == upper stay fixed. Every accepted step satisfies an
/// Armijo condition along the projected path, so `trace` is non-increasing.
BoundedLbfgsResult minimize_bounded(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper, const BoundedLbfgsOptions& opts = {});

}  // namespace fairpath
