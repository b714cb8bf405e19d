#include "fairpath/optim.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace fairpath {

namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

BoundedLbfgsResult minimize_bounded(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper, const BoundedLbfgsOptions& opts) {
    const Eigen::Index n = x0.size();
    if (lower.size() != n || upper.size() != n) throw std::invalid_argument("bound size mismatch");
    if ((lower.array() > upper.array()).any()) throw std::invalid_argument("lower bound above upper bound");

    BoundedLbfgsResult out;
    Eigen::VectorXd x = project(x0, lower, upper);
    Eigen::VectorXd g(n);
    double fx = f(x, g);
    out.trace.push_back(fx);

    std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;
    Eigen::Array<bool, Eigen::Dynamic, 1> free(n);

    for (int it = 0; it < opts.max_iters; ++it) {
        out.iterations = it + 1;
        const Eigen::VectorXd pg = x - project(x - g, lower, upper);
        if (pg.lpNorm<Eigen::Infinity>() < opts.pg_tol) {
            out.converged = true;
            break;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool fixed = lower(i) == upper(i);
            const bool at_lower = x(i) <= lower(i) && g(i) > 0.0;
            const bool at_upper = x(i) >= upper(i) && g(i) < 0.0;
            free(i) = !(fixed || at_lower || at_upper);
        }
        const Eigen::VectorXd mask = free.cast<double>();
        const Eigen::VectorXd q0 = g.cwiseProduct(mask);

        // Two-loop recursion restricted to the free variables.
        Eigen::VectorXd q = q0;
        std::vector<double> alphas(memory.size()), rhos(memory.size());
        double gamma = 1.0;
        bool have_pair = false;
        for (std::size_t k = memory.size(); k-- > 0;) {
            const Eigen::VectorXd s = memory[k].first.cwiseProduct(mask);
            const Eigen::VectorXd y = memory[k].second.cwiseProduct(mask);
            const double sy = s.dot(y);
            if (sy <= 1e-16) {
                rhos[k] = 0.0;
                continue;
            }
            rhos[k] = 1.0 / sy;
            alphas[k] = rhos[k] * s.dot(q);
            q -= alphas[k] * y;
            if (!have_pair) {
                gamma = sy / y.squaredNorm();
                have_pair = true;
            }
        }
        Eigen::VectorXd r = gamma * q;
        for (std::size_t k = 0; k < memory.size(); ++k) {
            if (rhos[k] == 0.0) continue;
            const Eigen::VectorXd s = memory[k].first.cwiseProduct(mask);
            const Eigen::VectorXd y = memory[k].second.cwiseProduct(mask);
            const double beta = rhos[k] * y.dot(r);
            r += s * (alphas[k] - beta);
        }
        Eigen::VectorXd dir = -r.cwiseProduct(mask);
        if (!have_pair || g.dot(dir) >= 0.0) {
            memory.clear();
            dir = -q0;
            have_pair = false;
        }

        double step = have_pair ? 1.0 : std::min(1.0, 1.0 / std::max(q0.lpNorm<Eigen::Infinity>(), 1e-300));
        bool accepted = false;
        Eigen::VectorXd xn(n), gn(n);
        double fn = fx;
        for (int bt = 0; bt < opts.max_backtracks; ++bt) {
            xn = project(x + step * dir, lower, upper);
            const Eigen::VectorXd delta = xn - x;
            if (delta.lpNorm<Eigen::Infinity>() == 0.0) break;
            fn = f(xn, gn);
            if (std::isfinite(fn) && fn <= fx + 1e-4 * g.dot(delta)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (have_pair) {
                memory.clear();
                continue;
            }
            break;
        }

        const Eigen::VectorXd s = xn - x;
        const Eigen::VectorXd y = gn - g;
        const double decrease = fx - fn;
        x = xn;
        g = gn;
        fx = fn;
        out.trace.push_back(fx);
        if (s.dot(y) > 1e-12 * y.squaredNorm()) {
            memory.emplace_back(s, y);
            if (static_cast<int>(memory.size()) > opts.memory) memory.pop_front();
        }
        if (decrease <= opts.f_rel_tol * std::max(1.0, std::abs(fx))) {
            out.converged = true;
            break;
        }
    }
    out.x = x;
    out.f = fx;
    return out;
}

}  // namespace fairpath
