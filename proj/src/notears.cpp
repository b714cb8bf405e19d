#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "fairpath/discovery.hpp"
#include "fairpath/optim.hpp"

namespace fairpath {

double notears_h(const Eigen::Ref<const Eigen::MatrixXd>& w) {
    const Eigen::MatrixXd sq = w.cwiseProduct(w);
    const Eigen::MatrixXd e = sq.exp();
    return e.trace() - static_cast<double>(w.rows());
}

Eigen::MatrixXd notears_h_gradient(const Eigen::Ref<const Eigen::MatrixXd>& w) {
    const Eigen::MatrixXd sq = w.cwiseProduct(w);
    const Eigen::MatrixXd e = sq.exp();
    return e.transpose().cwiseProduct(2.0 * w);
}

namespace {

// x = [w_pos; w_neg], each the column-major vectorization of a d x d matrix.
Eigen::MatrixXd unpack(const Eigen::VectorXd& x, Eigen::Index d) {
    const Eigen::Index m = d * d;
    return Eigen::Map<const Eigen::MatrixXd>(x.data(), d, d) - Eigen::Map<const Eigen::MatrixXd>(x.data() + m, d, d);
}

}  // namespace

NotearsResult notears_linear(const Dataset& data, const DiscoveryConfig& cfg) {
    cfg.validate();
    data.validate();
    const auto& nc = cfg.notears;
    const Eigen::Index d = static_cast<Eigen::Index>(data.cols());
    const Eigen::Index n = data.rows();
    if (n < 2) throw std::invalid_argument("notears needs at least 2 samples");
    const Eigen::MatrixXd x = data.values.rowwise() - data.values.colwise().mean();
    const Eigen::MatrixXd gram = x.transpose() * x / static_cast<double>(n);

    const Eigen::Index m = d * d;
    Eigen::VectorXd lower = Eigen::VectorXd::Zero(2 * m);
    Eigen::VectorXd upper = Eigen::VectorXd::Constant(2 * m, std::numeric_limits<double>::infinity());
    for (Eigen::Index i = 0; i < d; ++i) {
        upper(i * d + i) = 0.0;
        upper(m + i * d + i) = 0.0;
    }

    double rho = 1.0;
    double alpha = 0.0;
    double h = std::numeric_limits<double>::infinity();
    Eigen::VectorXd est = Eigen::VectorXd::Zero(2 * m);
    NotearsResult out;

    auto objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd& grad) {
        const Eigen::MatrixXd w = unpack(v, d);
        // 1/(2n) ||X - XW||^2 expressed through the Gram matrix.
        const Eigen::MatrixXd gw = gram * w;
        const double loss = 0.5 * (gram.trace() - 2.0 * w.cwiseProduct(gram).sum() + w.cwiseProduct(gw).sum());
        const Eigen::MatrixXd loss_grad = gw - gram;
        const Eigen::MatrixXd e = w.cwiseProduct(w).exp();
        const double hv = e.trace() - static_cast<double>(d);
        const Eigen::MatrixXd h_grad = e.transpose().cwiseProduct(2.0 * w);
        const Eigen::MatrixXd smooth = loss_grad + (rho * hv + alpha) * h_grad;
        grad.resize(2 * m);
        Eigen::Map<Eigen::MatrixXd>(grad.data(), d, d) = smooth.array() + nc.lambda;
        Eigen::Map<Eigen::MatrixXd>(grad.data() + m, d, d) = -smooth.array() + nc.lambda;
        return loss + 0.5 * rho * hv * hv + alpha * hv + nc.lambda * v.sum();
    };

    BoundedLbfgsOptions opts;
    opts.max_iters = nc.max_inner_iters;
    for (int iter = 0; iter < nc.max_dual_iters; ++iter) {
        out.dual_iterations = iter + 1;
        Eigen::VectorXd candidate;
        double h_new = h;
        while (rho < nc.rho_max) {
            auto sol = minimize_bounded(objective, est, lower, upper, opts);
            out.inner_traces.push_back(std::move(sol.trace));
            candidate = std::move(sol.x);
            h_new = notears_h(unpack(candidate, d));
            if (h_new > 0.25 * h)
                rho *= 10.0;
            else
                break;
        }
        if (candidate.size() == 0) break;
        est = candidate;
        h = h_new;
        alpha += rho * h;
        if (h <= nc.h_tol) {
            out.converged = true;
            break;
        }
        if (rho >= nc.rho_max) break;
    }

    out.raw_weights = unpack(est, d);
    out.h = notears_h(out.raw_weights);
    out.weights = out.raw_weights;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            if (std::abs(out.weights(i, j)) <= nc.threshold) out.weights(i, j) = 0.0;

    // A pair can carry weight in both directions; keep the larger one.
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = i + 1; j < d; ++j)
            if (out.weights(i, j) != 0.0 && out.weights(j, i) != 0.0) {
                const bool keep_ij = std::abs(out.weights(i, j)) >= std::abs(out.weights(j, i));
                const auto [from, to] = keep_ij ? std::pair{j, i} : std::pair{i, j};
                out.removed_cycle_edges.emplace_back(static_cast<VariableId>(from), static_cast<VariableId>(to));
                out.weights(from, to) = 0.0;
            }

    Dag g(data.names);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            if (out.weights(i, j) != 0.0) g.add_directed(static_cast<VariableId>(i), static_cast<VariableId>(j));
    for (auto cycle = find_directed_cycle(g); !cycle.empty(); cycle = find_directed_cycle(g)) {
        std::size_t weakest = 0;
        double smallest = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < cycle.size(); ++k) {
            const auto from = static_cast<Eigen::Index>(cycle[k]);
            const auto to = static_cast<Eigen::Index>(cycle[(k + 1) % cycle.size()]);
            if (std::abs(out.weights(from, to)) < smallest) {
                smallest = std::abs(out.weights(from, to));
                weakest = k;
            }
        }
        const VariableId from = cycle[weakest];
        const VariableId to = cycle[(weakest + 1) % cycle.size()];
        g.remove_edge(from, to);
        out.weights(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to)) = 0.0;
        out.removed_cycle_edges.emplace_back(from, to);
    }
    out.graph = std::move(g);
    return out;
}

}  // namespace fairpath
