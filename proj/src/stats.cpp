#include "fairpath/stats.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fairpath {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

Eigen::MatrixXd correlation_matrix(const Eigen::Ref<const Eigen::MatrixXd>& values,
                                   const std::vector<std::string>& names) {
    const Eigen::Index d = values.cols();
    Eigen::MatrixXd centered = values.rowwise() - values.colwise().mean();
    Eigen::VectorXd norms = centered.colwise().norm();
    for (Eigen::Index j = 0; j < d; ++j)
        if (!(norms(j) > 0.0)) {
            const std::string label =
                static_cast<std::size_t>(j) < names.size() ? names[j] : "column " + std::to_string(j);
            throw std::invalid_argument("zero-variance column: " + label);
        }
    centered.array().rowwise() /= norms.transpose().array();
    Eigen::MatrixXd corr = centered.transpose() * centered;
    corr = 0.5 * (corr + corr.transpose()).eval();
    corr.diagonal().setOnes();
    return corr;
}

Eigen::MatrixXd correlation_matrix(const Dataset& data) { return correlation_matrix(data.values, data.names); }

double partial_correlation(const Eigen::Ref<const Eigen::MatrixXd>& corr, VariableId i, VariableId j,
                           std::span<const VariableId> given) {
    if (i == j) throw std::invalid_argument("partial_correlation: i == j");
    const auto clamp = [](double r) { return std::clamp(r, -kCorrelationClamp, kCorrelationClamp); };
    if (given.empty()) return clamp(corr(i, j));

    const Eigen::Index k = static_cast<Eigen::Index>(given.size()) + 2;
    std::vector<VariableId> idx{i, j};
    for (auto s : given) {
        if (s == i || s == j) throw std::invalid_argument("partial_correlation: conditioning set contains i or j");
        idx.push_back(s);
    }
    Eigen::MatrixXd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = corr(idx[a], idx[b]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    lu.setThreshold(1e-10);
    if (!lu.isInvertible()) throw std::domain_error("conditioning set collinear");
    const Eigen::MatrixXd prec = lu.inverse();
    const double denom = std::sqrt(prec(0, 0) * prec(1, 1));
    if (!(denom > 0.0) || !std::isfinite(denom)) throw std::domain_error("conditioning set collinear");
    return clamp(-prec(0, 1) / denom);
}

TestResult fisher_z_test(const Eigen::Ref<const Eigen::MatrixXd>& corr, Eigen::Index n, VariableId i,
                         VariableId j, std::span<const VariableId> given, double alpha) {
    const auto dof = n - static_cast<Eigen::Index>(given.size()) - 3;
    if (dof < 1)
        throw std::invalid_argument("Fisher-Z needs n - |S| - 3 >= 1 (n = " + std::to_string(n) +
                                    ", |S| = " + std::to_string(given.size()) + ")");
    const double r = partial_correlation(corr, i, j, given);
    TestResult out;
    if (std::abs(r) >= kCorrelationClamp) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
    } else {
        const double z = 0.5 * std::log((1.0 + r) / (1.0 - r));
        out.statistic = std::sqrt(static_cast<double>(dof)) * std::abs(z);
        out.p_value = std::clamp(std::erfc(out.statistic / std::numbers::sqrt2), 0.0, 1.0);
    }
    out.independent = out.p_value > alpha;
    return out;
}

TestResult fisher_z_test(const Dataset& data, VariableId i, VariableId j, std::span<const VariableId> given,
                         double alpha) {
    return fisher_z_test(correlation_matrix(data), data.rows(), i, j, given, alpha);
}

FisherZ::FisherZ(const Dataset& data, double alpha)
    : corr_(correlation_matrix(data)), n_(data.rows()), alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (n_ < 4) throw std::invalid_argument("Fisher-Z needs at least 4 samples");
}

Eigen::MatrixXd gather_columns(const Dataset& data, std::span<const VariableId> cols) {
    Eigen::MatrixXd out(data.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        out.col(static_cast<Eigen::Index>(c)) = data.values.col(static_cast<Eigen::Index>(cols[c]));
    return out;
}

namespace {

Eigen::MatrixXd with_intercept(const Eigen::Ref<const Eigen::MatrixXd>& x) {
    Eigen::MatrixXd design(x.rows(), x.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(x.cols()) = x;
    return design;
}

}  // namespace

BicScore bic_local_score(const Dataset& data, VariableId node, std::span<const VariableId> parents) {
    for (auto p : parents)
        if (p == node) throw std::invalid_argument("bic_local_score: node among its own parents");
    const auto n = data.rows();
    const Eigen::VectorXd y = data.values.col(static_cast<Eigen::Index>(node));
    const Eigen::MatrixXd design = with_intercept(gather_columns(data, parents));

    BicScore out;
    Eigen::VectorXd residual;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() == design.cols()) {
        residual = y - design * qr.solve(y);
    } else {
        out.ridge_fallback = true;
        Eigen::MatrixXd gram = design.transpose() * design;
        gram.diagonal().array() += 1e-8;
        residual = y - design * gram.ldlt().solve(design.transpose() * y);
    }
    const double nd = static_cast<double>(n);
    const double mse = std::max(residual.squaredNorm() / nd, 1e-12);
    out.score = -nd * std::log(mse) - static_cast<double>(parents.size()) * std::log(nd);
    return out;
}

OlsFit ols_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
               const std::vector<std::string>& names) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n <= p + 1)
        throw std::invalid_argument("ols_fit needs more rows than predictors + 1 (n = " + std::to_string(n) +
                                    ", p = " + std::to_string(p) + ")");
    const Eigen::MatrixXd design = with_intercept(x);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < design.cols()) {
        std::string msg = "rank-deficient design; dependent column(s):";
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < design.cols(); ++k) {
            const Eigen::Index c = perm(k);
            if (c == 0)
                msg += " intercept";
            else if (static_cast<std::size_t>(c - 1) < names.size())
                msg += " " + names[c - 1];
            else
                msg += " column " + std::to_string(c - 1);
        }
        throw std::invalid_argument(msg);
    }
    const Eigen::VectorXd beta = qr.solve(y);
    OlsFit fit;
    fit.intercept = beta(0);
    fit.coefficients = beta.tail(p);
    const double rss = (y - design * beta).squaredNorm();
    fit.residual_variance = rss / static_cast<double>(n - p - 1);
    return fit;
}

OlsFit ols_fit(const Dataset& data, VariableId target, std::span<const VariableId> predictors) {
    std::vector<std::string> names;
    for (auto p : predictors) names.push_back(data.names.at(p));
    return ols_fit(gather_columns(data, predictors), data.values.col(static_cast<Eigen::Index>(target)), names);
}

Eigen::VectorXd LogisticFit::predict(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    Eigen::VectorXd eta = (x * coefficients).array() + intercept;
    return eta.unaryExpr([](double t) { return sigmoid(t); });
}

LogisticFit logistic_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if ((y.array() != 0.0 && y.array() != 1.0).any()) throw std::invalid_argument("logistic_fit: target must be 0/1");
    const double positives = y.sum();
    if (positives == 0.0 || positives == static_cast<double>(n))
        throw std::invalid_argument("logistic_fit: target has a single class");

    const Eigen::MatrixXd design = with_intercept(x);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);
    LogisticFit fit;
    for (int it = 1; it <= 100; ++it) {
        fit.iterations = it;
        const Eigen::VectorXd eta = design * beta;
        const Eigen::VectorXd prob = eta.unaryExpr([](double t) { return sigmoid(t); });
        const Eigen::VectorXd w = (prob.array() * (1.0 - prob.array())).max(1e-12);
        const Eigen::MatrixXd hessian = design.transpose() * w.asDiagonal() * design;
        const Eigen::VectorXd gradient = design.transpose() * (y - prob);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
        Eigen::VectorXd step = ldlt.solve(gradient);
        if (ldlt.info() != Eigen::Success || !step.allFinite()) {
            Eigen::MatrixXd ridge = hessian;
            ridge.diagonal().array() += 1e-10;
            step = ridge.ldlt().solve(gradient);
        }
        beta += step;
        // perfect fit means the likelihood has no finite maximiser
        const Eigen::VectorXd fitted = (design * beta).unaryExpr([](double t) { return sigmoid(t); });
        if (beta.cwiseAbs().maxCoeff() > 30.0 || (y - fitted).cwiseAbs().maxCoeff() < 1e-6) {
            fit.separation = true;
            break;
        }
        if (step.cwiseAbs().maxCoeff() < 1e-8) {
            fit.converged = true;
            break;
        }
    }
    fit.intercept = beta(0);
    fit.coefficients = beta.tail(p);
    return fit;
}

LogisticFit logistic_fit(const Dataset& data, VariableId target, std::span<const VariableId> predictors) {
    if (!data.is_binary(target)) throw std::invalid_argument("logistic_fit: target " + data.names.at(target) + " is not binary");
    return logistic_fit(gather_columns(data, predictors), data.values.col(static_cast<Eigen::Index>(target)));
}

double mean_log_likelihood(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                           double intercept, const Eigen::Ref<const Eigen::VectorXd>& coefficients) {
    const Eigen::VectorXd eta = (x * coefficients).array() + intercept;
    double total = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        // log(1 + e^t), stable for large |t|
        const double t = eta(i);
        const double softplus = t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
        total += y(i) * t - softplus;
    }
    return total / static_cast<double>(eta.size());
}

}  // namespace fairpath
