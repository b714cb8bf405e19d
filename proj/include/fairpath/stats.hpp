#pragma once

#include <Eigen/Core>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "fairpath/dataset.hpp"

namespace fairpath {

/// Standard normal CDF.
double normal_cdf(double x);

/// Pearson correlation matrix of the columns. Throws on a zero-variance column.
Eigen::MatrixXd correlation_matrix(const Dataset& data);

/// Same, for a bare matrix; `names` is only used in error messages.
Eigen::MatrixXd correlation_matrix(const Eigen::Ref<const Eigen::MatrixXd>& values,
                                   const std::vector<std::string>& names = {});

inline constexpr double kCorrelationClamp = 1.0 - 1e-12;

/// Partial correlation of i and j given `given`, from the inverse of the
/// correlation submatrix over {i, j} and `given`. Clamped to +-(1 - 1e-12).
double partial_correlation(const Eigen::Ref<const Eigen::MatrixXd>& corr, VariableId i, VariableId j,
                           std::span<const VariableId> given);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool independent = true;
};

/// Fisher z-test on a precomputed correlation matrix of n samples.
TestResult fisher_z_test(const Eigen::Ref<const Eigen::MatrixXd>& corr, Eigen::Index n, VariableId i,
                         VariableId j, std::span<const VariableId> given, double alpha);

TestResult fisher_z_test(const Dataset& data, VariableId i, VariableId j, std::span<const VariableId> given,
                         double alpha);

/// Caches the correlation matrix so repeated tests on one dataset are cheap.
class FisherZ {
public:
    FisherZ(const Dataset& data, double alpha);

    TestResult test(VariableId i, VariableId j, std::span<const VariableId> given) const {
        return fisher_z_test(corr_, n_, i, j, given, alpha_);
    }
    Eigen::Index samples() const { return n_; }
    double alpha() const { return alpha_; }

private:
    Eigen::MatrixXd corr_;
    Eigen::Index n_;
    double alpha_;
};

struct BicScore {
    double score = 0.0;
    /// Design was singular and a 1e-8 ridge penalty was used.
    bool ridge_fallback = false;
};

/// Gaussian local BIC, higher is better: -n ln(RSS/n) - |parents| ln n, with RSS
/// from OLS of `node` on `parents` plus an intercept. RSS/n is floored at 1e-12.
BicScore bic_local_score(const Dataset& data, VariableId node, std::span<const VariableId> parents);

struct OlsFit {
    Eigen::VectorXd coefficients;
    double intercept = 0.0;
    double residual_variance = 0.0;

    Eigen::VectorXd predict(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
        return (x * coefficients).array() + intercept;
    }
};

/// Least squares with intercept via column-pivoting Householder QR. Throws
/// std::invalid_argument naming the dependent columns when rank-deficient.
OlsFit ols_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
               const std::vector<std::string>& names = {});
OlsFit ols_fit(const Dataset& data, VariableId target, std::span<const VariableId> predictors);

struct LogisticFit {
    Eigen::VectorXd coefficients;
    double intercept = 0.0;
    bool converged = false;
    bool separation = false;
    int iterations = 0;

    Eigen::VectorXd predict(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
};

inline double sigmoid(double t) {
    return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

/// Maximum-likelihood logistic regression by IRLS. Stops when the largest
/// coefficient update is below 1e-8 or after 100 iterations; flags separation
/// (converged = false) once any |coefficient| exceeds 30.
LogisticFit logistic_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y);
LogisticFit logistic_fit(const Dataset& data, VariableId target, std::span<const VariableId> predictors);

/// Mean Bernoulli log-likelihood of y under the given linear predictor.
double mean_log_likelihood(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                           double intercept, const Eigen::Ref<const Eigen::VectorXd>& coefficients);

/// Gathers the named columns into a matrix.
Eigen::MatrixXd gather_columns(const Dataset& data, std::span<const VariableId> cols);

}  // namespace fairpath
