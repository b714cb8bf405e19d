#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fairpath/bootstrap.hpp"
#include "fairpath/dataset.hpp"
#include "fairpath/sfm.hpp"

namespace fairpath {

enum class OutcomeModel { Auto, Linear, Logistic };

std::string_view to_string(OutcomeModel m);
OutcomeModel parse_outcome_model(std::string_view text);

enum class EffectKind { Indirect, Spurious };

std::string_view to_string(EffectKind e);
EffectKind parse_effect_kind(std::string_view text);

struct DecompConfig {
    double x0 = 0.0;
    double x1 = 1.0;
    std::size_t mc_draws = 100;
    std::size_t bootstrap_B = 200;
    std::uint64_t seed = 0;
    OutcomeModel outcome_model = OutcomeModel::Auto;

    void validate() const;
};

/// Linear or logistic regression of an outcome on a list of columns.
struct OutcomePredictor {
    std::vector<VariableId> inputs;
    bool logistic = false;
    Eigen::VectorXd coefficients;
    double intercept = 0.0;

    /// `x` holds the input columns in `inputs` order.
    Eigen::VectorXd predict(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
    Eigen::VectorXd predict(const Dataset& data) const;
};

/// Auto means logistic for a Binary target, linear otherwise. A logistic fit
/// that separates or fails to converge falls back to a linear probability
/// model and appends a message to `warnings` (when given).
OutcomePredictor fit_outcome_model(const Dataset& data, VariableId target, std::vector<VariableId> inputs,
                                   OutcomeModel model, std::vector<std::string>* warnings = nullptr);

struct Effects {
    double tv = 0.0;
    double ctf_de = 0.0;
    double ctf_ie = 0.0;
    double ctf_se = 0.0;
};

struct Contribution {
    EffectKind effect = EffectKind::Indirect;
    std::string variable;
    double value = 0.0;
};

struct DecompResult {
    Effects point;
    /// "percentage_points" for a Binary outcome, "outcome" otherwise.
    std::string units;
    /// Outcome model actually used: linear, logistic, or saturated (no W, no Z).
    std::string model;
    Summary tv, ctf_de, ctf_ie, ctf_se;
    std::size_t replicates = 0;
    std::size_t failed_replicates = 0;
    /// Successful replicates in replicate order.
    std::vector<Effects> replicate_effects;
    std::vector<Contribution> contributions;
    std::vector<std::string> warnings;
};

/// mean(Y | X = x1) - mean(Y | X = x0), in percentage points for a Binary Y.
double tv(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg);

struct PointEstimate {
    Effects effects;
    std::string model;
    std::vector<std::string> warnings;
};

/// Plug-in estimates without bootstrap. With A, B, C as the model-based means
/// over the x0 group of mu(x1, z, w), mu(x0, z, w) and mu(x1, z, w~(x1)), and
/// E0, D the empirical outcome means of the two groups:
///   de = A - B, ie = A - C, se = (C - D) + (E0 - B), tv = D - E0,
/// so tv = de - ie - se holds by cancellation.
PointEstimate estimate_effects(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg);

/// Point estimates, bootstrap summaries and all contributions.
DecompResult decompose(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg);

/// One-at-a-time contributions of every mediator (Indirect) or confounder (Spurious).
/// Throws std::invalid_argument when that set is empty.
std::vector<Contribution> contributions(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg,
                                        EffectKind effect);

/// Contribution of a single variable; throws if it is not in the effect's set.
Contribution contribution(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg, EffectKind effect,
                          std::string_view variable);

}  // namespace fairpath
