#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "fairpath/bootstrap.hpp"
#include "fairpath/dataset.hpp"
#include "fairpath/fairness.hpp"
#include "fairpath/sfm.hpp"

namespace fairpath {

enum class FairnessPath { Direct, Indirect, Spurious };

std::string_view to_string(FairnessPath p);

inline constexpr std::array<FairnessPath, 3> kFairnessPaths{FairnessPath::Direct, FairnessPath::Indirect,
                                                            FairnessPath::Spurious};
inline constexpr double kCfurEpsilon = 1e-9;

struct Predictors {
    OutcomePredictor full;        // X, Z, W
    OutcomePredictor de_blocked;  // Z, W
    OutcomePredictor ie_blocked;  // X, Z
    OutcomePredictor se_blocked;  // X, W

    const OutcomePredictor& blocked(FairnessPath p) const;
};

/// Fits the full predictor and the three path-blocked predictors on the same
/// rows. The outcome model is resolved as in the fairness decomposition.
Predictors train_predictors(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg,
                            std::vector<std::string>* warnings = nullptr);

struct PathCfur {
    FairnessPath path = FairnessPath::Direct;
    double component_full = 0.0;
    double component_blocked = 0.0;
    double loss_full = 0.0;
    double loss_blocked = 0.0;
    double fairness_gain = 0.0;
    double utility_cost = 0.0;
    double ratio = 0.0;
    /// |utility_cost| < 1e-9; the ratio was computed with the cost floored at 1e-9.
    bool unstable = false;
    Summary gain_bootstrap, cost_bootstrap, ratio_bootstrap;
    std::size_t unstable_replicates = 0;
    /// Successful replicates in replicate order.
    std::vector<double> replicate_gains, replicate_costs, replicate_ratios;
};

struct CfurResult {
    std::array<PathCfur, 3> paths;
    /// "mse" or "log_loss".
    std::string loss;
    std::size_t replicates = 0;
    std::size_t failed_replicates = 0;
    std::vector<std::string> warnings;

    const PathCfur& at(FairnessPath p) const { return paths[static_cast<std::size_t>(p)]; }
};

/// ratio for a given gain and cost: cost below 1e-9 in magnitude is floored at
/// 1e-9 and flagged; negative costs pass through.
std::pair<double, bool> cfur_ratio(double gain, double cost);

/// Predictor-output fairness per path. Components are taken from the
/// decomposition of each predictor's in-sample outputs (percentage points for
/// a Binary outcome); losses are in-sample MSE or log-loss.
CfurResult cfur(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg);

}  // namespace fairpath
