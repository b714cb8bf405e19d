#include "fairpath/cfur.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "fairpath/rng.hpp"

namespace fairpath {

std::string_view to_string(FairnessPath p) {
    switch (p) {
        case FairnessPath::Direct: return "DE";
        case FairnessPath::Indirect: return "IE";
        case FairnessPath::Spurious: return "SE";
    }
    return "DE";
}

const OutcomePredictor& Predictors::blocked(FairnessPath p) const {
    switch (p) {
        case FairnessPath::Direct: return de_blocked;
        case FairnessPath::Indirect: return ie_blocked;
        case FairnessPath::Spurious: return se_blocked;
    }
    return de_blocked;
}

Predictors train_predictors(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg,
                            std::vector<std::string>* warnings) {
    sfm.validate(data.cols());
    auto cat = [](std::initializer_list<const std::vector<VariableId>*> parts) {
        std::vector<VariableId> out;
        for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
        return out;
    };
    const std::vector<VariableId> x{sfm.x};
    Predictors p;
    p.full = fit_outcome_model(data, sfm.y, cat({&x, &sfm.z, &sfm.w}), cfg.outcome_model, warnings);
    p.de_blocked = fit_outcome_model(data, sfm.y, cat({&sfm.z, &sfm.w}), cfg.outcome_model, warnings);
    p.ie_blocked = fit_outcome_model(data, sfm.y, cat({&x, &sfm.z}), cfg.outcome_model, warnings);
    p.se_blocked = fit_outcome_model(data, sfm.y, cat({&x, &sfm.w}), cfg.outcome_model, warnings);
    return p;
}

std::pair<double, bool> cfur_ratio(double gain, double cost) {
    if (std::abs(cost) < kCfurEpsilon) return {gain / kCfurEpsilon, true};
    return {gain / cost, false};
}

namespace {

double loss(const Eigen::VectorXd& y, const Eigen::VectorXd& pred, bool binary) {
    if (!binary) return (y - pred).squaredNorm() / static_cast<double>(y.size());
    double total = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double p = std::clamp(pred(i), 1e-12, 1.0 - 1e-12);
        total -= y(i) * std::log(p) + (1.0 - y(i)) * std::log(1.0 - p);
    }
    return total / static_cast<double>(y.size());
}

double component(const Effects& e, FairnessPath p) {
    switch (p) {
        case FairnessPath::Direct: return e.ctf_de;
        case FairnessPath::Indirect: return e.ctf_ie;
        case FairnessPath::Spurious: return e.ctf_se;
    }
    return 0.0;
}

struct PathPoint {
    double c_full, c_blocked, l_full, l_blocked, gain, cost, ratio;
    bool unstable;
};

struct CfurPoint {
    std::array<PathPoint, 3> paths;
    std::vector<std::string> warnings;
};

CfurPoint cfur_point(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg) {
    CfurPoint out;
    const auto preds = train_predictors(data, sfm, cfg, &out.warnings);
    const bool binary = data.is_binary(sfm.y);
    const Eigen::VectorXd y = data.values.col(static_cast<Eigen::Index>(sfm.y));

    // The decomposition runs on predictor outputs, which are continuous; the
    // outcome scale of the original Y is kept.
    DecompConfig dc = cfg;
    dc.bootstrap_B = 0;
    dc.outcome_model = OutcomeModel::Linear;
    const double scale = binary ? 100.0 : 1.0;
    auto effects_of = [&](const Eigen::VectorXd& yhat) {
        Dataset d = data;
        d.values.col(static_cast<Eigen::Index>(sfm.y)) = yhat;
        d.kinds[sfm.y] = VariableKind::Continuous;
        Effects e = estimate_effects(d, sfm, dc).effects;
        e.tv *= scale;
        e.ctf_de *= scale;
        e.ctf_ie *= scale;
        e.ctf_se *= scale;
        return e;
    };

    const Eigen::VectorXd full_pred = preds.full.predict(data);
    const Effects full = effects_of(full_pred);
    const double l_full = loss(y, full_pred, binary);
    for (auto p : kFairnessPaths) {
        const auto& blocked = preds.blocked(p);
        PathPoint pp{};
        pp.c_full = component(full, p);
        pp.l_full = l_full;
        if (blocked.inputs == preds.full.inputs) {
            // Nothing to block: the predictors coincide.
            pp.c_blocked = pp.c_full;
            pp.l_blocked = l_full;
        } else {
            const Eigen::VectorXd bp = blocked.predict(data);
            pp.c_blocked = component(effects_of(bp), p);
            pp.l_blocked = loss(y, bp, binary);
        }
        pp.gain = std::abs(pp.c_full) - std::abs(pp.c_blocked);
        pp.cost = pp.l_blocked - pp.l_full;
        std::tie(pp.ratio, pp.unstable) = cfur_ratio(pp.gain, pp.cost);
        out.paths[static_cast<std::size_t>(p)] = pp;
    }
    return out;
}

}  // namespace

CfurResult cfur(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg) {
    cfg.validate();
    data.validate();
    CfurResult out;
    out.loss = data.is_binary(sfm.y) ? "log_loss" : "mse";
    const auto point = cfur_point(data, sfm, cfg);
    out.warnings = point.warnings;
    for (auto p : kFairnessPaths) {
        const auto& src = point.paths[static_cast<std::size_t>(p)];
        auto& dst = out.paths[static_cast<std::size_t>(p)];
        dst.path = p;
        dst.component_full = src.c_full;
        dst.component_blocked = src.c_blocked;
        dst.loss_full = src.l_full;
        dst.loss_blocked = src.l_blocked;
        dst.fairness_gain = src.gain;
        dst.utility_cost = src.cost;
        dst.ratio = src.ratio;
        dst.unstable = src.unstable;
    }

    const std::size_t B = cfg.bootstrap_B;
    out.replicates = B;
    if (B == 0) return out;
    const std::function<std::optional<CfurPoint>(std::size_t)> one = [&](std::size_t b) {
        const auto seed = replicate_seed(cfg.seed, b);
        Rng rng(seed);
        DecompConfig sub = cfg;
        sub.seed = seed;
        return std::optional<CfurPoint>(cfur_point(data.select_rows(bootstrap_rows(data.rows(), rng)), sfm, sub));
    };
    const auto reps = run_replicates(B, one);
    std::array<std::vector<double>, 3> gains, costs, ratios;
    std::size_t fallbacks = 0;
    for (const auto& r : reps) {
        if (!r) {
            ++out.failed_replicates;
            continue;
        }
        if (!r->warnings.empty()) ++fallbacks;
        for (std::size_t k = 0; k < 3; ++k) {
            gains[k].push_back(r->paths[k].gain);
            costs[k].push_back(r->paths[k].cost);
            ratios[k].push_back(r->paths[k].ratio);
            if (r->paths[k].unstable) ++out.paths[k].unstable_replicates;
        }
    }
    check_failure_rate(out.failed_replicates, B, "CFUR");
    if (fallbacks > 0)
        out.warnings.push_back("linear probability fallback used in " + std::to_string(fallbacks) + " of " +
                               std::to_string(B) + " bootstrap replicates");
    for (std::size_t k = 0; k < 3; ++k) {
        out.paths[k].replicate_gains = gains[k];
        out.paths[k].replicate_costs = costs[k];
        out.paths[k].replicate_ratios = ratios[k];
        out.paths[k].gain_bootstrap = summarize(std::move(gains[k]));
        out.paths[k].cost_bootstrap = summarize(std::move(costs[k]));
        out.paths[k].ratio_bootstrap = summarize(std::move(ratios[k]));
    }
    return out;
}

}  // namespace fairpath
