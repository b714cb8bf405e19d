#include "fairpath/fairness.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "fairpath/rng.hpp"
#include "fairpath/stats.hpp"

namespace fairpath {

std::string_view to_string(OutcomeModel m) {
    switch (m) {
        case OutcomeModel::Auto: return "auto";
        case OutcomeModel::Linear: return "linear";
        case OutcomeModel::Logistic: return "logistic";
    }
    return "auto";
}

OutcomeModel parse_outcome_model(std::string_view text) {
    const auto key = normalize_name(text);
    if (key == "auto") return OutcomeModel::Auto;
    if (key == "linear") return OutcomeModel::Linear;
    if (key == "logistic") return OutcomeModel::Logistic;
    throw std::invalid_argument("unknown outcome model '" + std::string(text) + "'");
}

std::string_view to_string(EffectKind e) { return e == EffectKind::Indirect ? "IE" : "SE"; }

EffectKind parse_effect_kind(std::string_view text) {
    const auto key = normalize_name(text);
    if (key == "ie" || key == "indirect") return EffectKind::Indirect;
    if (key == "se" || key == "spurious") return EffectKind::Spurious;
    throw std::invalid_argument("unknown effect '" + std::string(text) + "' (expected IE or SE)");
}

void DecompConfig::validate() const {
    auto level_ok = [](double v) { return v == 0.0 || v == 1.0; };
    if (!level_ok(x0) || !level_ok(x1)) throw std::invalid_argument("protected levels x0/x1 must be 0 or 1");
    if (x0 == x1) throw std::invalid_argument("protected levels x0 and x1 must differ");
    if (mc_draws < 1) throw std::invalid_argument("mc_draws must be >= 1");
}

Eigen::VectorXd OutcomePredictor::predict(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    Eigen::VectorXd eta = (x * coefficients).array() + intercept;
    if (logistic) eta = eta.unaryExpr([](double t) { return sigmoid(t); });
    return eta;
}

Eigen::VectorXd OutcomePredictor::predict(const Dataset& data) const { return predict(gather_columns(data, inputs)); }

OutcomePredictor fit_outcome_model(const Dataset& data, VariableId target, std::vector<VariableId> inputs,
                                   OutcomeModel model, std::vector<std::string>* warnings) {
    OutcomePredictor out;
    out.inputs = std::move(inputs);
    if (model == OutcomeModel::Auto) model = data.is_binary(target) ? OutcomeModel::Logistic : OutcomeModel::Linear;
    if (model == OutcomeModel::Logistic) {
        std::string problem;
        try {
            auto fit = logistic_fit(data, target, out.inputs);
            if (fit.converged) {
                out.logistic = true;
                out.coefficients = std::move(fit.coefficients);
                out.intercept = fit.intercept;
                return out;
            }
            problem = fit.separation ? "separation" : "no convergence in " + std::to_string(fit.iterations) + " iterations";
        } catch (const std::invalid_argument& e) {
            problem = e.what();
        }
        if (warnings)
            warnings->push_back("logistic outcome model for " + data.names.at(target) + " failed (" + problem +
                                "); using a linear probability model");
    }
    auto fit = ols_fit(data, target, out.inputs);
    out.coefficients = std::move(fit.coefficients);
    out.intercept = fit.intercept;
    return out;
}

namespace {

double column_mean(const Dataset& data, VariableId col, const std::vector<Eigen::Index>& rows) {
    double s = 0.0;
    for (auto r : rows) s += data.values(r, static_cast<Eigen::Index>(col));
    return s / static_cast<double>(rows.size());
}

// Shared state of one decomposition: group memberships, the outcome model
// over [X, Z, W] and sequential mediator models.
struct Fitted {
    const Dataset& data;
    const SfmAssignment& sfm;
    const DecompConfig& cfg;
    std::vector<Eigen::Index> g0, g1;
    double scale = 1.0;
    bool saturated = false;
    OutcomePredictor mu;
    Eigen::MatrixXd base0;  // x0-group rows of [X, Z, W]
    std::vector<OlsFit> mediators;
    std::vector<Eigen::VectorXd> residuals;
    std::vector<std::string> warnings;

    Fitted(const Dataset& d, const SfmAssignment& s, const DecompConfig& c) : data(d), sfm(s), cfg(c) {
        cfg.validate();
        data.validate();
        sfm.validate(data.cols());
        if (!data.is_binary(sfm.x))
            throw std::invalid_argument("protected attribute " + data.names[sfm.x] + " must be binary");
        const auto xcol = data.values.col(static_cast<Eigen::Index>(sfm.x));
        for (Eigen::Index i = 0; i < data.rows(); ++i) (xcol(i) == cfg.x0 ? g0 : g1).push_back(i);
        if (g0.empty() || g1.empty())
            throw std::invalid_argument("protected attribute " + data.names[sfm.x] + " level " +
                                        std::to_string(static_cast<int>(g0.empty() ? cfg.x0 : cfg.x1)) +
                                        " has no rows");
        if (data.is_binary(sfm.y)) scale = 100.0;
    }

    std::vector<VariableId> inputs() const {
        std::vector<VariableId> cols{sfm.x};
        cols.insert(cols.end(), sfm.z.begin(), sfm.z.end());
        cols.insert(cols.end(), sfm.w.begin(), sfm.w.end());
        return cols;
    }

    Eigen::Index z_offset() const { return 1; }
    Eigen::Index w_offset() const { return 1 + static_cast<Eigen::Index>(sfm.z.size()); }

    void fit_models() {
        saturated = sfm.w.empty() && sfm.z.empty();
        if (saturated) return;
        const auto cols = inputs();
        mu = fit_outcome_model(data, sfm.y, cols, cfg.outcome_model, &warnings);
        const Eigen::MatrixXd all = gather_columns(data, cols);
        base0 = all(g0, Eigen::all);
        for (std::size_t j = 0; j < sfm.w.size(); ++j) {
            const auto width = w_offset() + static_cast<Eigen::Index>(j);
            auto fit = ols_fit(all.leftCols(width), all.col(w_offset() + static_cast<Eigen::Index>(j)));
            residuals.push_back(all.col(w_offset() + static_cast<Eigen::Index>(j)) - fit.predict(all.leftCols(width)));
            mediators.push_back(std::move(fit));
        }
    }

    Eigen::MatrixXd at_x1(Eigen::MatrixXd m) const {
        m.col(0).setConstant(cfg.x1);
        return m;
    }

    // Mean over x0 rows and MC draws of mu evaluated on `rows` after the
    // mediators in `redraw` are replaced by counterfactual draws at X = x1.
    // A full redraw propagates the draws through later mediator models;
    // a single-mediator redraw keeps the observed values of the others.
    double counterfactual_mean(const std::vector<std::size_t>& redraw) const {
        Rng rng(derive_seed(cfg.seed, "mediators"));
        const Eigen::MatrixXd start = at_x1(base0);
        const Eigen::Index n0 = start.rows();
        const std::size_t nres = static_cast<std::size_t>(data.rows());
        double total = 0.0;
        for (std::size_t m = 0; m < cfg.mc_draws; ++m) {
            Eigen::MatrixXd cur = start;
            for (std::size_t j : redraw) {
                const auto col = w_offset() + static_cast<Eigen::Index>(j);
                Eigen::VectorXd v = mediators[j].predict(cur.leftCols(col));
                for (Eigen::Index i = 0; i < n0; ++i) v(i) += residuals[j](static_cast<Eigen::Index>(rng.index(nres)));
                cur.col(col) = v;
            }
            total += mu.predict(cur).mean();
        }
        return total / static_cast<double>(cfg.mc_draws);
    }

    Effects effects() const {
        const double e0 = column_mean(data, sfm.y, g0);
        const double d = column_mean(data, sfm.y, g1);
        double a, b, c;
        if (saturated) {
            // Group means are the fitted values of a model in X alone.
            a = d;
            b = e0;
            c = a;
        } else {
            a = mu.predict(at_x1(base0)).mean();
            Eigen::MatrixXd m0 = base0;
            m0.col(0).setConstant(cfg.x0);
            b = mu.predict(m0).mean();
            if (sfm.w.empty()) {
                c = a;
            } else {
                std::vector<std::size_t> all(sfm.w.size());
                for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
                c = counterfactual_mean(all);
            }
        }
        Effects e;
        e.tv = scale * (d - e0);
        e.ctf_de = scale * (a - b);
        e.ctf_ie = scale * (a - c);
        e.ctf_se = scale * ((c - d) + (e0 - b));
        return e;
    }

    Contribution indirect(std::size_t j) const {
        const double a = mu.predict(at_x1(base0)).mean();
        return {EffectKind::Indirect, data.names[sfm.w[j]], scale * (a - counterfactual_mean({j}))};
    }

    Contribution spurious(std::size_t j) const {
        const Eigen::MatrixXd m1 = at_x1(base0);
        const double delta = column_mean(data, sfm.z[j], g1) - column_mean(data, sfm.z[j], g0);
        Eigen::MatrixXd shifted = m1;
        shifted.col(z_offset() + static_cast<Eigen::Index>(j)).array() += delta;
        return {EffectKind::Spurious, data.names[sfm.z[j]], scale * (mu.predict(m1).mean() - mu.predict(shifted).mean())};
    }
};

}  // namespace

double tv(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg) {
    const Fitted f(data, sfm, cfg);
    return f.scale * (column_mean(data, sfm.y, f.g1) - column_mean(data, sfm.y, f.g0));
}

PointEstimate estimate_effects(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg) {
    Fitted f(data, sfm, cfg);
    f.fit_models();
    PointEstimate out;
    out.effects = f.effects();
    out.model = f.saturated ? "saturated" : (f.mu.logistic ? "logistic" : "linear");
    out.warnings = std::move(f.warnings);
    return out;
}

std::vector<Contribution> contributions(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg,
                                        EffectKind effect) {
    const auto& set = effect == EffectKind::Indirect ? sfm.w : sfm.z;
    if (set.empty())
        throw std::invalid_argument(std::string("no ") + (effect == EffectKind::Indirect ? "mediators" : "confounders") +
                                    " for " + std::string(to_string(effect)) + " contributions");
    Fitted f(data, sfm, cfg);
    f.fit_models();
    std::vector<Contribution> out;
    for (std::size_t j = 0; j < set.size(); ++j)
        out.push_back(effect == EffectKind::Indirect ? f.indirect(j) : f.spurious(j));
    return out;
}

Contribution contribution(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg, EffectKind effect,
                          std::string_view variable) {
    const auto& set = effect == EffectKind::Indirect ? sfm.w : sfm.z;
    const auto v = data.index_of(variable);
    const auto it = std::find(set.begin(), set.end(), v);
    if (it == set.end())
        throw std::invalid_argument(data.names[v] + " is not a " +
                                    (effect == EffectKind::Indirect ? "mediator" : "confounder"));
    Fitted f(data, sfm, cfg);
    f.fit_models();
    const auto j = static_cast<std::size_t>(it - set.begin());
    return effect == EffectKind::Indirect ? f.indirect(j) : f.spurious(j);
}

DecompResult decompose(const Dataset& data, const SfmAssignment& sfm, const DecompConfig& cfg) {
    DecompResult out;
    {
        Fitted f(data, sfm, cfg);
        f.fit_models();
        out.point = f.effects();
        out.model = f.saturated ? "saturated" : (f.mu.logistic ? "logistic" : "linear");
        out.units = f.scale == 100.0 ? "percentage_points" : "outcome";
        out.warnings = std::move(f.warnings);
        if (!f.saturated) {
            for (std::size_t j = 0; j < sfm.w.size(); ++j) out.contributions.push_back(f.indirect(j));
            for (std::size_t j = 0; j < sfm.z.size(); ++j) out.contributions.push_back(f.spurious(j));
        }
    }

    const std::size_t B = cfg.bootstrap_B;
    out.replicates = B;
    if (B == 0) return out;
    const std::function<std::optional<PointEstimate>(std::size_t)> one = [&](std::size_t b) {
        const auto seed = replicate_seed(cfg.seed, b);
        Rng rng(seed);
        DecompConfig sub = cfg;
        sub.seed = seed;
        return std::optional<PointEstimate>(estimate_effects(data.select_rows(bootstrap_rows(data.rows(), rng)), sfm, sub));
    };
    const auto reps = run_replicates(B, one);
    std::vector<double> tvs, des, ies, ses;
    std::size_t fallbacks = 0;
    for (const auto& r : reps) {
        if (!r) {
            ++out.failed_replicates;
            continue;
        }
        tvs.push_back(r->effects.tv);
        des.push_back(r->effects.ctf_de);
        ies.push_back(r->effects.ctf_ie);
        ses.push_back(r->effects.ctf_se);
        out.replicate_effects.push_back(r->effects);
        if (!r->warnings.empty()) ++fallbacks;
    }
    check_failure_rate(out.failed_replicates, B, "fairness decomposition");
    if (fallbacks > 0)
        out.warnings.push_back("linear probability fallback used in " + std::to_string(fallbacks) + " of " +
                               std::to_string(B) + " bootstrap replicates");
    out.tv = summarize(std::move(tvs));
    out.ctf_de = summarize(std::move(des));
    out.ctf_ie = summarize(std::move(ies));
    out.ctf_se = summarize(std::move(ses));
    return out;
}

}  // namespace fairpath
