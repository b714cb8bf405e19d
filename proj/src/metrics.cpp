#include "fairpath/metrics.hpp"

#include <set>
#include <stdexcept>

namespace fairpath {

std::string_view to_string(CompareMode mode) {
    return mode == CompareMode::Adjacency ? "adjacency" : "orientation";
}

CompareMode parse_compare_mode(std::string_view text) {
    const auto key = normalize_name(text);
    if (key == "adjacency") return CompareMode::Adjacency;
    if (key == "orientation") return CompareMode::Orientation;
    throw std::invalid_argument("unknown compare mode '" + std::string(text) + "'");
}

namespace {

MixedGraph align(const Dag& truth, const MixedGraph& learned) {
    std::set<std::string> t, l;
    for (const auto& n : truth.names()) t.insert(normalize_name(n));
    for (const auto& n : learned.names()) l.insert(normalize_name(n));
    if (t != l) {
        std::string msg = "variable sets differ;";
        for (const auto& n : truth.names())
            if (!l.contains(normalize_name(n))) msg += " missing from learned: " + n + ";";
        for (const auto& n : learned.names())
            if (!t.contains(normalize_name(n))) msg += " not in truth: " + n + ";";
        throw std::invalid_argument(msg);
    }
    return learned.reindexed(truth.names());
}

double ratio(std::size_t num, std::size_t den, double empty) {
    return den == 0 ? empty : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

StructScore compare(const Dag& truth, const MixedGraph& learned_in, CompareMode mode, double misorientation_cost) {
    require_dag(truth, "ground-truth graph");
    const MixedGraph learned = align(truth, learned_in);
    const std::size_t d = truth.size();

    StructScore s;
    s.mode = mode;
    auto& c = s.counts;
    double shd = 0.0;
    for (VariableId a = 0; a < d; ++a)
        for (VariableId b = a + 1; b < d; ++b) {
            const bool in_truth = truth.adjacent(a, b);
            const bool in_learned = learned.adjacent(a, b);
            if (!in_truth && !in_learned) {
                ++c.tn;
                continue;
            }
            if (!in_truth) {
                ++c.fp;
                shd += 1.0;
                continue;
            }
            if (!in_learned) {
                ++c.fn;
                shd += 1.0;
                continue;
            }
            if (mode == CompareMode::Adjacency) {
                ++c.tp;
                continue;
            }
            const auto [from, to] = truth.is_directed(a, b) ? std::pair{a, b} : std::pair{b, a};
            if (learned.is_directed(from, to)) {
                ++c.tp;
            } else if (learned.is_directed(to, from)) {
                ++c.fp;
                ++c.fn;
                shd += 1.0;
            } else {
                ++c.fn;
                shd += misorientation_cost;
            }
        }
    s.shd = shd;
    s.f1 = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, 1.0);
    s.fdr = ratio(c.fp, c.tp + c.fp, 0.0);
    s.tpr = ratio(c.tp, c.tp + c.fn, 1.0);
    s.fpr = ratio(c.fp, c.fp + c.tn, 0.0);
    return s;
}

BootstrapStructScore bootstrap_compare(const Dag& truth, const Dataset& data, Algorithm algo,
                                       const DiscoveryConfig& cfg, std::size_t replicates, std::uint64_t seed,
                                       CompareMode mode) {
    if (replicates < 2) throw std::invalid_argument("bootstrap_compare needs at least 2 replicates");
    require_dag(truth, "ground-truth graph");
    cfg.validate();

    const auto results = run_replicates<StructScore>(replicates, [&](std::size_t b) -> std::optional<StructScore> {
        Rng rng(replicate_seed(seed, b));
        const Dataset resample = data.select_rows(bootstrap_rows(data.rows(), rng));
        return compare(truth, discover(resample, algo, cfg), mode);
    });

    std::vector<double> f1, shd, fdr, tpr, fpr;
    BootstrapStructScore out;
    out.replicates = replicates;
    for (const auto& r : results) {
        if (!r) {
            ++out.skipped;
            continue;
        }
        f1.push_back(r->f1);
        shd.push_back(r->shd);
        fdr.push_back(r->fdr);
        tpr.push_back(r->tpr);
        fpr.push_back(r->fpr);
        out.replicate_scores.push_back(*r);
    }
    check_failure_rate(out.skipped, replicates, "bootstrap_compare(" + std::string(to_string(algo)) + ")");
    out.f1 = summarize(f1);
    out.shd = summarize(shd);
    out.fdr = summarize(fdr);
    out.tpr = summarize(tpr);
    out.fpr = summarize(fpr);
    return out;
}

}  // namespace fairpath
