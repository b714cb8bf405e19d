#include <algorithm>
#include <stdexcept>

#include "fairpath/discovery.hpp"
#include "fairpath/stats.hpp"
#include "subsets.hpp"

namespace fairpath {

void DiscoveryConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (!(notears.lambda >= 0.0)) throw std::invalid_argument("notears lambda must be >= 0");
    if (!(notears.threshold >= 0.0)) throw std::invalid_argument("notears threshold must be >= 0");
    if (notears.max_dual_iters < 1) throw std::invalid_argument("notears max_dual_iters must be >= 1");
}

void SepsetMap::set(VariableId a, VariableId b, std::vector<VariableId> sepset) {
    std::sort(sepset.begin(), sepset.end());
    sets_[std::minmax(a, b)] = std::move(sepset);
}

const std::vector<VariableId>* SepsetMap::find(VariableId a, VariableId b) const {
    auto it = sets_.find(std::minmax(a, b));
    return it == sets_.end() ? nullptr : &it->second;
}

bool SepsetMap::contains(VariableId a, VariableId b, VariableId v) const {
    const auto* s = find(a, b);
    return s && std::binary_search(s->begin(), s->end(), v);
}

SkeletonResult learn_skeleton(const Dataset& data, const FisherZ& test, std::optional<std::size_t> max_cond_set) {
    const std::size_t d = data.cols();
    SkeletonResult out{MixedGraph(data.names), {}};
    MixedGraph& g = out.graph;
    for (VariableId i = 0; i < d; ++i)
        for (VariableId j = i + 1; j < d; ++j) g.add_undirected(i, j);

    for (std::size_t level = 0;; ++level) {
        if (max_cond_set && level > *max_cond_set) break;
        if (test.samples() - static_cast<Eigen::Index>(level) - 3 < 1) break;

        std::vector<std::vector<VariableId>> frozen(d);
        bool any_candidate = false;
        for (VariableId i = 0; i < d; ++i) {
            frozen[i] = g.adjacents(i);
            if (frozen[i].size() > level) any_candidate = true;
        }
        if (!any_candidate) break;

        for (VariableId i = 0; i < d; ++i)
            for (VariableId j : frozen[i]) {
                if (!g.adjacent(i, j)) continue;
                std::vector<VariableId> pool;
                for (auto k : frozen[i])
                    if (k != j) pool.push_back(k);
                detail::for_each_subset(pool, level, [&](const std::vector<VariableId>& s) {
                    TestResult r;
                    try {
                        r = test.test(i, j, s);
                    } catch (const std::domain_error&) {
                        return false;  // collinear conditioning set: treated as dependent
                    }
                    if (!r.independent) return false;
                    g.remove_edge(i, j);
                    out.sepsets.set(i, j, s);
                    return true;
                });
            }
    }
    return out;
}

PcResult pc(const Dataset& data, const DiscoveryConfig& cfg) {
    cfg.validate();
    data.validate();
    const FisherZ test(data, cfg.alpha);
    auto skel = learn_skeleton(data, test, cfg.max_cond_set);
    MixedGraph g = skel.graph;
    const std::size_t d = g.size();

    // Unshielded colliders a -> c <- b with c outside sepset(a, b).
    for (VariableId c = 0; c < d; ++c) {
        const auto adj = skel.graph.adjacents(c);
        for (std::size_t x = 0; x < adj.size(); ++x)
            for (std::size_t y = x + 1; y < adj.size(); ++y) {
                const VariableId a = adj[x], b = adj[y];
                if (skel.graph.adjacent(a, b) || skel.sepsets.contains(a, b, c)) continue;
                g.add_directed(a, c);
                g.add_directed(b, c);
            }
    }
    return {apply_meek_rules(std::move(g)), std::move(skel.sepsets)};
}

}  // namespace fairpath
