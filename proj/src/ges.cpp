#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "fairpath/discovery.hpp"
#include "fairpath/stats.hpp"

namespace fairpath {

namespace {

using Mask = std::uint64_t;

Mask mask_of(const std::vector<VariableId>& vs) {
    Mask m = 0;
    for (auto v : vs) m |= Mask{1} << v;
    return m;
}

std::vector<VariableId> members(Mask m) {
    std::vector<VariableId> out;
    while (m) {
        out.push_back(static_cast<VariableId>(std::countr_zero(m)));
        m &= m - 1;
    }
    return out;
}

class ScoreCache {
public:
    explicit ScoreCache(const Dataset& data) : data_(data) {}

    double local(VariableId node, Mask parents) {
        const auto key = std::pair{node, parents};
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const auto pa = members(parents);
        const double s = bic_local_score(data_, node, pa).score;
        cache_.emplace(key, s);
        return s;
    }

    double total(const Dag& dag) {
        double s = 0.0;
        for (VariableId v = 0; v < dag.size(); ++v) s += local(v, mask_of(dag.parents(v)));
        return s;
    }

private:
    struct KeyHash {
        std::size_t operator()(const std::pair<VariableId, Mask>& k) const {
            return std::hash<Mask>{}(k.second * 0x9e3779b97f4a7c15ULL ^ k.first);
        }
    };
    const Dataset& data_;
    std::unordered_map<std::pair<VariableId, Mask>, double, KeyHash> cache_;
};

bool is_clique(const MixedGraph& g, Mask m) {
    const auto vs = members(m);
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j)
            if (!g.adjacent(vs[i], vs[j])) return false;
    return true;
}

// Is there a path from `from` to `to` made of directed (forward) and undirected
// edges that avoids every node in `blocked`?
bool semi_directed_path(const MixedGraph& g, VariableId from, VariableId to, Mask blocked) {
    const std::size_t d = g.size();
    std::vector<char> seen(d, 0);
    std::vector<VariableId> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (VariableId w = 0; w < d; ++w) {
            if (seen[w] || (blocked >> w & 1)) continue;
            if (!(g.is_directed(u, w) || g.is_undirected(u, w))) continue;
            if (w == to) return true;
            seen[w] = 1;
            stack.push_back(w);
        }
    }
    return false;
}

struct Move {
    double gain = 0.0;
    VariableId x = 0, y = 0;
    Mask set = 0;
    bool valid = false;
};

// Strictly better gain wins; equal gains go to the lexicographically smallest (x, y, set).
bool better(const Move& cand, const Move& best) {
    if (!best.valid) return true;
    if (cand.gain != best.gain) return cand.gain > best.gain;
    if (cand.x != best.x) return cand.x < best.x;
    if (cand.y != best.y) return cand.y < best.y;
    return members(cand.set) < members(best.set);
}

MixedGraph recomplete(const MixedGraph& pdag) { return cpdag_of(consistent_extension(pdag)); }

Move best_insert(const MixedGraph& g, ScoreCache& scores) {
    const std::size_t d = g.size();
    Move best;
    for (VariableId x = 0; x < d; ++x)
        for (VariableId y = 0; y < d; ++y) {
            if (x == y || g.adjacent(x, y)) continue;
            Mask na = 0, t0 = 0;
            for (auto n : g.neighbors(y)) (g.adjacent(n, x) ? na : t0) |= Mask{1} << n;
            const Mask pa = mask_of(g.parents(y));
            // Enumerate all subsets T of t0.
            for (Mask t = 0;; t = (t - t0) & t0) {
                const Mask nat = na | t;
                if (is_clique(g, nat) && !semi_directed_path(g, y, x, nat)) {
                    const double gain =
                        scores.local(y, nat | pa | (Mask{1} << x)) - scores.local(y, nat | pa);
                    Move m{gain, x, y, t, true};
                    if (better(m, best)) best = m;
                }
                if (t == t0) break;
            }
        }
    return best;
}

Move best_delete(const MixedGraph& g, ScoreCache& scores) {
    const std::size_t d = g.size();
    Move best;
    for (VariableId x = 0; x < d; ++x)
        for (VariableId y = 0; y < d; ++y) {
            if (x == y || !(g.is_directed(x, y) || g.is_undirected(x, y))) continue;
            Mask na = 0;
            for (auto n : g.neighbors(y))
                if (n != x && g.adjacent(n, x)) na |= Mask{1} << n;
            const Mask pa = mask_of(g.parents(y));
            const Mask xbit = Mask{1} << x;
            for (Mask h = 0;; h = (h - na) & na) {
                const Mask rest = na & ~h;
                if (is_clique(g, rest)) {
                    const double gain = scores.local(y, (rest | pa) & ~xbit) - scores.local(y, rest | pa | xbit);
                    Move m{gain, x, y, h, true};
                    if (better(m, best)) best = m;
                }
                if (h == na) break;
            }
        }
    return best;
}

}  // namespace

double bic_graph_score(const Dataset& data, const Dag& dag) {
    ScoreCache scores(data);
    return scores.total(dag);
}

GesResult ges(const Dataset& data, const DiscoveryConfig& cfg) {
    cfg.validate();
    data.validate();
    const std::size_t d = data.cols();
    if (d > 64) throw std::invalid_argument("ges supports at most 64 variables");
    if (data.rows() < 4) throw std::invalid_argument("ges needs at least 4 samples");

    ScoreCache scores(data);
    MixedGraph g(data.names);
    GesResult out;
    out.empty_score = scores.total(g);
    double total = out.empty_score;
    constexpr double kMinGain = 1e-10;

    while (true) {
        const Move m = best_insert(g, scores);
        if (!m.valid || m.gain <= kMinGain) break;
        g.add_directed(m.x, m.y);
        for (auto t : members(m.set)) g.add_directed(t, m.y);
        g = recomplete(g);
        total += m.gain;
        out.forward_trace.push_back(total);
    }
    while (true) {
        const Move m = best_delete(g, scores);
        if (!m.valid || m.gain <= kMinGain) break;
        g.remove_edge(m.x, m.y);
        for (auto h : members(m.set)) {
            g.add_directed(m.y, h);
            if (g.is_undirected(m.x, h)) g.add_directed(m.x, h);
        }
        g = recomplete(g);
        total += m.gain;
        out.backward_trace.push_back(total);
    }
    out.graph = g;
    out.score = scores.total(consistent_extension(g));
    return out;
}

}  // namespace fairpath
