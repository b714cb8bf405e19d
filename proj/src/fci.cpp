#include <algorithm>
#include <deque>
#include <stdexcept>

#include "fairpath/discovery.hpp"
#include "fairpath/stats.hpp"
#include "subsets.hpp"

namespace fairpath {

namespace {

using M = EndpointMark;

void reset_to_circles(MixedGraph& g) {
    for (const auto& e : g.edges()) g.set_edge(e.a, e.b, M::Circle, M::Circle);
}

// R0: unshielded a *-* c *-* b with c outside sepset(a, b) becomes a *-> c <-* b.
void orient_colliders(MixedGraph& g, const SepsetMap& sepsets) {
    const MixedGraph skeleton = g;
    for (VariableId c = 0; c < g.size(); ++c) {
        const auto adj = skeleton.adjacents(c);
        for (std::size_t x = 0; x < adj.size(); ++x)
            for (std::size_t y = x + 1; y < adj.size(); ++y) {
                const VariableId a = adj[x], b = adj[y];
                if (skeleton.adjacent(a, b) || sepsets.contains(a, b, c)) continue;
                g.set_mark(a, c, M::Arrow);
                g.set_mark(b, c, M::Arrow);
            }
    }
}

bool is_circle(const MixedGraph& g, VariableId at_from, VariableId at) { return g.mark(at_from, at) == M::Circle; }

// R1: a *-> b o-* c, a !~ c  =>  b -> c
bool rule1(MixedGraph& g) {
    bool changed = false;
    const std::size_t d = g.size();
    for (VariableId b = 0; b < d; ++b)
        for (VariableId c : g.adjacents(b)) {
            if (!is_circle(g, c, b)) continue;
            for (VariableId a : g.adjacents(b)) {
                if (a == c || g.adjacent(a, c) || !g.has_arrow_at(a, b)) continue;
                g.set_edge(b, c, M::Tail, M::Arrow);
                changed = true;
                break;
            }
        }
    return changed;
}

// R2: a -> b *-> c or a *-> b -> c, with a *-o c  =>  a *-> c
bool rule2(MixedGraph& g) {
    bool changed = false;
    const std::size_t d = g.size();
    for (VariableId a = 0; a < d; ++a)
        for (VariableId c : g.adjacents(a)) {
            if (!is_circle(g, a, c)) continue;
            for (VariableId b : g.adjacents(a)) {
                if (b == c || !g.adjacent(b, c)) continue;
                const bool first = g.is_directed(a, b) && g.has_arrow_at(b, c);
                const bool second = g.has_arrow_at(a, b) && g.is_directed(b, c);
                if (first || second) {
                    g.set_mark(a, c, M::Arrow);
                    changed = true;
                    break;
                }
            }
        }
    return changed;
}

// R3: a *-> b <-* c, a *-o d o-* c, a !~ c, d *-o b  =>  d *-> b
bool rule3(MixedGraph& g) {
    bool changed = false;
    const std::size_t d = g.size();
    for (VariableId b = 0; b < d; ++b)
        for (VariableId dd : g.adjacents(b)) {
            if (!is_circle(g, dd, b)) continue;
            const auto adj = g.adjacents(b);
            bool fire = false;
            for (std::size_t x = 0; x < adj.size() && !fire; ++x)
                for (std::size_t y = x + 1; y < adj.size() && !fire; ++y) {
                    const VariableId a = adj[x], c = adj[y];
                    if (a == dd || c == dd || g.adjacent(a, c)) continue;
                    if (!g.has_arrow_at(a, b) || !g.has_arrow_at(c, b)) continue;
                    if (!g.adjacent(a, dd) || !g.adjacent(c, dd)) continue;
                    if (is_circle(g, a, dd) && is_circle(g, c, dd)) fire = true;
                }
            if (fire) {
                g.set_mark(dd, b, M::Arrow);
                changed = true;
            }
        }
    return changed;
}

// R4: discriminating path <d, ..., a, b, c> for b with b o-* c.
bool rule4(MixedGraph& g, const SepsetMap& sepsets) {
    const std::size_t n = g.size();
    for (VariableId b = 0; b < n; ++b)
        for (VariableId c : g.adjacents(b)) {
            if (!is_circle(g, c, b)) continue;
            for (VariableId a : g.adjacents(b)) {
                if (a == c || !g.is_directed(a, c) || !g.has_arrow_at(b, a)) continue;
                // Walk back from a through colliders that are parents of c.
                std::vector<char> seen(n, 0);
                seen[a] = seen[b] = seen[c] = 1;
                std::deque<VariableId> queue{a};
                std::optional<VariableId> found;
                while (!queue.empty() && !found) {
                    const VariableId v = queue.front();
                    queue.pop_front();
                    for (VariableId u : g.adjacents(v)) {
                        if (seen[u] || !g.has_arrow_at(u, v)) continue;
                        if (!g.adjacent(u, c)) {
                            found = u;
                            break;
                        }
                        if (g.is_directed(u, c) && g.has_arrow_at(v, u)) {
                            seen[u] = 1;
                            queue.push_back(u);
                        }
                    }
                }
                if (!found) continue;
                if (sepsets.contains(*found, c, b)) {
                    g.set_edge(b, c, M::Tail, M::Arrow);
                } else {
                    g.set_mark(a, b, M::Arrow);
                    g.set_mark(c, b, M::Arrow);
                    g.set_mark(b, c, M::Arrow);
                }
                return true;
            }
        }
    return false;
}

}  // namespace

std::vector<std::vector<VariableId>> possible_dsep(const MixedGraph& pag) {
    const std::size_t d = pag.size();
    std::vector<std::vector<VariableId>> out(d);
    for (VariableId a = 0; a < d; ++a) {
        std::vector<char> in_set(d, 0);
        std::vector<char> visited(d * d, 0);  // directed edge states (prev, cur)
        std::deque<std::pair<VariableId, VariableId>> queue;
        for (VariableId w : pag.adjacents(a)) {
            visited[a * d + w] = 1;
            in_set[w] = 1;
            queue.emplace_back(a, w);
        }
        while (!queue.empty()) {
            const auto [x, y] = queue.front();
            queue.pop_front();
            for (VariableId z : pag.adjacents(y)) {
                if (z == x || visited[y * d + z]) continue;
                const bool collider = pag.has_arrow_at(x, y) && pag.has_arrow_at(z, y);
                if (!collider && !pag.adjacent(x, z)) continue;
                visited[y * d + z] = 1;
                if (z != a) in_set[z] = 1;
                queue.emplace_back(y, z);
            }
        }
        for (VariableId v = 0; v < d; ++v)
            if (in_set[v] && v != a) out[a].push_back(v);
    }
    return out;
}

FciResult fci(const Dataset& data, const DiscoveryConfig& cfg) {
    cfg.validate();
    data.validate();
    const FisherZ test(data, cfg.alpha);
    auto skel = learn_skeleton(data, test, cfg.max_cond_set);
    MixedGraph g = skel.graph;
    SepsetMap sepsets = std::move(skel.sepsets);

    reset_to_circles(g);
    orient_colliders(g, sepsets);

    // Possible-D-SEP pruning on frozen sets.
    const auto pds = possible_dsep(g);
    const MixedGraph before = g;
    for (const auto& e : before.edges()) {
        bool removed = false;
        for (const VariableId from : {e.a, e.b}) {
            if (removed) break;
            const VariableId other = from == e.a ? e.b : e.a;
            std::vector<VariableId> pool;
            for (auto v : pds[from])
                if (v != other) pool.push_back(v);
            std::size_t cap = pool.size();
            if (cfg.max_cond_set) cap = std::min(cap, *cfg.max_cond_set);
            for (std::size_t k = 1; k <= cap && !removed; ++k) {
                if (test.samples() - static_cast<Eigen::Index>(k) - 3 < 1) break;
                removed = detail::for_each_subset(pool, k, [&](const std::vector<VariableId>& s) {
                    TestResult r;
                    try {
                        r = test.test(e.a, e.b, s);
                    } catch (const std::domain_error&) {
                        return false;
                    }
                    if (!r.independent) return false;
                    g.remove_edge(e.a, e.b);
                    sepsets.set(e.a, e.b, s);
                    return true;
                });
            }
        }
    }

    reset_to_circles(g);
    orient_colliders(g, sepsets);
    bool changed = true;
    while (changed) {
        changed = rule1(g);
        changed = rule2(g) || changed;
        changed = rule3(g) || changed;
        changed = rule4(g, sepsets) || changed;
    }
    return {std::move(g), std::move(sepsets)};
}

}  // namespace fairpath
