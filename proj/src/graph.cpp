#include "fairpath/graph.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace fairpath {

namespace {

constexpr std::uint8_t encode(EndpointMark m) { return static_cast<std::uint8_t>(m) + 1; }
constexpr EndpointMark decode(std::uint8_t v) { return static_cast<EndpointMark>(v - 1); }

std::vector<VariableId> reach(const MixedGraph& g, VariableId start, bool forward) {
    const std::size_t d = g.size();
    std::vector<char> seen(d, 0);
    std::vector<VariableId> stack{start};
    while (!stack.empty()) {
        const VariableId u = stack.back();
        stack.pop_back();
        for (VariableId w = 0; w < d; ++w) {
            if (seen[w] || w == start) continue;
            const bool step = forward ? g.is_directed(u, w) : g.is_directed(w, u);
            if (step) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    std::vector<VariableId> out;
    for (VariableId w = 0; w < d; ++w)
        if (seen[w]) out.push_back(w);
    return out;
}

}  // namespace

std::string normalize_name(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (unsigned char c : name) {
        if (std::isspace(c) || c == '_') continue;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

MixedGraph::MixedGraph(std::vector<std::string> names)
    : names_(std::move(names)), marks_(names_.size() * names_.size(), 0) {
    for (std::size_t i = 0; i < names_.size(); ++i)
        for (std::size_t j = i + 1; j < names_.size(); ++j)
            if (normalize_name(names_[i]) == normalize_name(names_[j]))
                throw std::invalid_argument("duplicate variable name: " + names_[j]);
}

void MixedGraph::check(VariableId v) const {
    if (v >= names_.size())
        throw std::out_of_range("variable index " + std::to_string(v) + " out of range (" +
                                std::to_string(names_.size()) + " variables)");
}

const std::string& MixedGraph::name(VariableId v) const {
    check(v);
    return names_[v];
}

std::optional<VariableId> MixedGraph::find(std::string_view name) const {
    const auto key = normalize_name(name);
    for (VariableId i = 0; i < names_.size(); ++i)
        if (normalize_name(names_[i]) == key) return i;
    return std::nullopt;
}

VariableId MixedGraph::index_of(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw std::invalid_argument("unknown variable: " + std::string(name));
}

bool MixedGraph::adjacent(VariableId i, VariableId j) const {
    check(i);
    check(j);
    return raw(i, j) != 0;
}

std::optional<EndpointMark> MixedGraph::mark(VariableId i, VariableId j) const {
    check(i);
    check(j);
    const auto v = raw(i, j);
    if (v == 0) return std::nullopt;
    return decode(v);
}

void MixedGraph::set_edge(VariableId i, VariableId j, EndpointMark at_i, EndpointMark at_j) {
    check(i);
    check(j);
    if (i == j) throw std::invalid_argument("self-loop on " + names_[i]);
    raw(i, j) = encode(at_j);
    raw(j, i) = encode(at_i);
}

void MixedGraph::set_mark(VariableId i, VariableId j, EndpointMark at_j) {
    if (!adjacent(i, j))
        throw std::logic_error("set_mark on missing edge " + names_[i] + " - " + names_[j]);
    raw(i, j) = encode(at_j);
}

void MixedGraph::remove_edge(VariableId i, VariableId j) {
    check(i);
    check(j);
    raw(i, j) = 0;
    raw(j, i) = 0;
}

bool MixedGraph::is_directed(VariableId i, VariableId j) const {
    return raw(i, j) == encode(EndpointMark::Arrow) && raw(j, i) == encode(EndpointMark::Tail);
}

bool MixedGraph::is_undirected(VariableId i, VariableId j) const {
    return raw(i, j) == encode(EndpointMark::Tail) && raw(j, i) == encode(EndpointMark::Tail);
}

bool MixedGraph::is_bidirected(VariableId i, VariableId j) const {
    return raw(i, j) == encode(EndpointMark::Arrow) && raw(j, i) == encode(EndpointMark::Arrow);
}

std::vector<VariableId> MixedGraph::adjacents(VariableId v) const {
    check(v);
    std::vector<VariableId> out;
    for (VariableId w = 0; w < size(); ++w)
        if (raw(v, w)) out.push_back(w);
    return out;
}

std::vector<VariableId> MixedGraph::parents(VariableId v) const {
    check(v);
    std::vector<VariableId> out;
    for (VariableId w = 0; w < size(); ++w)
        if (is_directed(w, v)) out.push_back(w);
    return out;
}

std::vector<VariableId> MixedGraph::children(VariableId v) const {
    check(v);
    std::vector<VariableId> out;
    for (VariableId w = 0; w < size(); ++w)
        if (is_directed(v, w)) out.push_back(w);
    return out;
}

std::vector<VariableId> MixedGraph::neighbors(VariableId v) const {
    check(v);
    std::vector<VariableId> out;
    for (VariableId w = 0; w < size(); ++w)
        if (is_undirected(v, w)) out.push_back(w);
    return out;
}

std::vector<Edge> MixedGraph::edges() const {
    std::vector<Edge> out;
    for (VariableId a = 0; a < size(); ++a)
        for (VariableId b = a + 1; b < size(); ++b)
            if (raw(a, b)) out.push_back({a, b, decode(raw(b, a)), decode(raw(a, b))});
    return out;
}

std::size_t MixedGraph::edge_count() const {
    std::size_t count = 0;
    for (VariableId a = 0; a < size(); ++a)
        for (VariableId b = a + 1; b < size(); ++b)
            if (raw(a, b)) ++count;
    return count;
}

bool MixedGraph::all_directed() const {
    for (const auto& e : edges()) {
        const bool forward = e.mark_a == EndpointMark::Tail && e.mark_b == EndpointMark::Arrow;
        const bool backward = e.mark_a == EndpointMark::Arrow && e.mark_b == EndpointMark::Tail;
        if (!forward && !backward) return false;
    }
    return true;
}

bool MixedGraph::is_cpdag_view() const {
    for (const auto& e : edges()) {
        const bool tail_a = e.mark_a == EndpointMark::Tail;
        const bool tail_b = e.mark_b == EndpointMark::Tail;
        const bool ok = (tail_a && tail_b) || (tail_a && e.mark_b == EndpointMark::Arrow) ||
                        (tail_b && e.mark_a == EndpointMark::Arrow);
        if (!ok) return false;
    }
    return true;
}

bool MixedGraph::is_dag_view() const { return all_directed() && is_acyclic(*this); }

MixedGraph MixedGraph::permuted(const std::vector<VariableId>& order) const {
    if (order.size() != size()) throw std::invalid_argument("permutation size mismatch");
    std::vector<std::string> names;
    for (auto v : order) names.push_back(name(v));
    MixedGraph out(std::move(names));
    for (VariableId i = 0; i < size(); ++i)
        for (VariableId j = 0; j < size(); ++j) out.raw(i, j) = raw(order[i], order[j]);
    return out;
}

MixedGraph MixedGraph::reindexed(const std::vector<std::string>& names) const {
    MixedGraph out(names);
    std::vector<VariableId> map(size());
    for (VariableId v = 0; v < size(); ++v) {
        auto idx = out.find(names_[v]);
        if (!idx) throw std::invalid_argument("variable '" + names_[v] + "' not present in target variable set");
        map[v] = *idx;
    }
    for (VariableId i = 0; i < size(); ++i)
        for (VariableId j = 0; j < size(); ++j) out.raw(map[i], map[j]) = raw(i, j);
    return out;
}

bool is_acyclic(const MixedGraph& g) {
    if (!g.all_directed()) throw std::invalid_argument("mixed marks in DAG check");
    return find_directed_cycle(g).empty();
}

void require_dag(const MixedGraph& g, std::string_view what) {
    if (!g.all_directed())
        throw std::invalid_argument(std::string(what) + " must contain only directed edges");
    auto cycle = find_directed_cycle(g);
    if (!cycle.empty()) {
        std::string msg = std::string(what) + " has a directed cycle:";
        for (auto v : cycle) msg += " " + g.name(v);
        throw std::invalid_argument(msg);
    }
}

std::vector<VariableId> find_directed_cycle(const MixedGraph& g) {
    const std::size_t d = g.size();
    // 0 white, 1 grey (on stack), 2 black
    std::vector<int> color(d, 0);
    std::vector<VariableId> parent(d, d);
    for (VariableId root = 0; root < d; ++root) {
        if (color[root]) continue;
        std::vector<std::pair<VariableId, VariableId>> stack{{root, 0}};
        color[root] = 1;
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            bool pushed = false;
            for (; next < d; ++next) {
                const VariableId w = next;
                if (!g.is_directed(u, w)) continue;
                if (color[w] == 1) {
                    std::vector<VariableId> cycle{w};
                    for (VariableId x = u; x != w; x = parent[x]) cycle.push_back(x);
                    std::reverse(cycle.begin() + 1, cycle.end());
                    return cycle;
                }
                if (color[w] == 0) {
                    color[w] = 1;
                    parent[w] = u;
                    ++next;
                    stack.emplace_back(w, 0);
                    pushed = true;
                    break;
                }
            }
            if (!pushed) {
                color[stack.back().first] = 2;
                stack.pop_back();
            }
        }
    }
    return {};
}

std::vector<VariableId> ancestors(const MixedGraph& g, VariableId v) {
    if (v >= g.size()) throw std::out_of_range("variable index " + std::to_string(v) + " out of range");
    return reach(g, v, false);
}

std::vector<VariableId> descendants(const MixedGraph& g, VariableId v) {
    if (v >= g.size()) throw std::out_of_range("variable index " + std::to_string(v) + " out of range");
    return reach(g, v, true);
}

std::vector<VariableId> directed_paths_through(const MixedGraph& g, VariableId src, VariableId dst) {
    if (src == dst) throw std::invalid_argument("directed_paths_through: src == dst");
    const auto down = descendants(g, src);
    const auto up = ancestors(g, dst);
    std::vector<VariableId> out;
    std::set_intersection(down.begin(), down.end(), up.begin(), up.end(), std::back_inserter(out));
    std::erase(out, src);
    std::erase(out, dst);
    return out;
}

std::vector<VariableId> topological_order(const MixedGraph& g) {
    const std::size_t d = g.size();
    std::vector<std::size_t> indegree(d, 0);
    for (VariableId i = 0; i < d; ++i)
        for (VariableId j = 0; j < d; ++j)
            if (g.is_directed(i, j)) ++indegree[j];
    std::vector<VariableId> order;
    std::vector<char> done(d, 0);
    // Smallest available index first, so the order is deterministic.
    while (order.size() < d) {
        VariableId pick = d;
        for (VariableId v = 0; v < d; ++v)
            if (!done[v] && indegree[v] == 0) {
                pick = v;
                break;
            }
        if (pick == d) throw std::invalid_argument("graph has a directed cycle");
        done[pick] = 1;
        order.push_back(pick);
        for (VariableId w = 0; w < d; ++w)
            if (g.is_directed(pick, w)) --indegree[w];
    }
    return order;
}

MixedGraph cpdag_of(const Dag& g) {
    require_dag(g, "cpdag_of input");
    const std::size_t d = g.size();
    MixedGraph out(g.names());
    for (const auto& e : g.edges()) out.add_undirected(e.a, e.b);
    for (VariableId c = 0; c < d; ++c) {
        const auto pa = g.parents(c);
        for (std::size_t x = 0; x < pa.size(); ++x)
            for (std::size_t y = x + 1; y < pa.size(); ++y)
                if (!g.adjacent(pa[x], pa[y])) {
                    out.add_directed(pa[x], c);
                    out.add_directed(pa[y], c);
                }
    }
    return apply_meek_rules(std::move(out));
}

namespace {

// R1: a -> b -- c, a !~ c  =>  b -> c
bool meek_r1(const MixedGraph& g, VariableId b, VariableId c) {
    for (VariableId a = 0; a < g.size(); ++a)
        if (a != c && g.is_directed(a, b) && !g.adjacent(a, c)) return true;
    return false;
}

// R2: a -> k -> b, a -- b  =>  a -> b
bool meek_r2(const MixedGraph& g, VariableId a, VariableId b) {
    for (VariableId k = 0; k < g.size(); ++k)
        if (g.is_directed(a, k) && g.is_directed(k, b)) return true;
    return false;
}

// R3: a -- c, a -- d, c -> b, d -> b, c !~ d, a -- b  =>  a -> b
bool meek_r3(const MixedGraph& g, VariableId a, VariableId b) {
    std::vector<VariableId> cand;
    for (VariableId c = 0; c < g.size(); ++c)
        if (g.is_undirected(a, c) && g.is_directed(c, b)) cand.push_back(c);
    for (std::size_t i = 0; i < cand.size(); ++i)
        for (std::size_t j = i + 1; j < cand.size(); ++j)
            if (!g.adjacent(cand[i], cand[j])) return true;
    return false;
}

// R4: a -- k, k -> l, l -> b, k !~ b, a ~ l, a -- b  =>  a -> b
bool meek_r4(const MixedGraph& g, VariableId a, VariableId b) {
    for (VariableId l = 0; l < g.size(); ++l) {
        if (l == a || !g.is_directed(l, b) || !g.adjacent(a, l)) continue;
        for (VariableId k = 0; k < g.size(); ++k)
            if (k != b && g.is_undirected(a, k) && g.is_directed(k, l) && !g.adjacent(k, b)) return true;
    }
    return false;
}

}  // namespace

MixedGraph apply_meek_rules(MixedGraph g) {
    const std::size_t d = g.size();
    bool changed = true;
    while (changed) {
        changed = false;
        for (VariableId a = 0; a < d; ++a)
            for (VariableId b = 0; b < d; ++b) {
                if (a == b || !g.is_undirected(a, b)) continue;
                if (meek_r1(g, a, b) || meek_r2(g, a, b) || meek_r3(g, a, b) || meek_r4(g, a, b)) {
                    g.add_directed(a, b);
                    changed = true;
                }
            }
    }
    return g;
}

Dag consistent_extension(const MixedGraph& pdag) {
    if (!pdag.is_cpdag_view()) throw std::invalid_argument("consistent_extension needs a partially directed graph");
    const std::size_t d = pdag.size();
    MixedGraph work = pdag;
    Dag out(pdag.names());
    for (const auto& e : pdag.edges())
        if (pdag.is_directed(e.a, e.b))
            out.add_directed(e.a, e.b);
        else if (pdag.is_directed(e.b, e.a))
            out.add_directed(e.b, e.a);
    std::vector<char> removed(d, 0);
    for (std::size_t left = d; left > 0; --left) {
        VariableId pick = d;
        for (VariableId x = 0; x < d && pick == d; ++x) {
            if (removed[x] || !work.children(x).empty()) continue;
            const auto nb = work.neighbors(x);
            const auto adj = work.adjacents(x);
            bool ok = true;
            for (auto y : nb) {
                for (auto z : adj)
                    if (z != y && !work.adjacent(y, z)) {
                        ok = false;
                        break;
                    }
                if (!ok) break;
            }
            if (ok) pick = x;
        }
        if (pick == d) throw std::runtime_error("graph admits no consistent DAG extension");
        for (auto y : work.neighbors(pick)) out.add_directed(y, pick);
        for (auto y : work.adjacents(pick)) work.remove_edge(pick, y);
        removed[pick] = 1;
    }
    return out;
}

}  // namespace fairpath
