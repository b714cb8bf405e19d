#include "fairpath/sfm.hpp"

#include <algorithm>
#include <stdexcept>

namespace fairpath {

std::string_view to_string(SfmMode mode) { return mode == SfmMode::Strict ? "strict" : "possible"; }

SfmMode parse_sfm_mode(std::string_view text) {
    const auto key = normalize_name(text);
    if (key == "strict") return SfmMode::Strict;
    if (key == "possible") return SfmMode::Possible;
    throw std::invalid_argument("unknown SFM mode '" + std::string(text) + "'");
}

void SfmAssignment::validate(std::size_t d) const {
    std::vector<int> seen(d, 0);
    auto mark = [&](VariableId v) {
        if (v >= d) throw std::invalid_argument("SFM refers to variable " + std::to_string(v) + " out of range");
        ++seen[v];
    };
    mark(x);
    mark(y);
    for (auto v : w) mark(v);
    for (auto v : z) mark(v);
    for (auto v : dropped) mark(v);
    for (std::size_t v = 0; v < d; ++v)
        if (seen[v] != 1)
            throw std::invalid_argument("SFM partition invalid: variable " + std::to_string(v) + " has " +
                                        std::to_string(seen[v]) + " roles");
}

SfmMode default_sfm_mode(const MixedGraph& g) { return g.all_directed() ? SfmMode::Strict : SfmMode::Possible; }

namespace {

// Can the edge between u and w be followed from u towards w?
bool possibly_forward(const MixedGraph& g, VariableId u, VariableId w) {
    const auto at_u = g.mark(w, u);
    const auto at_w = g.mark(u, w);
    if (!at_u || !at_w) return false;
    if (*at_u == EndpointMark::Arrow) return false;
    // A tail at w is only compatible with u -> w when the edge is tail-tail.
    if (*at_w == EndpointMark::Tail) return *at_u == EndpointMark::Tail;
    return true;
}

std::vector<VariableId> possible_reach(const MixedGraph& g, VariableId start, bool forward,
                                       const std::vector<VariableId>& avoid) {
    const std::size_t d = g.size();
    if (start >= d) throw std::out_of_range("variable index out of range");
    std::vector<char> seen(d, 0);
    for (auto a : avoid) seen.at(a) = 1;
    seen[start] = 1;
    std::vector<VariableId> stack{start}, out;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (VariableId w = 0; w < d; ++w) {
            if (seen[w]) continue;
            if (forward ? possibly_forward(g, u, w) : possibly_forward(g, w, u)) {
                seen[w] = 1;
                stack.push_back(w);
                out.push_back(w);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<VariableId> intersect(const std::vector<VariableId>& a, const std::vector<VariableId>& b) {
    std::vector<VariableId> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Mediators sorted so that directed edges among them point forwards.
std::vector<VariableId> order_mediators(const MixedGraph& g, std::vector<VariableId> w) {
    std::vector<VariableId> ordered;
    std::vector<char> placed(g.size(), 0);
    while (!w.empty()) {
        auto it = std::find_if(w.begin(), w.end(), [&](VariableId v) {
            for (auto u : w)
                if (u != v && g.is_directed(u, v)) return false;
            return true;
        });
        if (it == w.end()) it = w.begin();  // directed cycle among mediators: fall back to index order
        ordered.push_back(*it);
        w.erase(it);
    }
    return ordered;
}

}  // namespace

std::vector<VariableId> possible_ancestors(const MixedGraph& g, VariableId v, std::vector<VariableId> avoid) {
    return possible_reach(g, v, false, avoid);
}

std::vector<VariableId> possible_descendants(const MixedGraph& g, VariableId v, std::vector<VariableId> avoid) {
    return possible_reach(g, v, true, avoid);
}

SfmAssignment derive_sfm(const MixedGraph& g, VariableId x, VariableId y, SfmMode mode) {
    if (x == y) throw std::invalid_argument("protected attribute and outcome must differ");
    if (x >= g.size() || y >= g.size()) throw std::out_of_range("variable index out of range");

    SfmAssignment out;
    out.x = x;
    out.y = y;
    out.mode = mode;

    std::vector<VariableId> mediators, anc_y;
    if (mode == SfmMode::Strict) {
        mediators = directed_paths_through(g, x, y);
        anc_y = ancestors(g, y);
    } else {
        // Paths x => v avoid y and paths v => y avoid x, so v lies strictly between them.
        mediators = intersect(possible_descendants(g, x, {y}), possible_ancestors(g, y, {x}));
        anc_y = possible_ancestors(g, y);
    }
    const auto desc_y = descendants(g, y);
    std::erase_if(mediators, [&](VariableId v) { return std::binary_search(desc_y.begin(), desc_y.end(), v); });

    out.w = order_mediators(g, mediators);
    for (auto v : anc_y) {
        if (v == x || std::binary_search(mediators.begin(), mediators.end(), v)) continue;
        if (std::binary_search(desc_y.begin(), desc_y.end(), v)) continue;
        out.z.push_back(v);
    }
    for (VariableId v = 0; v < g.size(); ++v) {
        if (v == x || v == y) continue;
        if (std::binary_search(mediators.begin(), mediators.end(), v)) continue;
        if (std::binary_search(out.z.begin(), out.z.end(), v)) continue;
        out.dropped.push_back(v);
    }
    out.validate(g.size());
    return out;
}

}  // namespace fairpath
