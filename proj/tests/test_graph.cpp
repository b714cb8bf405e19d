#include <doctest.h>

#include <algorithm>
#include <set>

#include "fairpath/graph.hpp"
#include "fairpath/graph_io.hpp"
#include "oracles.hpp"

using namespace fairpath;
using M = EndpointMark;

namespace {

std::vector<VariableId> reach_row(const std::vector<std::vector<bool>>& r, VariableId v, bool forward) {
    std::vector<VariableId> out;
    for (VariableId u = 0; u < r.size(); ++u)
        if (u != v && (forward ? r[v][u] : r[u][v])) out.push_back(u);
    return out;
}

}  // namespace

TEST_CASE("endpoint storage and edge views") {
    MixedGraph g({"a", "b", "c"});
    g.add_directed(0, 1);
    g.set_edge(2, 1, M::Circle, M::Arrow);
    CHECK(g.is_directed(0, 1));
    CHECK_FALSE(g.is_directed(1, 0));
    CHECK(g.mark(0, 1) == M::Arrow);
    CHECK(g.mark(1, 0) == M::Tail);
    CHECK(g.mark(1, 2) == M::Circle);
    CHECK_FALSE(g.mark(0, 2).has_value());
    CHECK(g.edge_count() == 2);
    const auto e = g.edges();
    REQUIRE(e.size() == 2);
    CHECK(e[1] == Edge{1, 2, M::Arrow, M::Circle});
    CHECK_THROWS_AS(g.add_directed(0, 0), std::invalid_argument);
    CHECK(g.index_of("A") == 0);
    CHECK_THROWS(g.index_of("zz"));
    CHECK_FALSE(g.all_directed());
    g.remove_edge(1, 2);
    CHECK(g.is_dag_view());
}

TEST_CASE("name normalization") {
    CHECK(normalize_name("Brain Volume") == "brainvolume");
    CHECK(normalize_name("brain_volume") == "brainvolume");
    MixedGraph g({"Brain Volume", "sex"});
    CHECK(g.index_of("brain_volume") == 0);
    CHECK_THROWS(MixedGraph({"a_b", "ab"}));
}

TEST_CASE("ancestors and descendants match transitive closure") {
    Rng rng(11);
    for (int rep = 0; rep < 60; ++rep) {
        const auto d = 2 + rng.index(8);
        const Dag g = oracle::random_dag(d, 0.35, rng);
        const auto r = oracle::reach(g);
        for (VariableId v = 0; v < d; ++v) {
            CHECK(ancestors(g, v) == reach_row(r, v, false));
            CHECK(descendants(g, v) == reach_row(r, v, true));
        }
        const auto order = topological_order(g);
        std::vector<std::size_t> pos(d);
        for (std::size_t k = 0; k < d; ++k) pos[order[k]] = k;
        for (const auto& e : g.edges()) {
            const auto from = g.is_directed(e.a, e.b) ? e.a : e.b;
            const auto to = from == e.a ? e.b : e.a;
            CHECK(pos[from] < pos[to]);
        }
        for (VariableId s = 0; s < d; ++s)
            for (VariableId t = 0; t < d; ++t) {
                if (s == t) continue;
                std::vector<VariableId> expect;
                for (VariableId m = 0; m < d; ++m)
                    if (m != s && m != t && r[s][m] && r[m][t]) expect.push_back(m);
                CHECK(directed_paths_through(g, s, t) == expect);
            }
    }
}

TEST_CASE("cycle detection") {
    Dag g(oracle::node_names(3));
    g.add_directed(0, 1);
    g.add_directed(1, 2);
    CHECK(is_acyclic(g));
    CHECK(find_directed_cycle(g).empty());
    g.add_directed(2, 0);
    CHECK_FALSE(is_acyclic(g));
    CHECK(find_directed_cycle(g).size() == 3);
    CHECK_THROWS(topological_order(g));
    CHECK_THROWS(require_dag(g));
    MixedGraph m(oracle::node_names(2));
    m.add_undirected(0, 1);
    CHECK_THROWS_AS(is_acyclic(m), std::invalid_argument);
}

TEST_CASE("cpdag_of equals brute-force equivalence class") {
    Rng rng(5);
    for (int rep = 0; rep < 150; ++rep) {
        const auto d = 2 + rng.index(5);
        const Dag g = oracle::random_dag(d, 0.5, rng);
        const auto cp = cpdag_of(g);
        CHECK(cp == oracle::brute_cpdag(g));
        // Meek closure is a fixed point on a CPDAG.
        CHECK(apply_meek_rules(cp) == cp);
        const Dag ext = consistent_extension(cp);
        CHECK(oracle::acyclic(ext));
        CHECK(oracle::markov_equivalent(ext, g));
    }
}

TEST_CASE("cpdag of textbook structures") {
    SUBCASE("chain is fully undirected") {
        Dag g(oracle::node_names(3));
        g.add_directed(0, 1);
        g.add_directed(1, 2);
        const auto cp = cpdag_of(g);
        CHECK(cp.is_undirected(0, 1));
        CHECK(cp.is_undirected(1, 2));
    }
    SUBCASE("collider is kept and propagates") {
        Dag g(oracle::node_names(4));
        g.add_directed(0, 2);
        g.add_directed(1, 2);
        g.add_directed(2, 3);
        const auto cp = cpdag_of(g);
        CHECK(cp.is_directed(0, 2));
        CHECK(cp.is_directed(1, 2));
        CHECK(cp.is_directed(2, 3));  // Meek R1
    }
}

TEST_CASE("permutation and reindexing") {
    Rng rng(8);
    const MixedGraph g = oracle::random_mixed(6, 0.5, rng);
    const std::vector<VariableId> order{5, 3, 1, 0, 2, 4};
    const auto p = g.permuted(order);
    for (VariableId i = 0; i < 6; ++i)
        for (VariableId j = 0; j < 6; ++j)
            if (i != j) CHECK(p.mark(i, j) == g.mark(order[i], order[j]));
    std::vector<std::string> names;
    for (auto o : order) names.push_back(g.names()[o]);
    CHECK(g.reindexed(names) == p);
    auto extra = names;
    extra.push_back("isolated");
    CHECK(g.reindexed(extra).adjacents(6).empty());
    CHECK_THROWS(g.reindexed({"v0"}));
}

TEST_CASE("graph text format") {
    SUBCASE("mark tokens") {
        const auto g = parse_graph("A -> B\nC <-> D\nE o-> F\nG -- H\nI o-o J\nK <- L\n# comment\nM\n");
        CHECK(g.mark(g.index_of("A"), g.index_of("B")) == M::Arrow);
        CHECK(g.mark(g.index_of("B"), g.index_of("A")) == M::Tail);
        CHECK(g.is_bidirected(g.index_of("C"), g.index_of("D")));
        CHECK(g.mark(g.index_of("F"), g.index_of("E")) == M::Circle);
        CHECK(g.is_undirected(g.index_of("G"), g.index_of("H")));
        CHECK(g.mark(g.index_of("I"), g.index_of("J")) == M::Circle);
        CHECK(g.is_directed(g.index_of("L"), g.index_of("K")));
        CHECK(g.adjacents(g.index_of("M")).empty());
    }
    SUBCASE("names with spaces") {
        const auto g = parse_graph("ejection fraction -> death event\n");
        CHECK(g.is_directed(g.index_of("ejection fraction"), g.index_of("death event")));
    }
    SUBCASE("errors carry line numbers") {
        try {
            parse_graph("A -> B\nA =>> C\n");
            FAIL("expected a parse error");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
        try {
            parse_graph("A -> B\nB -- A\n");
            FAIL("expected a duplicate error");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("round trip on random graphs") {
        Rng rng(21);
        for (int rep = 0; rep < 100; ++rep) {
            const auto g = oracle::random_mixed(1 + rng.index(9), 0.4, rng);
            CHECK(parse_graph(format_graph(g)) == g);
        }
    }
}
