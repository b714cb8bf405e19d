#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairpath {

/// Index of a variable in a dataset or graph.
using VariableId = std::size_t;

enum class EndpointMark : std::uint8_t { Tail, Arrow, Circle };

/// One edge in canonical form: a < b, with the mark at each end.
struct Edge {
    VariableId a = 0;
    VariableId b = 0;
    EndpointMark mark_a = EndpointMark::Tail;
    EndpointMark mark_b = EndpointMark::Tail;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Lower-cases and strips whitespace and underscores, so that "Brain Volume",
/// "brain_volume" and "brainvolume" name the same variable.
std::string normalize_name(std::string_view name);

/// Graph over named variables with a mark at each edge endpoint. Represents
/// DAGs (tail-arrow), CPDAGs (tail-arrow and tail-tail) and PAGs (any marks).
///
/// Storage is an endpoint table: `mark(i, j)` is the mark at j on the edge i *-* j.
class MixedGraph {
public:
    MixedGraph() = default;
    explicit MixedGraph(std::vector<std::string> names);

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(VariableId v) const;

    /// Lookup by normalized name.
    std::optional<VariableId> find(std::string_view name) const;
    VariableId index_of(std::string_view name) const;

    bool adjacent(VariableId i, VariableId j) const;
    /// Mark at `j` on the edge between i and j, or nullopt if not adjacent.
    std::optional<EndpointMark> mark(VariableId i, VariableId j) const;

    /// Insert or overwrite the edge i *-* j.
    void set_edge(VariableId i, VariableId j, EndpointMark at_i, EndpointMark at_j);
    void add_directed(VariableId from, VariableId to) {
        set_edge(from, to, EndpointMark::Tail, EndpointMark::Arrow);
    }
    void add_undirected(VariableId i, VariableId j) {
        set_edge(i, j, EndpointMark::Tail, EndpointMark::Tail);
    }
    /// Change only the mark at `j` of an existing edge.
    void set_mark(VariableId i, VariableId j, EndpointMark at_j);
    void remove_edge(VariableId i, VariableId j);

    /// i -> j
    bool is_directed(VariableId i, VariableId j) const;
    /// i -- j
    bool is_undirected(VariableId i, VariableId j) const;
    /// i <-> j
    bool is_bidirected(VariableId i, VariableId j) const;
    /// i *-> j: arrowhead at j.
    bool has_arrow_at(VariableId i, VariableId j) const { return mark(i, j) == EndpointMark::Arrow; }

    std::vector<VariableId> adjacents(VariableId v) const;
    std::vector<VariableId> parents(VariableId v) const;
    std::vector<VariableId> children(VariableId v) const;
    /// Undirected (tail-tail) neighbours.
    std::vector<VariableId> neighbors(VariableId v) const;

    std::vector<Edge> edges() const;
    std::size_t edge_count() const;

    /// Every edge is tail-arrow (acyclicity is checked separately).
    bool all_directed() const;
    /// Every edge is tail-arrow or tail-tail.
    bool is_cpdag_view() const;
    /// all_directed() and acyclic.
    bool is_dag_view() const;

    /// Same graph with its nodes re-indexed so that `order[k]` becomes node k.
    MixedGraph permuted(const std::vector<VariableId>& order) const;

    /// Re-express this graph over `names` (matched by normalized name). Every
    /// node of this graph must appear in `names`; extra names become isolated.
    MixedGraph reindexed(const std::vector<std::string>& names) const;

    friend bool operator==(const MixedGraph& lhs, const MixedGraph& rhs) {
        return lhs.names_ == rhs.names_ && lhs.marks_ == rhs.marks_;
    }

private:
    void check(VariableId v) const;
    std::uint8_t raw(VariableId i, VariableId j) const { return marks_[i * names_.size() + j]; }
    std::uint8_t& raw(VariableId i, VariableId j) { return marks_[i * names_.size() + j]; }

    std::vector<std::string> names_;
    // 0 = no edge, otherwise 1 + EndpointMark
    std::vector<std::uint8_t> marks_;
};

/// A MixedGraph with only tail-arrow edges and no directed cycle.
using Dag = MixedGraph;

/// True iff no directed cycle exists. Throws std::invalid_argument on any edge
/// that is not tail-arrow.
bool is_acyclic(const MixedGraph& g);

/// Throws unless g is a valid DAG view.
void require_dag(const MixedGraph& g, std::string_view what = "graph");

/// All u with a directed path u => v (v excluded). Only tail-arrow edges are
/// followed, so for CPDAGs and PAGs this is the set of definite ancestors.
std::vector<VariableId> ancestors(const MixedGraph& g, VariableId v);
std::vector<VariableId> descendants(const MixedGraph& g, VariableId v);

/// Intermediate vertices on at least one directed path src => dst.
std::vector<VariableId> directed_paths_through(const MixedGraph& g, VariableId src, VariableId dst);

/// Nodes in topological order (parents first). Throws on a directed cycle.
std::vector<VariableId> topological_order(const MixedGraph& g);

/// Any cycle of directed edges, as a vertex sequence (empty if acyclic).
std::vector<VariableId> find_directed_cycle(const MixedGraph& g);

/// Completed partially directed graph of the Markov equivalence class of g.
MixedGraph cpdag_of(const Dag& g);

/// Fixed point of Meek's orientation rules R1-R4 on a partially directed graph.
MixedGraph apply_meek_rules(MixedGraph g);

/// A DAG in the equivalence class described by a PDAG (Dor-Tarsi). Throws
/// std::runtime_error if no consistent extension exists.
Dag consistent_extension(const MixedGraph& pdag);

}  // namespace fairpath
