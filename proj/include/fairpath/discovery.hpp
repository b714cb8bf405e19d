#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairpath/dataset.hpp"
#include "fairpath/graph.hpp"

namespace fairpath {

class FisherZ;

struct NotearsConfig {
    double lambda = 0.1;
    double threshold = 0.0;
    int max_dual_iters = 100;
    double h_tol = 1e-8;
    double rho_max = 1e16;
    int max_inner_iters = 2000;
};

struct DiscoveryConfig {
    double alpha = 0.05;
    /// Largest conditioning set tried by PC/FCI; nullopt = no limit.
    std::optional<std::size_t> max_cond_set;
    /// Standardize continuous columns before discovery.
    bool standardize = true;
    NotearsConfig notears;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

/// Separating sets for pairs removed from a skeleton.
class SepsetMap {
public:
    void set(VariableId a, VariableId b, std::vector<VariableId> sepset);
    const std::vector<VariableId>* find(VariableId a, VariableId b) const;
    bool contains(VariableId a, VariableId b, VariableId v) const;
    std::size_t size() const { return sets_.size(); }

private:
    std::map<std::pair<VariableId, VariableId>, std::vector<VariableId>> sets_;
};

struct SkeletonResult {
    MixedGraph graph;  // undirected
    SepsetMap sepsets;
};

/// Order-independent ("stable") adjacency search. At each conditioning-set size
/// the neighbourhoods are frozen before any removal at that size, so the result
/// does not depend on the variable order. Conditioning sets come from the
/// frozen neighbourhoods of either endpoint.
SkeletonResult learn_skeleton(const Dataset& data, const FisherZ& test, std::optional<std::size_t> max_cond_set);

struct PcResult {
    MixedGraph graph;  // CPDAG view
    SepsetMap sepsets;
};

PcResult pc(const Dataset& data, const DiscoveryConfig& cfg);

struct GesResult {
    MixedGraph graph;  // CPDAG view
    double score = 0.0;
    double empty_score = 0.0;
    /// Total score after each accepted operator, forward then backward.
    std::vector<double> forward_trace;
    std::vector<double> backward_trace;
};

/// Greedy equivalence search with the decomposable Gaussian BIC.
GesResult ges(const Dataset& data, const DiscoveryConfig& cfg);

/// Sum of local BIC scores of a DAG (any consistent extension for a CPDAG).
double bic_graph_score(const Dataset& data, const Dag& dag);

struct FciResult {
    MixedGraph graph;  // PAG
    SepsetMap sepsets;
};

/// FCI with Possible-D-SEP pruning and orientation rules R0-R4 (no selection-bias rules).
FciResult fci(const Dataset& data, const DiscoveryConfig& cfg);

/// Possible-D-SEP sets of every node in a PAG whose colliders are oriented.
std::vector<std::vector<VariableId>> possible_dsep(const MixedGraph& pag);

struct NotearsResult {
    Eigen::MatrixXd weights;  // (i, j) = weight of edge i -> j, after thresholding
    Eigen::MatrixXd raw_weights;
    Dag graph;
    bool converged = false;
    double h = 0.0;
    int dual_iterations = 0;
    /// Edges removed to break cycles left after thresholding, as (from, to).
    std::vector<std::pair<VariableId, VariableId>> removed_cycle_edges;
    /// Objective values of accepted steps, one list per inner solve.
    std::vector<std::vector<double>> inner_traces;
};

/// Acyclicity function h(W) = tr(exp(W o W)) - d.
double notears_h(const Eigen::Ref<const Eigen::MatrixXd>& w);
/// Gradient of h: exp(W o W)^T o 2W.
Eigen::MatrixXd notears_h_gradient(const Eigen::Ref<const Eigen::MatrixXd>& w);

/// Linear NOTEARS with least-squares loss and an l1 penalty, solved by an
/// augmented Lagrangian over the positive/negative split of W.
NotearsResult notears_linear(const Dataset& data, const DiscoveryConfig& cfg);

/// An iterative method stopped before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Algorithm { Pc, Ges, Fci, Notears };

std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(std::string_view name);

/// Runs one algorithm (standardizing first if configured) and returns its graph.
/// Throws ConvergenceError when NOTEARS ends with h above its tolerance.
MixedGraph discover(const Dataset& data, Algorithm algo, const DiscoveryConfig& cfg);

}  // namespace fairpath
