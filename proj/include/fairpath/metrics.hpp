#pragma once

#include <cstdint>
#include <string_view>

#include "fairpath/bootstrap.hpp"
#include "fairpath/dataset.hpp"
#include "fairpath/discovery.hpp"
#include "fairpath/graph.hpp"

namespace fairpath {

enum class CompareMode { Adjacency, Orientation };

std::string_view to_string(CompareMode mode);
CompareMode parse_compare_mode(std::string_view text);

struct EdgeCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
};

struct StructScore {
    double f1 = 0.0;
    double shd = 0.0;
    double fdr = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
    EdgeCounts counts;
    CompareMode mode = CompareMode::Adjacency;
};

/// Scores `learned` against a ground-truth DAG. Variables are matched by
/// normalized name and both graphs must name the same set.
///
/// Adjacency: unordered pairs; an edge with any marks is a positive; shd = fp + fn.
/// Orientation: a learned directed edge agreeing with truth is tp; a reversed
/// edge is fp + fn and costs 1; an adjacency-correct edge without a definite
/// direction is fn and costs `misorientation_cost`; missing and extra edges cost 1.
///
/// In both modes tn counts pairs with no edge in either graph. Empty
/// denominators give f1 = 1, tpr = 1, fdr = 0 and fpr = 0.
StructScore compare(const Dag& truth, const MixedGraph& learned, CompareMode mode = CompareMode::Adjacency,
                    double misorientation_cost = 0.5);

struct BootstrapStructScore {
    Summary f1, shd, fdr, tpr, fpr;
    std::size_t replicates = 0;
    std::size_t skipped = 0;
    /// Successful replicates in replicate order.
    std::vector<StructScore> replicate_scores;
};

/// Resamples rows `replicates` times, reruns discovery on each resample and
/// summarizes the metrics against `truth`.
BootstrapStructScore bootstrap_compare(const Dag& truth, const Dataset& data, Algorithm algo,
                                       const DiscoveryConfig& cfg, std::size_t replicates, std::uint64_t seed,
                                       CompareMode mode = CompareMode::Adjacency);

}  // namespace fairpath
