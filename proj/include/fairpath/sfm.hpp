#pragma once

#include <string_view>
#include <vector>

#include "fairpath/graph.hpp"

namespace fairpath {

enum class SfmMode { Strict, Possible };

std::string_view to_string(SfmMode mode);
SfmMode parse_sfm_mode(std::string_view text);

/// Standard Fairness Model roles. `w` is in a topological order of the
/// graph's directed edges among mediators (index order where undetermined).
struct SfmAssignment {
    VariableId x = 0;
    VariableId y = 0;
    std::vector<VariableId> w;
    std::vector<VariableId> z;
    std::vector<VariableId> dropped;
    SfmMode mode = SfmMode::Strict;

    /// Throws std::invalid_argument unless every one of `d` variables has exactly one role.
    void validate(std::size_t d) const;
};

/// Strict for graphs whose edges are all directed, Possible otherwise.
SfmMode default_sfm_mode(const MixedGraph& g);

/// Mediators are intermediate vertices of (possibly) directed paths x => y;
/// confounders are (possible) ancestors of y other than x and the mediators.
/// Definite descendants of y are always dropped.
///
/// Strict follows tail-arrow edges only. Possible also traverses tail-tail and
/// circle-circle edges in both directions and circle-arrow edges forwards;
/// bidirected edges are never traversed.
SfmAssignment derive_sfm(const MixedGraph& g, VariableId x, VariableId y, SfmMode mode);

/// Ancestors / descendants under the Possible traversal rule.
std::vector<VariableId> possible_ancestors(const MixedGraph& g, VariableId v, std::vector<VariableId> avoid = {});
std::vector<VariableId> possible_descendants(const MixedGraph& g, VariableId v, std::vector<VariableId> avoid = {});

}  // namespace fairpath
