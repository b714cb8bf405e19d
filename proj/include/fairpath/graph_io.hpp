#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "fairpath/graph.hpp"

namespace fairpath {

/// Edge-list text format, one statement per line:
///
///   A -> B      tail at A, arrow at B
///   A -- B      undirected
///   A o-o B, A o-> B, A <-> B, A -o B   PAG marks
///   A           declares a node (needed for isolated nodes)
///   # ...       comment
///
/// Node names may contain spaces; the mark token is the whitespace-separated
/// token that matches one of the edge symbols.
MixedGraph parse_graph(std::string_view text);
std::string format_graph(const MixedGraph& g);

MixedGraph load_graph(const std::filesystem::path& path);
void save_graph(const MixedGraph& g, const std::filesystem::path& path);

}  // namespace fairpath
