#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hkl::detail {

/// Directed multigraph with colored nodes and labeled edges.
struct ColoredGraph {
  struct Edge {
    std::size_t from;
    std::size_t to;
    std::string label;
  };
  std::vector<std::string> colors;
  std::vector<Edge> edges;
};

/// Canonical node order: result[position] = node. Two graphs are isomorphic
/// (color and label preserving) iff relabeling both by their canonical order
/// yields identical graphs. Color refinement plus individualization with
/// twin pruning; exponential only for highly symmetric inputs.
std::vector<std::size_t> canonical_order(const ColoredGraph& g);

}  // namespace hkl::detail
