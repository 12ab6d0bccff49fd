#pragma once

#include <vector>

#include "ddecert/kernel.hpp"

namespace ddecert {

/// Piecewise-Chebyshev collocation of the history interval [-1, 0].
/// Panels are cut at every atom location and density breakpoint, so each
/// panel carries a single smooth piece of the kernel and every atom sits
/// exactly on a node. Adjacent panels share their joint node, which keeps
/// the collocated function continuous by construction.
struct CollocationLayout {
  int nodes_per_panel = 0;
  std::vector<double> breaks;            // panel boundaries, -1 ... 0
  std::vector<double> nodes;             // global unique nodes, ascending
  std::vector<double> weight_left;       // quadrature mass reaching a node
  std::vector<double> weight_right;      //   from the panel on each side
  std::vector<Matrix> panel_diff;        // per-panel differentiation matrix

  int panel_count() const { return static_cast<int>(breaks.size()) - 1; }
  int node_count() const { return static_cast<int>(nodes.size()); }
  int zero_index() const { return node_count() - 1; }
  int node_offset(int panel) const { return panel * (nodes_per_panel - 1); }
  /// Index of the node at location s (must hit a node up to 1e-9).
  int node_at(double s) const;
};

CollocationLayout make_collocation(const DelayKernel& kernel,
                                   int nodes_per_panel);

/// Finite section of the generator on the layout's nodes: derivative rows
/// at every history node (owned by the panel to the node's right) and the
/// delay-differential row at the node s = 0.
Matrix assemble_generator_matrix(const LinearDelaySystem& system,
                                 const CollocationLayout& layout);

}  // namespace ddecert
