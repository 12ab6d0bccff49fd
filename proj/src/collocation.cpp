#include "ddecert/collocation.hpp"

#include <algorithm>
#include <cmath>

#include "ddecert/chebyshev.hpp"

namespace ddecert {

namespace {
constexpr double kBreakTol = 1e-12;
}

int CollocationLayout::node_at(double s) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), s - 1e-9);
  if (it == nodes.end() || std::abs(*it - s) > 1e-9)
    fail(ErrorCode::internal, "no collocation node at " + std::to_string(s));
  return static_cast<int>(it - nodes.begin());
}

CollocationLayout make_collocation(const DelayKernel& kernel,
                                   int nodes_per_panel) {
  kernel.validate();
  if (nodes_per_panel < 2)
    fail(ErrorCode::invalid_argument,
         "collocation needs at least 2 nodes per panel");
  CollocationLayout layout;
  layout.nodes_per_panel = nodes_per_panel;
  layout.breaks = {-1.0, 0.0};
  for (const auto& a : kernel.atoms) layout.breaks.push_back(a.location);
  if (kernel.density)
    layout.breaks.insert(layout.breaks.end(),
                         kernel.density->breakpoints.begin(),
                         kernel.density->breakpoints.end());
  std::sort(layout.breaks.begin(), layout.breaks.end());
  layout.breaks.erase(
      std::unique(layout.breaks.begin(), layout.breaks.end(),
                  [](double a, double b) { return std::abs(a - b) <= kBreakTol; }),
      layout.breaks.end());
  layout.breaks.front() = -1.0;
  layout.breaks.back() = 0.0;

  const int panels = layout.panel_count();
  const int n = nodes_per_panel;
  const auto ref_nodes = chebyshev_lobatto_nodes(n);
  const auto ref_weights = clenshaw_curtis_weights(n);
  const Matrix ref_diff = chebyshev_diff_matrix(n);

  layout.nodes.assign(panels * (n - 1) + 1, 0.0);
  layout.weight_left.assign(layout.nodes.size(), 0.0);
  layout.weight_right.assign(layout.nodes.size(), 0.0);
  layout.panel_diff.reserve(panels);
  for (int p = 0; p < panels; ++p) {
    const double a = layout.breaks[p];
    const double b = layout.breaks[p + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    const int offset = layout.node_offset(p);
    for (int k = 0; k < n; ++k) {
      const int g = offset + k;
      double s = mid + half * ref_nodes[k];
      if (k == 0) s = a;
      if (k == n - 1) s = b;
      layout.nodes[g] = s;
      // A node's quadrature mass is attributed to the side it comes from,
      // so weights against a discontinuous integrand stay one-sided.
      const double w = half * ref_weights[k];
      if (k == n - 1)
        layout.weight_left[g] += w;
      else
        layout.weight_right[g] += w;
    }
    layout.panel_diff.push_back(ref_diff / half);
  }
  layout.nodes.back() = 0.0;
  return layout;
}

Matrix assemble_generator_matrix(const LinearDelaySystem& system,
                                 const CollocationLayout& layout) {
  system.validate();
  const int n = system.dim();
  const int m = layout.node_count();
  const int z = layout.zero_index();
  const int npp = layout.nodes_per_panel;
  Matrix op = Matrix::Zero(n * m, n * m);

  // Transport rows: d/ds at every node except s = 0. A joint node takes
  // its row from the panel on its right, matching one-sided transport.
  const Matrix id = Matrix::Identity(n, n);
  for (int p = 0; p < layout.panel_count(); ++p) {
    const int offset = layout.node_offset(p);
    const Matrix& d = layout.panel_diff[p];
    for (int k = 0; k + 1 < npp; ++k) {
      const int row = offset + k;
      for (int j = 0; j < npp; ++j)
        op.block(row * n, (offset + j) * n, n, n) += d(k, j) * id;
    }
  }

  // Generator row at s = 0: drift plus the delay terms, with the density
  // integral discretised by the panel quadrature weights.
  op.block(z * n, z * n, n, n) += system.drift;
  for (const auto& atom : system.kernel.atoms) {
    const int g = layout.node_at(atom.location);
    op.block(z * n, g * n, n, n) += atom.weight;
  }
  if (system.kernel.density) {
    const DelayDensity& dens = *system.kernel.density;
    for (int p = 0; p < layout.panel_count(); ++p) {
      const int piece =
          dens.piece_at(0.5 * (layout.breaks[p] + layout.breaks[p + 1]), false);
      const int offset = layout.node_offset(p);
      for (int k = 0; k < npp; ++k) {
        const int g = offset + k;
        const double w = (k == npp - 1) ? layout.weight_left[g]
                                        : layout.weight_right[g];
        op.block(z * n, g * n, n, n) += w * dens.value(layout.nodes[g], piece);
      }
    }
  }
  return op;
}

}  // namespace ddecert
