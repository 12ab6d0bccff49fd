#pragma once

#include <vector>

#include "ddecert/types.hpp"

namespace ddecert {

/// n Chebyshev-Gauss-Lobatto points on [-1, 1] in ascending order
/// (so nodes.front() == -1 and nodes.back() == +1). Requires n >= 2.
std::vector<double> chebyshev_lobatto_nodes(int n);

/// Spectral differentiation matrix on the ascending CGL nodes. Row i
/// approximates f'(x_i) from the nodal values; diagonal entries use the
/// negated row sum so that constants differentiate to exactly zero.
Matrix chebyshev_diff_matrix(int n);

/// Clenshaw-Curtis weights for the ascending CGL nodes; sum(w) == 2,
/// exact for polynomials of degree n-1 (degree n for odd counts).
std::vector<double> clenshaw_curtis_weights(int n);

}  // namespace ddecert
