#pragma once

#include <vector>

namespace ddecert {

/// Gauss-Legendre rule on [-1, 1], exact for polynomials of degree 2n-1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Returns the n-point rule; rules are computed once and cached.
const GaussRule& gauss_legendre(int n);

/// n-point Gauss quadrature of f over [a, b].
template <class F>
double gauss_integrate(F&& f, double a, double b, int n) {
  const GaussRule& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

}  // namespace ddecert
