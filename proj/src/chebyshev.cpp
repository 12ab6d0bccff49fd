#include "ddecert/chebyshev.hpp"

#include <cmath>

namespace ddecert {

std::vector<double> chebyshev_lobatto_nodes(int n) {
  if (n < 2) fail(ErrorCode::invalid_argument, "need at least 2 nodes");
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = -std::cos(M_PI * j / (n - 1));
  x.front() = -1.0;
  x.back() = 1.0;
  if (n % 2 == 1) x[n / 2] = 0.0;
  return x;
}

Matrix chebyshev_diff_matrix(int n) {
  const auto x = chebyshev_lobatto_nodes(n);
  // Barycentric weights for CGL nodes: alternating signs, halved at ends.
  std::vector<double> c(n);
  for (int j = 0; j < n; ++j) c[j] = (j % 2 == 0) ? 1.0 : -1.0;
  c.front() *= 0.5;
  c.back() *= 0.5;
  Matrix d(n, n);
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      d(i, j) = (c[j] / c[i]) / (x[i] - x[j]);
      row_sum += d(i, j);
    }
    d(i, i) = -row_sum;
  }
  return d;
}

std::vector<double> clenshaw_curtis_weights(int n) {
  if (n < 2) fail(ErrorCode::invalid_argument, "need at least 2 nodes");
  const int m = n - 1;
  std::vector<double> w(n, 0.0);
  if (m == 1) {
    w[0] = w[1] = 1.0;
    return w;
  }
  // w_k = (2/m)(1 - sum over even j of cos(j k pi / m) * 2/(j^2-1) * b_j),
  // evaluated directly; cost O(n^2) which is fine at the sizes used here.
  for (int k = 0; k <= m; ++k) {
    double s = 1.0;
    for (int j = 2; j <= m; j += 2) {
      double bj = (j == m) ? 1.0 : 2.0;
      s -= bj * std::cos(j * k * M_PI / m) / (j * j - 1);
    }
    double wk = 2.0 * s / m;
    if (k == 0 || k == m) wk *= 0.5;
    w[k] = wk;
  }
  // CGL nodes ascend while the classical formula indexes from +1; the
  // weights are symmetric so no reversal is needed.
  return w;
}

}  // namespace ddecert
