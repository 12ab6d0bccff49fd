#include "ddecert/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ddecert/quadrature.hpp"

namespace ddecert {

double dominant_real_root(double b, double c, double tol) {
  if (!(c > 0.0))
    fail(ErrorCode::invalid_argument,
         "dominant_real_root requires c > 0; for c <= 0 the dominant root "
         "can be complex, use the collocation spectrum instead");
  if (!(tol > 0.0))
    fail(ErrorCode::invalid_argument, "dominant_real_root: tol must be > 0");
  // g(t) = t - b - c e^{-t} is increasing (c > 0) with a unique real root
  // above b. Expand the upper end until it brackets, then Newton with a
  // bisection fallback keeps every iterate inside the bracket.
  auto g = [&](double t) { return t - b - c * std::exp(-t); };
  double lo = b;
  double hi = b + c + 1.0;
  int guard = 0;
  while (g(hi) <= 0.0) {
    hi = b + 2.0 * (hi - b);
    if (++guard > 200)
      fail(ErrorCode::internal, "dominant_real_root: bracketing failed");
  }
  double t = 0.5 * (lo + hi);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 200; ++it) {
    const double gt = g(t);
    if (gt > 0.0)
      hi = t;
    else
      lo = t;
    const double dg = 1.0 + c * std::exp(-t);
    double next = t - gt / dg;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - t);
    t = next;
    if (step <= 0.25 * tol || step <= 4.0 * eps * std::max(1.0, std::abs(t)))
      break;
  }
  return t;
}

ComplexMatrix characteristic_matrix(const LinearDelaySystem& system,
                                    Complex theta) {
  system.validate();
  const int n = system.dim();
  ComplexMatrix m = theta * ComplexMatrix::Identity(n, n);
  m -= system.drift.cast<Complex>();
  for (const auto& atom : system.kernel.atoms)
    m -= std::exp(theta * atom.location) * atom.weight.cast<Complex>();
  if (system.kernel.density) {
    const DelayDensity& d = *system.kernel.density;
    const int pts = density_gauss_points(d.max_degree()) + 10;
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (int p = 0; p < d.piece_count(); ++p) {
      const double a = d.breakpoints[p];
      const double b = d.breakpoints[p + 1];
      const GaussRule& rule = gauss_legendre(pts);
      const double mid = 0.5 * (a + b);
      const double half = 0.5 * (b - a);
      for (int i = 0; i < pts; ++i) {
        const double s = mid + half * rule.nodes[i];
        acc += (half * rule.weights[i]) * std::exp(theta * s) *
               d.value(s, p).cast<Complex>();
      }
    }
    m -= acc;
  }
  return m;
}

double verify_characteristic(const LinearDelaySystem& system, Complex theta) {
  ComplexMatrix m = characteristic_matrix(system, theta);
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().minCoeff();
}

SpectrumApproximation generator_eigenvalues(const LinearDelaySystem& system,
                                            int nodes_per_panel) {
  system.validate();
  const CollocationLayout layout =
      make_collocation(system.kernel, nodes_per_panel);
  const Matrix op = assemble_generator_matrix(system, layout);
  const int n = system.dim();
  const int z = layout.zero_index();

  Eigen::EigenSolver<Matrix> es(op);
  if (es.info() != Eigen::Success)
    fail(ErrorCode::internal, "eigenvalue iteration failed to converge");

  SpectrumApproximation out;
  out.nodes_per_panel = nodes_per_panel;
  out.panel_breaks = layout.breaks;
  const int total = static_cast<int>(op.rows());
  out.eigenvalues.reserve(total);
  out.residuals.reserve(total);
  out.spurious.reserve(total);

  std::vector<int> order(total);
  for (int i = 0; i < total; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Complex ea = es.eigenvalues()(a), eb = es.eigenvalues()(b);
    if (ea.real() != eb.real()) return ea.real() > eb.real();
    return ea.imag() < eb.imag();
  });

  out.abscissa = -std::numeric_limits<double>::infinity();
  out.abscissa_unfiltered = -std::numeric_limits<double>::infinity();
  for (int idx : order) {
    const Complex theta = es.eigenvalues()(idx);
    const ComplexVector vec = es.eigenvectors().col(idx);
    const ComplexVector head = vec.segment(z * n, n);
    // The head block is the mode's value at s = 0; modes supported only
    // on the history grid never satisfy the characteristic equation.
    double residual = std::numeric_limits<double>::infinity();
    const double head_norm = head.norm();
    if (head_norm > 1e-12 * vec.norm()) {
      const ComplexMatrix cm = characteristic_matrix(system, theta);
      residual = (cm * head).norm() / head_norm;
    }
    const bool is_spurious = !(residual <= kSpuriousResidual);
    out.eigenvalues.push_back(theta);
    out.residuals.push_back(residual);
    out.spurious.push_back(is_spurious);
    out.abscissa_unfiltered = std::max(out.abscissa_unfiltered, theta.real());
    if (!is_spurious) out.abscissa = std::max(out.abscissa, theta.real());
  }
  if (!std::isfinite(out.abscissa)) out.abscissa = out.abscissa_unfiltered;
  return out;
}

}  // namespace ddecert
