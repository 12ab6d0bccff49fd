#include "ddecert/certificate.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "ddecert/quadrature.hpp"

namespace ddecert {

namespace {

constexpr double kBreakTol = 1e-12;

// Gap without the mu > lambda precondition; used by the bisection, where
// the lower bracket end sits at lambda itself.
double gap_value(double lambda, double mu, const DelayKernel& kernel) {
  const double g = mu - lambda;
  return g * g - total_variation(kernel) * exp_moment(kernel, mu);
}

std::vector<double> merged_breaks(const DelayKernel& kernel) {
  std::vector<double> breaks = {-1.0, 0.0};
  for (const auto& a : kernel.atoms) breaks.push_back(a.location);
  if (kernel.density)
    breaks.insert(breaks.end(), kernel.density->breakpoints.begin(),
                  kernel.density->breakpoints.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [](double a, double b) {
                             return std::abs(a - b) <= kBreakTol;
                           }),
               breaks.end());
  breaks.front() = -1.0;
  breaks.back() = 0.0;
  return breaks;
}

}  // namespace

WeightFunction::WeightFunction(const DelayKernel& kernel, double mu,
                               double gamma, double scale)
    : kernel_(kernel), mu_(mu), gamma_(gamma), scale_(scale) {
  atom_norms_.reserve(kernel_.atoms.size());
  for (const auto& a : kernel_.atoms)
    atom_norms_.push_back(spectral_norm(a.weight));
}

double WeightFunction::tail_moment(double s, Side side) const {
  double total = 0.0;
  for (size_t i = 0; i < kernel_.atoms.size(); ++i) {
    const double r = kernel_.atoms[i].location;
    if (r > s || (side == Side::left && r == s))
      total += std::exp(2.0 * mu_ * r) * atom_norms_[i];
  }
  if (kernel_.density) {
    const DelayDensity& d = *kernel_.density;
    const int pts = density_gauss_points(d.max_degree());
    for (int p = 0; p < d.piece_count(); ++p) {
      const double lo = std::max(s, d.breakpoints[p]);
      const double hi = d.breakpoints[p + 1];
      if (hi <= lo) continue;
      total += gauss_integrate(
          [&](double r) {
            return std::exp(2.0 * mu_ * r) * spectral_norm(d.value(r, p));
          },
          lo, hi, pts);
    }
  }
  return total;
}

double WeightFunction::value(double s, Side side) const {
  return std::exp(-2.0 * mu_ * s) * (gamma_ - scale_ * tail_moment(s, side));
}

double WeightFunction::derivative(double s, Side side) const {
  double dens = 0.0;
  if (kernel_.density) {
    const DelayDensity& d = *kernel_.density;
    dens = spectral_norm(d.value(s, d.piece_at(s, side == Side::left)));
  }
  return -2.0 * mu_ * value(s, side) + scale_ * dens;
}

std::vector<double> WeightFunction::panel_breaks() const {
  return merged_breaks(kernel_);
}

double dissipativity_gap(double lambda, double mu, const DelayKernel& kernel) {
  if (!(mu > lambda))
    fail(ErrorCode::invalid_argument,
         "dissipativity gap requires mu > lambda (mu = " + std::to_string(mu) +
             ", lambda = " + std::to_string(lambda) + ")");
  return gap_value(lambda, mu, kernel);
}

double density_gap(double lambda, double mu, const DelayDensity& density) {
  if (density.pieces.empty() || density.pieces.front().empty())
    fail(ErrorCode::invalid_argument, "density has no pieces");
  DelayKernel kernel;
  kernel.dimension = static_cast<int>(density.pieces.front().front().rows());
  kernel.density = density;
  return dissipativity_gap(lambda, mu, kernel);
}

double min_mu(double lambda, const DelayKernel& kernel, double tol) {
  if (!(tol > 0.0))
    fail(ErrorCode::invalid_argument, "min_mu: tolerance must be positive");
  kernel.validate();
  if (total_variation(kernel) == 0.0) return lambda;
  // The gap is negative at lambda and eventually positive: grow the upper
  // end until it brackets, then bisect.
  double lo = lambda;
  double hi = lambda + 1.0;
  int guard = 0;
  while (gap_value(lambda, hi, kernel) <= 0.0) {
    hi = lambda + 2.0 * (hi - lambda);
    if (++guard > 200)
      fail(ErrorCode::internal, "min_mu: failed to bracket the gap root");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (gap_value(lambda, mid, kernel) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

CorollaryBounds corollary_bounds(double lambda, const DelayKernel& kernel) {
  kernel.validate();
  CorollaryBounds b;
  const double v = total_variation(kernel);
  b.mu_sufficient = lambda + std::sqrt(v * exp_moment(kernel, lambda));
  b.zero_dissipative = lambda + v < 0.0;
  b.webb_mu = std::max(0.0, lambda + v);
  return b;
}

ContractionCertificate build_certificate(const LinearDelaySystem& system,
                                         double mu,
                                         int grid_points_per_panel) {
  system.validate();
  if (grid_points_per_panel < 2)
    fail(ErrorCode::invalid_argument,
         "certificate grid needs at least 2 points per panel");
  ContractionCertificate cert;
  cert.lambda = dissipativity_lambda(system.drift);
  cert.mu = mu;
  if (!(mu > cert.lambda))
    fail(ErrorCode::invalid_argument,
         "certificate rate mu = " + std::to_string(mu) +
             " must exceed the drift dissipativity constant lambda = " +
             std::to_string(cert.lambda));
  cert.gap = gap_value(cert.lambda, mu, system.kernel);
  if (!(cert.gap > 0.0))
    fail(ErrorCode::no_certificate,
         "no certificate at rate mu = " + std::to_string(mu) +
             ": dissipativity gap = " + std::to_string(cert.gap));
  cert.gamma = mu - cert.lambda;
  const double v = total_variation(system.kernel);
  // Optimal quadratic completion: the cross term 2|f(s)| |u| splits
  // against gamma, leaving the constant factor below on the tail moment.
  const double scale = v / (-2.0 * cert.lambda + 2.0 * mu - cert.gamma);
  cert.weight = WeightFunction(system.kernel, mu, cert.gamma, scale);

  // Sample every smoothness panel from both sides of its endpoints; the
  // weight is monotone-free in general, so interior samples matter too.
  const auto breaks = cert.weight.panel_breaks();
  for (size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p];
    const double b = breaks[p + 1];
    for (int k = 0; k < grid_points_per_panel; ++k) {
      const double t =
          static_cast<double>(k) / (grid_points_per_panel - 1);
      const double s = a + t * (b - a);
      const Side side = (k == grid_points_per_panel - 1) ? Side::left
                                                         : Side::right;
      cert.samples.push_back({s, side, cert.weight.value(s, side)});
    }
  }
  cert.samples.insert(cert.samples.begin(),
                      {-1.0, Side::left, cert.weight.value(-1.0, Side::left)});
  cert.samples.push_back({0.0, Side::right, cert.weight.value(0.0, Side::right)});

  double lo = cert.samples.front().value;
  double hi = lo;
  for (const auto& smp : cert.samples) {
    lo = std::min(lo, smp.value);
    hi = std::max(hi, smp.value);
  }
  // Between samples tau(s) >= e^{-2 mu s} * bracket(-1) with the full-tail
  // bracket, giving a guaranteed positive floor independent of the grid.
  const double floor_bracket =
      cert.gamma - cert.weight.scale() * cert.weight.tail_moment(-1.0, Side::left);
  const double floor =
      std::min(1.0, std::exp(2.0 * mu)) * floor_bracket;
  cert.c1 = std::min(lo, floor);
  cert.c2 = hi;
  if (!(cert.c1 > 0.0) || !std::isfinite(cert.c2))
    fail(ErrorCode::internal, "certificate weight is not uniformly positive");
  return cert;
}

ShiftCertificate generalized_contraction_shift(const LinearDelaySystem& system) {
  system.validate();
  const double lambda = dissipativity_lambda(system.drift);
  const double v = total_variation(system.kernel);
  ShiftCertificate out;
  out.nu = std::max(0.0, lambda + v) + 1.0;
  LinearDelaySystem shifted = system;
  shifted.drift -= out.nu * Matrix::Identity(system.dim(), system.dim());
  out.certificate = build_certificate(shifted, 0.0);
  return out;
}

RenormMatrix lyapunov_renorm(const Matrix& a, const Matrix& c) {
  require_square(a, "A");
  require_finite(a, "A");
  require_finite(c, "C");
  const Eigen::Index n = a.rows();
  if (c.cols() != n)
    fail(ErrorCode::invalid_argument,
         "C must have as many columns as A (got " + std::to_string(c.cols()) +
             ", expected " + std::to_string(n) + ")");
  const double abscissa = spectral_abscissa(a);
  if (!(abscissa < 0.0))
    fail(ErrorCode::unstable,
         "A has spectral abscissa " + std::to_string(abscissa) +
             " >= 0; the Lyapunov integral diverges");
  // Observability of (A, C) makes Q strictly positive definite.
  Matrix obs(c.rows() * n, n);
  Matrix block = c;
  for (Eigen::Index k = 0; k < n; ++k) {
    obs.middleRows(k * c.rows(), c.rows()) = block;
    block = (block * a).eval();
  }
  if (Eigen::ColPivHouseholderQR<Matrix>(obs).rank() < n)
    fail(ErrorCode::unobservable,
         "(A, C) is not observable: Q would be singular and the rescaled "
         "inner product degenerate");
  // Vectorised Sylvester solve: (I kron A^T + A^T kron I) vec(Q) = -vec(C^T C).
  Matrix id = Matrix::Identity(n, n);
  Matrix at = a.transpose();
  Matrix big = Matrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      big.block(i * n, j * n, n, n) += id(i, j) * at;
      big.block(i * n, j * n, n, n) += at(i, j) * id;
    }
  Matrix rhs = -(c.transpose() * c);
  Eigen::Map<Vector> rhs_vec(rhs.data(), n * n);
  Vector q_vec = Eigen::PartialPivLU<Matrix>(big).solve(rhs_vec);
  RenormMatrix out;
  out.q = Eigen::Map<Matrix>(q_vec.data(), n, n);
  out.q = 0.5 * (out.q + out.q.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(out.q, Eigen::EigenvaluesOnly);
  out.gamma_lower = es.eigenvalues().minCoeff();
  if (!(out.gamma_lower > 0.0))
    fail(ErrorCode::internal,
         "Lyapunov solution is not positive definite (min eig = " +
             std::to_string(out.gamma_lower) + ")");
  return out;
}

}  // namespace ddecert
