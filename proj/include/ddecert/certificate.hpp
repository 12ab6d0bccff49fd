#pragma once

#include <vector>

#include "ddecert/kernel.hpp"

namespace ddecert {

/// Which one-sided limit to take at a discontinuity of the weight.
enum class Side { left, right };

/// Scalar weight tau on [-1, 0] defining the history inner product
/// |x|^2 + integral tau(s) |f(s)|^2 ds. Constructed as
///   tau(s) = e^{-2 mu s} * (gamma - scale * tail_moment(s)),
/// where tail_moment(s) integrates e^{2 mu r} against the kernel's
/// variation measure over (s, 0]. tau steps up by scale * |C| across each
/// atom and is smooth in between; it is positive on all of [-1, 0]
/// exactly when the certificate's rate gap is positive.
class WeightFunction {
 public:
  WeightFunction() = default;
  WeightFunction(const DelayKernel& kernel, double mu, double gamma,
                 double scale);

  double mu() const { return mu_; }
  double gamma() const { return gamma_; }
  double scale() const { return scale_; }
  const DelayKernel& kernel() const { return kernel_; }

  double value(double s, Side side = Side::right) const;
  /// d(tau)/ds on the smooth parts, one-sided at kinks and atoms.
  double derivative(double s, Side side = Side::right) const;
  /// integral of e^{2 mu r} d|kernel|(r) over (s, 0]; Side::left includes
  /// an atom sitting exactly at s, Side::right excludes it.
  double tail_moment(double s, Side side = Side::right) const;

  /// Sorted locations where tau is non-smooth: -1, 0, atoms, breakpoints.
  std::vector<double> panel_breaks() const;

 private:
  DelayKernel kernel_;
  double mu_ = 0.0;
  double gamma_ = 0.0;
  double scale_ = 0.0;
  std::vector<double> atom_norms_;
};

struct WeightSample {
  double s;
  Side side;
  double value;
};

/// Verified contraction data at decay rate mu: the weight together with
/// its equivalence constants c1 <= tau <= c2.
struct ContractionCertificate {
  double lambda = 0.0;
  double mu = 0.0;
  double gamma = 0.0;
  double gap = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  WeightFunction weight;
  std::vector<WeightSample> samples;
};

struct CorollaryBounds {
  double mu_sufficient = 0.0;
  bool zero_dissipative = false;
  double webb_mu = 0.0;
};

struct ShiftCertificate {
  double nu = 0.0;
  ContractionCertificate certificate;
};

struct RenormMatrix {
  Matrix q;
  double gamma_lower = 0.0;
};

inline constexpr int kDefaultGridPointsPerPanel = 64;

/// (mu - lambda)^2 - V * exp_moment(kernel, mu); a certificate at rate mu
/// exists iff this is positive. Requires mu > lambda.
double dissipativity_gap(double lambda, double mu, const DelayKernel& kernel);

/// Same gap specialised to pure densities (atoms rejected).
double density_gap(double lambda, double mu, const DelayDensity& density);

/// Infimum of rates with a positive gap, located by bisection to within
/// tol. Equals lambda when the kernel vanishes.
double min_mu(double lambda, const DelayKernel& kernel, double tol);

CorollaryBounds corollary_bounds(double lambda, const DelayKernel& kernel);

ContractionCertificate build_certificate(
    const LinearDelaySystem& system, double mu,
    int grid_points_per_panel = kDefaultGridPointsPerPanel);

/// Shifts the drift by -nu*I with nu = max(0, lambda + V) + 1 so that a
/// rate-0 certificate always exists for the shifted system.
ShiftCertificate generalized_contraction_shift(const LinearDelaySystem& system);

/// Solves A^T Q + Q A = -C^T C for the stable, observable pair and
/// reports the smallest eigenvalue of Q.
RenormMatrix lyapunov_renorm(const Matrix& a, const Matrix& c);

}  // namespace ddecert
