#include "ddecert/kernel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "ddecert/quadrature.hpp"

namespace ddecert {

namespace {
constexpr double kLocationTol = 1e-12;
}

int DelayDensity::max_degree() const {
  int d = 0;
  for (const auto& coeffs : pieces)
    d = std::max(d, static_cast<int>(coeffs.size()) - 1);
  return d;
}

int DelayDensity::piece_at(double sigma, bool from_left) const {
  const int n = piece_count();
  if (sigma <= breakpoints.front()) return 0;
  if (sigma >= breakpoints.back()) return n - 1;
  // upper_bound gives the first breakpoint strictly above sigma.
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), sigma);
  int piece = static_cast<int>(it - breakpoints.begin()) - 1;
  if (from_left && sigma == breakpoints[piece] && piece > 0) --piece;
  return piece;
}

Matrix DelayDensity::value(double sigma, int piece) const {
  const auto& coeffs = pieces[piece];
  Matrix acc = coeffs.back();
  for (int k = static_cast<int>(coeffs.size()) - 2; k >= 0; --k)
    acc = (acc * sigma + coeffs[k]).eval();
  return acc;
}

Matrix DelayDensity::value(double sigma, bool from_left) const {
  return value(sigma, piece_at(sigma, from_left));
}

void DelayDensity::validate(int dim) const {
  if (breakpoints.size() < 2)
    fail(ErrorCode::invalid_argument, "density needs at least two breakpoints");
  if (pieces.size() + 1 != breakpoints.size())
    fail(ErrorCode::invalid_argument,
         "density has " + std::to_string(pieces.size()) + " pieces but " +
             std::to_string(breakpoints.size()) + " breakpoints");
  if (std::abs(breakpoints.front() + 1.0) > kLocationTol ||
      std::abs(breakpoints.back()) > kLocationTol)
    fail(ErrorCode::invalid_argument, "density breakpoints must span [-1, 0]");
  for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
    if (breakpoints[i + 1] - breakpoints[i] <= kLocationTol)
      fail(ErrorCode::invalid_argument,
           "density breakpoints must be strictly increasing");
  for (size_t i = 0; i < pieces.size(); ++i) {
    if (pieces[i].empty())
      fail(ErrorCode::invalid_argument,
           "density piece " + std::to_string(i) + " has no coefficients");
    for (const Matrix& c : pieces[i]) {
      if (c.rows() != dim || c.cols() != dim)
        fail(ErrorCode::invalid_argument,
             "density piece " + std::to_string(i) +
                 " coefficient dimension mismatch");
      require_finite(c, "density coefficient");
    }
  }
}

std::vector<double> DelayKernel::atom_locations() const {
  std::vector<double> locs;
  locs.reserve(atoms.size());
  for (const auto& a : atoms) locs.push_back(a.location);
  return locs;
}

void DelayKernel::validate() const {
  if (dimension < 1)
    fail(ErrorCode::invalid_argument, "kernel dimension must be positive");
  for (size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (!(a.location >= -1.0 && a.location <= 0.0))
      fail(ErrorCode::invalid_argument,
           "atom " + std::to_string(i) + ": delay " +
               std::to_string(a.location) + " outside [-1, 0]");
    if (a.weight.rows() != dimension || a.weight.cols() != dimension)
      fail(ErrorCode::invalid_argument,
           "atom " + std::to_string(i) + ": weight dimension mismatch");
    require_finite(a.weight, "atom weight");
    for (size_t j = 0; j < i; ++j)
      if (std::abs(atoms[j].location - a.location) <= kLocationTol)
        fail(ErrorCode::invalid_argument,
             "atoms " + std::to_string(j) + " and " + std::to_string(i) +
                 " share the delay " + std::to_string(a.location));
  }
  if (density) density->validate(dimension);
}

void LinearDelaySystem::validate() const {
  require_square(drift, "drift");
  require_finite(drift, "drift");
  kernel.validate();
  if (kernel.dimension != dim())
    fail(ErrorCode::invalid_argument,
         "kernel dimension " + std::to_string(kernel.dimension) +
             " does not match drift dimension " + std::to_string(dim()));
}

double dissipativity_lambda(const Matrix& drift) {
  require_square(drift, "drift");
  require_finite(drift, "drift");
  Matrix sym = 0.5 * (drift + drift.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

int density_gauss_points(int degree) { return (degree + 41) / 2; }

namespace {

// Integrates weight(sigma) * |density(sigma)|-style functions piece by
// piece; each piece is smooth, so one Gauss panel per piece suffices.
template <class F>
double density_integral(const DelayDensity& d, F&& integrand) {
  const int pts = density_gauss_points(d.max_degree());
  double total = 0.0;
  for (int p = 0; p < d.piece_count(); ++p)
    total += gauss_integrate(
        [&](double s) { return integrand(s, p); }, d.breakpoints[p],
        d.breakpoints[p + 1], pts);
  return total;
}

}  // namespace

double total_variation(const DelayKernel& kernel) {
  kernel.validate();
  double tv = 0.0;
  for (const auto& a : kernel.atoms) tv += spectral_norm(a.weight);
  if (kernel.density)
    tv += density_integral(*kernel.density, [&](double s, int p) {
      return spectral_norm(kernel.density->value(s, p));
    });
  return tv;
}

double exp_moment(const DelayKernel& kernel, double mu) {
  kernel.validate();
  if (!std::isfinite(mu))
    fail(ErrorCode::invalid_argument, "exp_moment: mu must be finite");
  double total = 0.0;
  for (const auto& a : kernel.atoms)
    total += std::exp(2.0 * mu * a.location) * spectral_norm(a.weight);
  if (kernel.density)
    total += density_integral(*kernel.density, [&](double s, int p) {
      return std::exp(2.0 * mu * s) * spectral_norm(kernel.density->value(s, p));
    });
  return total;
}

double sq_exp_moment(const DelayDensity& density, double mu) {
  if (!std::isfinite(mu))
    fail(ErrorCode::invalid_argument, "sq_exp_moment: mu must be finite");
  return density_integral(density, [&](double s, int p) {
    double nu = spectral_norm(density.value(s, p));
    return std::exp(2.0 * mu * s) * nu * nu;
  });
}

double sq_exp_moment(const DelayKernel& kernel, double mu) {
  kernel.validate();
  if (!kernel.atoms.empty())
    fail(ErrorCode::invalid_argument,
         "sq_exp_moment is defined for pure densities; kernel has atoms");
  if (!kernel.density) return 0.0;
  return sq_exp_moment(*kernel.density, mu);
}

}  // namespace ddecert
