#pragma once

#include <optional>
#include <vector>

#include "ddecert/types.hpp"

namespace ddecert {

/// Point mass C * u(t + location) with location in [-1, 0].
struct DelayAtom {
  double location = 0.0;
  Matrix weight;
};

/// Piecewise-polynomial matrix density on [-1, 0]. Piece i lives on
/// [breakpoints[i], breakpoints[i+1]] and is a polynomial in the global
/// delay variable sigma, coefficients stored constant term first.
struct DelayDensity {
  std::vector<double> breakpoints;
  std::vector<std::vector<Matrix>> pieces;

  int piece_count() const { return static_cast<int>(pieces.size()); }
  int max_degree() const;

  /// Index of the piece containing sigma; at an interior breakpoint the
  /// flag picks which neighbour (breakpoints carry no mass, so this only
  /// matters for pointwise evaluation).
  int piece_at(double sigma, bool from_left) const;

  Matrix value(double sigma, int piece) const;
  Matrix value(double sigma, bool from_left = false) const;

  void validate(int dim) const;
};

/// Matrix measure on [-1, 0]: finitely many atoms plus an optional density.
struct DelayKernel {
  int dimension = 1;
  std::vector<DelayAtom> atoms;
  std::optional<DelayDensity> density;

  bool empty() const { return atoms.empty() && !density.has_value(); }
  std::vector<double> atom_locations() const;
  void validate() const;
};

/// du/dt(t) = drift * u(t) + integral of u(t + sigma) against the kernel.
struct LinearDelaySystem {
  Matrix drift;
  DelayKernel kernel;

  int dim() const { return static_cast<int>(drift.rows()); }
  void validate() const;
};

/// Least lambda with <Bx, x> <= lambda |x|^2, i.e. max eig of (B + B^T)/2.
double dissipativity_lambda(const Matrix& drift);

/// Total variation of the kernel in operator norm:
/// sum of atom norms plus the integral of the pointwise density norm.
double total_variation(const DelayKernel& kernel);

/// integral over [-1,0] of e^{2 mu r} d|kernel|(r).
double exp_moment(const DelayKernel& kernel, double mu);

/// integral over [-1,0] of e^{2 mu r} |density(r)|^2 dr (densities only).
double sq_exp_moment(const DelayDensity& density, double mu);
double sq_exp_moment(const DelayKernel& kernel, double mu);

/// Gauss point count used per density piece of polynomial degree d.
int density_gauss_points(int degree);

}  // namespace ddecert
