#pragma once

#include <vector>

#include "ddecert/collocation.hpp"
#include "ddecert/kernel.hpp"

namespace ddecert {

/// Eigenvalues of the collocated generator, with a residual check of the
/// characteristic equation for each. Modes whose residual exceeds
/// kSpuriousResidual are discretisation artifacts, not spectrum.
struct SpectrumApproximation {
  std::vector<Complex> eigenvalues;
  std::vector<double> residuals;
  std::vector<bool> spurious;
  double abscissa = 0.0;             // max Re over non-spurious modes
  double abscissa_unfiltered = 0.0;  // max Re over everything
  int nodes_per_panel = 0;
  std::vector<double> panel_breaks;
};

inline constexpr double kSpuriousResidual = 1e-6;
inline constexpr int kDefaultNodesPerPanel = 32;

/// Real root of theta = b + c e^{-theta} with the largest real part,
/// for c > 0 (where the dominant root is real). Safeguarded Newton with
/// a bisection bracket, accurate to tol.
double dominant_real_root(double b, double c, double tol = 1e-12);

SpectrumApproximation generator_eigenvalues(
    const LinearDelaySystem& system,
    int nodes_per_panel = kDefaultNodesPerPanel);

/// theta*I - B - integral of e^{theta*sigma} against the kernel.
ComplexMatrix characteristic_matrix(const LinearDelaySystem& system,
                                    Complex theta);

/// Smallest singular value of the characteristic matrix at theta;
/// zero exactly on the spectrum.
double verify_characteristic(const LinearDelaySystem& system, Complex theta);

}  // namespace ddecert
