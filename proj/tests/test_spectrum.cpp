#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "ddecert/certificate.hpp"
#include "ddecert/spectrum.hpp"
#include "test_helpers.hpp"

using namespace ddecert;
using test::atom_kernel;
using test::scalar;
using test::scalar_system;

namespace {

// Smallest distance from target to any computed non-spurious eigenvalue.
double mode_distance(const SpectrumApproximation& sp, Complex target) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < sp.eigenvalues.size(); ++i) {
    if (sp.spurious[i]) continue;
    best = std::min(best, std::abs(sp.eigenvalues[i] - target));
  }
  return best;
}

}  // namespace

TEST_CASE("dominant real root of the scalar characteristic equation") {
  // Frozen roots of theta = b + c e^{-theta}.
  CHECK(dominant_real_root(-2.0, 1.0) ==
        doctest::Approx(-0.44285440100238858).epsilon(1e-12));
  CHECK(dominant_real_root(0.5, 0.3) ==
        doctest::Approx(0.65572039773694981).epsilon(1e-12));
  CHECK(dominant_real_root(-3.0, 1.0) ==
        doctest::Approx(-0.792059968430677).epsilon(1e-12));
  // The root indeed solves the equation.
  for (double b : {-5.0, -1.0, 0.0, 2.0}) {
    for (double c : {0.1, 1.0, 4.0}) {
      const double t = dominant_real_root(b, c);
      CHECK(t - b - c * std::exp(-t) == doctest::Approx(0.0).epsilon(1e-10));
      CHECK(t > b);
    }
  }
}

TEST_CASE("dominant real root rejects nonpositive feedback") {
  CHECK_THROWS_WITH_AS((void)dominant_real_root(0.0, -1.0),
                       doctest::Contains("c > 0"), Error);
  CHECK_THROWS_AS((void)dominant_real_root(0.0, 0.0), Error);
  CHECK_THROWS_AS((void)dominant_real_root(0.0, 1.0, -1.0), Error);
}

TEST_CASE("characteristic matrix for a point delay") {
  const auto sys = scalar_system(-2.0, {{-1.0, 1.0}});
  const Complex theta(0.3, -0.7);
  const ComplexMatrix cm = characteristic_matrix(sys, theta);
  const Complex expected = theta + 2.0 - std::exp(-theta);
  CHECK(std::abs(cm(0, 0) - expected) < 1e-14);
  // Exactly zero on the (real) spectrum.
  const double root = dominant_real_root(-2.0, 1.0);
  CHECK(verify_characteristic(sys, Complex(root, 0.0)) < 1e-12);
  CHECK(verify_characteristic(sys, Complex(root + 0.3, 0.0)) > 1e-3);
}

TEST_CASE("characteristic matrix integrates densities") {
  // Constant density c: integral of e^{theta sigma} over [-1,0] is
  // (1 - e^{-theta}) / theta.
  LinearDelaySystem sys;
  sys.drift = scalar(-1.0);
  sys.kernel.dimension = 1;
  test::add_constant_density(sys.kernel, 0.75);
  const Complex theta(0.4, 1.1);
  const ComplexMatrix cm = characteristic_matrix(sys, theta);
  const Complex expected =
      theta + 1.0 - 0.75 * (1.0 - std::exp(-theta)) / theta;
  CHECK(std::abs(cm(0, 0) - expected) < 1e-13);
}

TEST_CASE("delay-free system reproduces the drift spectrum") {
  LinearDelaySystem sys;
  sys.drift = Matrix(2, 2);
  sys.drift << -1.0, 2.0, 0.0, -3.0;
  sys.kernel.dimension = 2;
  const auto sp = generator_eigenvalues(sys, 16);
  CHECK(mode_distance(sp, Complex(-1.0, 0.0)) < 1e-9);
  CHECK(mode_distance(sp, Complex(-3.0, 0.0)) < 1e-9);
  CHECK(sp.abscissa == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("point delay spectrum matches the scalar characteristic roots") {
  const auto sys = scalar_system(-2.0, {{-1.0, 1.0}});
  const auto sp = generator_eigenvalues(sys);
  CHECK(sp.abscissa ==
        doctest::Approx(-0.44285440100238858).epsilon(1e-9));
  // Every retained mode satisfies the characteristic equation.
  for (size_t i = 0; i < sp.eigenvalues.size(); ++i) {
    if (sp.spurious[i]) continue;
    CHECK(sp.residuals[i] <= kSpuriousResidual);
    CHECK(verify_characteristic(sys, sp.eigenvalues[i]) < 1e-5);
  }
  CHECK(sp.abscissa <= sp.abscissa_unfiltered + 1e-15);
}

TEST_CASE("oscillatory spectrum of pure negative feedback") {
  // u' = -u(t-1): the rightmost pair, frozen from the characteristic
  // equation theta = -e^{-theta}.
  const auto sys = scalar_system(0.0, {{-1.0, -1.0}});
  const auto sp = generator_eigenvalues(sys);
  const Complex target(-0.31813150520476414, 1.3372357014306894);
  CHECK(mode_distance(sp, target) < 1e-8);
  CHECK(mode_distance(sp, std::conj(target)) < 1e-8);
  CHECK(sp.abscissa == doctest::Approx(target.real()).epsilon(1e-8));
}

TEST_CASE("unstable oscillatory pair is located") {
  // u' = u(t) - 2 u(t-1) has no real characteristic roots; its rightmost
  // pair is frozen below.
  const auto sys = scalar_system(1.0, {{-1.0, -2.0}});
  const auto sp = generator_eigenvalues(sys);
  const Complex target(0.46935363565827386, 1.1326724976048811);
  CHECK(mode_distance(sp, target) < 1e-8);
  CHECK(sp.abscissa == doctest::Approx(target.real()).epsilon(1e-8));
}

TEST_CASE("interior delays split panels and stay accurate") {
  // u' = -u + 0.5 u(t - 1/3): dominant root of theta = -1 + 0.5 e^{-theta/3}
  // rescaled... the root solves theta + 1 = 0.5 e^{-theta/3} directly.
  const auto sys = scalar_system(-1.0, {{-1.0 / 3.0, 0.5}});
  const auto sp = generator_eigenvalues(sys);
  CHECK(sp.panel_breaks.size() == 3);
  // Newton on f(t) = t + 1 - 0.5 e^{-t/3} from an independent solve.
  double t = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double f = t + 1.0 - 0.5 * std::exp(-t / 3.0);
    const double fp = 1.0 + 0.5 / 3.0 * std::exp(-t / 3.0);
    t -= f / fp;
  }
  CHECK(sp.abscissa == doctest::Approx(t).epsilon(1e-9));
}

TEST_CASE("density spectrum converges with panel refinement") {
  LinearDelaySystem sys;
  sys.drift = scalar(-1.0);
  sys.kernel.dimension = 1;
  test::add_constant_density(sys.kernel, -2.0);
  const auto coarse = generator_eigenvalues(sys, 16);
  const auto fine = generator_eigenvalues(sys, 40);
  CHECK(std::abs(coarse.abscissa - fine.abscissa) < 1e-7);
  // The abscissa satisfies the characteristic equation residual test.
  bool found = false;
  for (size_t i = 0; i < fine.eigenvalues.size(); ++i) {
    if (fine.spurious[i]) continue;
    if (std::abs(fine.eigenvalues[i].real() - fine.abscissa) < 1e-12) {
      CHECK(verify_characteristic(sys, fine.eigenvalues[i]) < 1e-7);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("two dimensional delay system with cross coupling") {
  LinearDelaySystem sys;
  sys.drift = Matrix(2, 2);
  sys.drift << -2.0, 1.0, 0.5, -3.0;
  DelayAtom a;
  a.location = -1.0;
  a.weight = Matrix(2, 2);
  a.weight << 0.0, 0.5, -0.5, 0.0;
  sys.kernel.dimension = 2;
  sys.kernel.atoms.push_back(a);
  const auto sp = generator_eigenvalues(sys);
  // Cross-check every retained mode against the analytic characteristic
  // matrix; the abscissa must be attained by a retained mode.
  double best = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < sp.eigenvalues.size(); ++i) {
    if (sp.spurious[i]) continue;
    CHECK(verify_characteristic(sys, sp.eigenvalues[i]) < 1e-5);
    best = std::max(best, sp.eigenvalues[i].real());
  }
  CHECK(sp.abscissa == doctest::Approx(best).epsilon(1e-14));
  // Refinement stability.
  const auto fine = generator_eigenvalues(sys, 48);
  CHECK(std::abs(sp.abscissa - fine.abscissa) < 1e-8);
}

TEST_CASE("spectral abscissa respects certificate rates") {
  // Any certified decay rate must upper-bound the true abscissa.
  for (double b : {-2.0, -3.5}) {
    for (double c : {0.25, 1.0}) {
      const auto sys = scalar_system(b, {{-1.0, c}});
      const double m = min_mu(b, sys.kernel, 1e-10);
      const auto sp = generator_eigenvalues(sys);
      CHECK(sp.abscissa <= m + 1e-7);
    }
  }
}

TEST_CASE("spectrum input validation") {
  const auto sys = scalar_system(-1.0, {{-0.5, 0.5}});
  CHECK_THROWS_AS((void)generator_eigenvalues(sys, 1), Error);
  LinearDelaySystem bad;
  bad.drift = Matrix(2, 3);
  bad.drift.setZero();
  bad.kernel.dimension = 2;
  CHECK_THROWS_AS((void)generator_eigenvalues(bad), Error);
}
