#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ddecert/certificate.hpp"
#include "test_helpers.hpp"

using namespace ddecert;
using test::atom_kernel;
using test::scalar;
using test::scalar_system;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

}  // namespace

TEST_CASE("gap equals squared rate margin minus weighted moment") {
  DelayKernel k = atom_kernel({{-0.7, 0.8}, {-0.2, -0.3}});
  test::add_constant_density(k, 0.4);
  const double lambda = -2.5;
  for (double mu : {-1.0, -0.25, 0.0, 0.5, 2.0}) {
    const double expected =
        (mu - lambda) * (mu - lambda) -
        total_variation(k) * exp_moment(k, mu);
    CHECK(dissipativity_gap(lambda, mu, k) ==
          doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("gap requires a rate above the drift constant") {
  DelayKernel k = atom_kernel({{-1.0, 1.0}});
  CHECK(code_of([&] { (void)dissipativity_gap(0.0, 0.0, k); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([&] { (void)dissipativity_gap(0.0, -1.0, k); }) ==
        ErrorCode::invalid_argument);
  CHECK_NOTHROW((void)dissipativity_gap(0.0, 1e-9, k));
}

TEST_CASE("density gap rejects empty densities") {
  DelayDensity d;
  CHECK(code_of([&] { (void)density_gap(-1.0, 0.0, d); }) ==
        ErrorCode::invalid_argument);
  d.breakpoints = {-1.0, 0.0};
  d.pieces = {{scalar(0.5)}};
  const double g = density_gap(-2.0, 0.0, d);
  CHECK(g == doctest::Approx(4.0 - 0.25).epsilon(1e-14));
}

TEST_CASE("single point delay certificate at rate zero") {
  // u' = -2 u(t) + u(t-1): gamma = 2, gap = 4 - 1, tau = 2 away from the
  // delay and 3/2 on its left side.
  const auto sys = scalar_system(-2.0, {{-1.0, 1.0}});
  const auto cert = build_certificate(sys, 0.0);
  CHECK(cert.lambda == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(cert.mu == 0.0);
  CHECK(cert.gamma == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cert.gap == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(cert.c1 == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(cert.c2 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cert.weight.scale() == doctest::Approx(0.5).epsilon(1e-14));

  CHECK(cert.weight.value(-1.0, Side::left) ==
        doctest::Approx(1.5).epsilon(1e-14));
  CHECK(cert.weight.value(-1.0, Side::right) ==
        doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cert.weight.value(-0.5) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cert.weight.value(0.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cert.weight.derivative(-0.5) == doctest::Approx(0.0));

  // Both one-sided samples at the delay location are recorded.
  bool saw_left = false;
  bool saw_right = false;
  for (const auto& s : cert.samples) {
    CHECK(s.value >= cert.c1 - 1e-14);
    CHECK(s.value <= cert.c2 + 1e-14);
    if (s.s == -1.0 && s.side == Side::left) saw_left = true;
    if (s.s == -1.0 && s.side == Side::right) saw_right = true;
  }
  CHECK(saw_left);
  CHECK(saw_right);
}

TEST_CASE("constant density certificate has a linear weight at rate zero") {
  LinearDelaySystem sys;
  sys.drift = scalar(-3.0);
  sys.kernel.dimension = 1;
  test::add_constant_density(sys.kernel, 1.0);
  const auto cert = build_certificate(sys, 0.0);
  CHECK(cert.gamma == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(cert.gap == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(cert.weight.scale() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  // tau(s) = 3 + s/3 on [-1, 0].
  for (double s : {-1.0, -0.75, -0.3, 0.0}) {
    CHECK(cert.weight.value(s) == doctest::Approx(3.0 + s / 3.0).epsilon(1e-13));
    CHECK(cert.weight.derivative(s, Side::right) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(cert.weight.derivative(s, Side::left) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  }
  CHECK(cert.c1 == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
  CHECK(cert.c2 == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("positive rate weight grows into the past and jumps at atoms") {
  const auto sys = scalar_system(-2.0, {{-1.0, 1.0}});
  const double mu = 0.5;
  const auto cert = build_certificate(sys, mu);
  const double gamma = 2.5;
  const double gap = gamma * gamma - std::exp(-2.0 * mu);
  CHECK(cert.gap == doctest::Approx(gap).epsilon(1e-14));
  CHECK(cert.weight.scale() == doctest::Approx(0.4).epsilon(1e-14));
  // Smooth part tau(s) = gamma e^{-2 mu s}; the jump across the atom is
  // scale * |C| independent of mu.
  CHECK(cert.weight.value(-0.5) ==
        doctest::Approx(gamma * std::exp(mu)).epsilon(1e-14));
  const double jump = cert.weight.value(-1.0, Side::right) -
                      cert.weight.value(-1.0, Side::left);
  CHECK(jump == doctest::Approx(0.4).epsilon(1e-13));
  // The guaranteed floor gap/gamma sits below the sampled minimum here.
  CHECK(cert.c1 == doctest::Approx(gap / gamma).epsilon(1e-13));
  CHECK(cert.c2 == doctest::Approx(gamma * std::exp(2.0 * mu)).epsilon(1e-13));
}

TEST_CASE("equivalence constants bracket every sample") {
  std::vector<LinearDelaySystem> cases;
  cases.push_back(scalar_system(-2.0, {{-1.0, 1.0}}));
  cases.push_back(scalar_system(-4.0, {{-0.5, 1.5}, {-0.25, -0.5}}));
  {
    auto sys = scalar_system(-3.0, {{-0.8, 0.7}});
    test::add_constant_density(sys.kernel, 0.5);
    cases.push_back(sys);
  }
  {
    LinearDelaySystem sys;
    sys.drift = Matrix(2, 2);
    sys.drift << -3.0, 1.0, 0.0, -4.0;
    DelayAtom a;
    a.location = -0.6;
    a.weight = Matrix(2, 2);
    a.weight << 0.5, 0.0, 0.25, -0.5;
    sys.kernel.dimension = 2;
    sys.kernel.atoms.push_back(a);
    cases.push_back(sys);
  }
  for (const auto& sys : cases) {
    for (double mu : {-0.1, 0.0, 0.4}) {
      const double lambda = dissipativity_lambda(sys.drift);
      if (!(mu > lambda)) continue;
      if (dissipativity_gap(lambda, mu, sys.kernel) <= 0.0) continue;
      const auto cert = build_certificate(sys, mu);
      CHECK(cert.c1 > 0.0);
      double lo = cert.samples.front().value;
      double hi = lo;
      for (const auto& s : cert.samples) {
        lo = std::min(lo, s.value);
        hi = std::max(hi, s.value);
      }
      CHECK(cert.c1 <= lo + 1e-13);
      CHECK(cert.c2 == doctest::Approx(hi).epsilon(1e-14));
      const double floor =
          std::min(1.0, std::exp(2.0 * mu)) * cert.gap / cert.gamma;
      CHECK(cert.c1 >= floor - 1e-13);
    }
  }
}

TEST_CASE("minimal rate for a point delay matches the gap root") {
  // lambda = 0, single delay 0.5 at -0.5: the gap (mu)^2 - 0.25 e^{-mu}
  // vanishes at the frozen root below.
  DelayKernel k = atom_kernel({{-0.5, 0.5}});
  const double root = 0.40777670940448033;
  const double got = min_mu(0.0, k, 1e-10);
  CHECK(got == doctest::Approx(root).epsilon(1e-8));
  CHECK(dissipativity_gap(0.0, root + 1e-6, k) > 0.0);
  CHECK(dissipativity_gap(0.0, root - 1e-6, k) < 0.0);
}

TEST_CASE("minimal rate is sharp for a single delay at the horizon") {
  // For u' = b u + c u(t-1) with c > 0 the rightmost characteristic root
  // theta solves (theta - b) e^{theta} = c, which is exactly where the gap
  // at lambda = b closes. Frozen root for b = -3, c = 1.
  DelayKernel k = atom_kernel({{-1.0, 1.0}});
  CHECK(min_mu(-3.0, k, 1e-12) ==
        doctest::Approx(-0.792059968430677).epsilon(1e-9));
}

TEST_CASE("minimal rate of a delay-free system is the drift constant") {
  DelayKernel k;
  k.dimension = 1;
  CHECK(min_mu(-2.0, k, 1e-10) == -2.0);
  CHECK(code_of([&] { (void)min_mu(-2.0, k, 0.0); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("certificates exist exactly above the minimal rate") {
  const auto sys = scalar_system(0.0, {{-0.5, 0.5}});
  DelayKernel k = sys.kernel;
  const double m = min_mu(0.0, k, 1e-10);
  CHECK_NOTHROW((void)build_certificate(sys, m + 0.01));
  CHECK(code_of([&] { (void)build_certificate(sys, m - 0.05); }) ==
        ErrorCode::no_certificate);
}

TEST_CASE("corollary bounds") {
  DelayKernel k = atom_kernel({{-1.0, 1.0}});
  const auto b = corollary_bounds(-2.0, k);
  // V * exp_moment(-2) = e^4, so the sufficient rate is -2 + e^2.
  CHECK(b.mu_sufficient ==
        doctest::Approx(-2.0 + std::exp(2.0)).epsilon(1e-14));
  CHECK(b.zero_dissipative);
  CHECK(b.webb_mu == 0.0);

  const auto b2 = corollary_bounds(1.0, atom_kernel({{-1.0, 0.5}}));
  CHECK_FALSE(b2.zero_dissipative);
  CHECK(b2.webb_mu == doctest::Approx(1.5).epsilon(1e-14));

  // The sufficient rate always carries a nonnegative gap.
  for (double lambda : {-3.0, -0.5, 0.0, 1.0}) {
    for (double w : {0.25, 1.0, 2.0}) {
      DelayKernel kk = atom_kernel({{-0.4, w}});
      const auto bb = corollary_bounds(lambda, kk);
      CHECK(bb.mu_sufficient > lambda);
      CHECK(dissipativity_gap(lambda, bb.mu_sufficient, kk) >= -1e-12);
    }
  }
}

TEST_CASE("shift certificate always exists") {
  const auto sys = scalar_system(1.0, {{-1.0, 0.5}});
  const auto shift = generalized_contraction_shift(sys);
  CHECK(shift.nu == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(shift.certificate.mu == 0.0);
  CHECK(shift.certificate.lambda == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(shift.certificate.gap == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(shift.certificate.c1 > 0.0);

  // Strongly unstable drift with a fat kernel still shifts to a valid
  // rate-0 certificate.
  auto wild = scalar_system(4.0, {{-0.3, 2.0}, {-0.9, -1.5}});
  test::add_constant_density(wild.kernel, 1.0);
  const auto s2 = generalized_contraction_shift(wild);
  CHECK(s2.certificate.gap > 0.0);
  CHECK(s2.certificate.c1 > 0.0);
  CHECK(s2.nu == doctest::Approx(4.0 + 4.5 + 1.0).epsilon(1e-13));
}

TEST_CASE("quadratic renorm of a stable companion pair") {
  Matrix a(2, 2);
  a << 0.0, 1.0, -2.0, -3.0;
  const auto r = lyapunov_renorm(a, Matrix::Identity(2, 2));
  CHECK(r.q(0, 0) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(r.q(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.q(1, 0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.q(1, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.gamma_lower ==
        doctest::Approx((3.0 - std::sqrt(5.0)) / 4.0).epsilon(1e-12));
}

TEST_CASE("renorm solves the stationary equation") {
  Matrix a(3, 3);
  a << -1.0, 2.0, 0.5, 0.0, -3.0, 1.0, 0.0, 0.0, -0.5;
  Matrix c(1, 3);
  c << 1.0, 0.5, -0.25;
  const auto r = lyapunov_renorm(a, c);
  const Matrix residual =
      a.transpose() * r.q + r.q * a + c.transpose() * c;
  CHECK(residual.norm() < 1e-12);
  CHECK(r.gamma_lower > 0.0);
  CHECK((r.q - r.q.transpose()).norm() == 0.0);
}

TEST_CASE("renorm rejects unstable or unobservable inputs") {
  CHECK(code_of([] {
          (void)lyapunov_renorm(scalar(1.0), scalar(1.0));
        }) == ErrorCode::unstable);
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = -2.0;
  Matrix c(1, 2);
  c << 1.0, 0.0;
  CHECK(code_of([&] { (void)lyapunov_renorm(a, c); }) ==
        ErrorCode::unobservable);
  Matrix bad(1, 2);
  bad << 1.0, 0.0;
  CHECK(code_of([&] { (void)lyapunov_renorm(bad, bad); }) ==
        ErrorCode::invalid_argument);
}

TEST_CASE("certificate argument validation") {
  const auto sys = scalar_system(-2.0, {{-1.0, 1.0}});
  CHECK(code_of([&] { (void)build_certificate(sys, -2.0); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([&] { (void)build_certificate(sys, -3.0); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([&] { (void)build_certificate(sys, 0.0, 1); }) ==
        ErrorCode::invalid_argument);
  // Heavy kernel: V = 2 kills the gap at rate 0.
  const auto heavy = scalar_system(-1.0, {{-1.0, 2.0}});
  CHECK(code_of([&] { (void)build_certificate(heavy, 0.0); }) ==
        ErrorCode::no_certificate);
}
