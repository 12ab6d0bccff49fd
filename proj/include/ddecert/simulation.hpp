#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "ddecert/certificate.hpp"
#include "ddecert/kernel.hpp"

namespace ddecert {

/// History data on [-1, 0], sampled on a uniform grid with stored slopes;
/// evaluation between grid points is cubic Hermite.
struct HistorySegment {
  double step = 0.0;
  std::vector<Vector> values;  // at -1, -1+step, ..., 0
  std::vector<Vector> slopes;

  Vector at(double sigma) const;
  int grid_count() const { return static_cast<int>(values.size()); }

  static HistorySegment constant(const Vector& value, double step);
  /// Smooth random history: a low-order trigonometric polynomial with
  /// coefficients drawn from the seeded stream.
  static HistorySegment random(int dim, std::uint64_t seed, double step);
};

/// Dense solution of the delay system on [0, t_final]: values and slopes
/// on the step grid, plus the history it started from.
struct DeterministicTrajectory {
  double step = 0.0;
  HistorySegment history;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> slopes;
  std::vector<double> checkpoint_times;  // optional annotation, see
  std::vector<double> segment_norms;     // contraction_report

  Vector at(double t) const;
  const Vector& back() const { return states.back(); }
};

struct ContractionReport {
  double mu = 0.0;
  bool pass = false;
  std::vector<double> times;
  std::vector<double> norms;  // certificate-weighted segment norms
  double max_ratio = 0.0;     // max over t of norm(t) / (norm(0) e^{mu t})
};

/// Integrates du/dt = B u(t) + sum_i C_i u(t + r_i) + integral of the
/// density against the past, by steps of the unit delay interval with a
/// classical Runge-Kutta sweep inside each step. Atom delays are snapped
/// to the step grid; snapping distances above 1e-12 are reported through
/// the optional warning sink.
DeterministicTrajectory integrate_dde(
    const LinearDelaySystem& system, const Vector& x0,
    const HistorySegment& history, double t_final, double step,
    std::function<void(const std::string&)> warn = {});

/// Weighted history norm sqrt(|x|^2 + integral tau |f|^2) of the
/// trajectory segment ending at time t (t >= 0).
double weighted_norm(const DeterministicTrajectory& traj,
                     const ContractionCertificate& cert, double t);

/// Checks norm(t) <= norm(0) e^{mu t} on a checkpoint grid; mu_override
/// replaces the certificate rate (for empirical-rate probes).
ContractionReport contraction_report(const DeterministicTrajectory& traj,
                                     const ContractionCertificate& cert,
                                     std::optional<double> mu_override = {},
                                     double checkpoint_every = 0.5);

/// Drift and diffusion presets for the stochastic runs; both are globally
/// Lipschitz by construction.
struct NonlinearSpec {
  enum class Kind { zero, tanh_drift, additive_noise, linear_noise };
  Kind kind = Kind::zero;
  double amplitude = 0.0;
};

struct SddePairConfig {
  Vector x0_a;
  Vector x0_b;
  double dt = 1e-3;
  double t_final = 20.0;
  int paths = 100;
  std::uint64_t seed = 1;
  double checkpoint_every = 0.1;
  NonlinearSpec drift_perturbation;
  NonlinearSpec noise;
};

/// Paired Euler-Maruyama trajectories driven by the same Brownian
/// increments; records the squared certificate-weighted distance of the
/// pair at every checkpoint.
struct StochasticEnsemble {
  int paths = 0;
  std::uint64_t seed = 0;
  double dt = 0.0;
  double mu = 0.0;  // rate of the weighting certificate
  std::vector<double> checkpoint_times;
  std::vector<std::vector<double>> sq_distance;  // [path][checkpoint]
  bool blowup = false;
};

StochasticEnsemble simulate_sdde_pair(const LinearDelaySystem& system,
                                      const ContractionCertificate& cert,
                                      const SddePairConfig& config);

enum class StabilityFunctional { mean_square_contraction, as_lyapunov };

struct StabilityEstimate {
  StabilityFunctional functional = StabilityFunctional::mean_square_contraction;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int paths = 0;
  bool blowup = false;
};

struct MeanSquareReport {
  StabilityEstimate estimate;
  double condition_lhs = 0.0;  // 2(lambda + V e^{-lambda}) + 2 Lf + Lg^2
  double omega = 0.0;
  bool condition_holds = false;
  double cert_mu = 0.0;
  std::vector<double> checkpoint_times;
  std::vector<double> mean_sq_distance;  // ensemble average per checkpoint
};

/// Fits the mean-square contraction rate by least squares on the log of
/// the ensemble-averaged squared distance over the second half of the
/// run; the confidence interval is a seeded path-resampling bootstrap.
MeanSquareReport mean_square_contraction(const LinearDelaySystem& system,
                                         const SddePairConfig& config,
                                         double omega);

struct AsLyapunovReport {
  StabilityEstimate estimate;
  double b = 0.0;
  double c = 0.0;
  double sigma = 0.0;
  bool noise_dominates_drift = false;   // b < sigma^2 / 2
  bool delay_within_margin = false;     // |c| < e^{-3 sigma^2/2}(sigma^2/2 - b)
  bool region_ok = false;
};

/// Almost-sure exponent of dx = (b x(t) + c x(t-1)) dt + sigma x dW,
/// estimated as the path average of log|x(t_final)| / t_final.
AsLyapunovReport as_lyapunov_exponent(double b, double c, double sigma,
                                      double dt, double t_final, int paths,
                                      std::uint64_t seed);

/// Worker cap for path-parallel ensembles: the DDECERT_THREADS variable
/// when set (0 or unset means hardware concurrency). Results do not
/// depend on the cap.
int thread_cap();
void set_thread_cap(int n);

}  // namespace ddecert
