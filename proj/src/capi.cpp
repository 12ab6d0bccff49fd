#include "ddecert.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "ddecert/certificate.hpp"
#include "ddecert/json_io.hpp"
#include "ddecert/operator_check.hpp"
#include "ddecert/reports.hpp"
#include "ddecert/simulation.hpp"
#include "ddecert/spectrum.hpp"
#include "ddecert/version.hpp"

struct ddec_system {
  ddecert::LinearDelaySystem sys;
};

struct ddec_certificate {
  ddecert::ContractionCertificate cert;
  int grid_points = ddecert::kDefaultGridPointsPerPanel;
};

namespace {

thread_local std::string g_last_error;

int code_of(ddecert::ErrorCode c) {
  using ddecert::ErrorCode;
  switch (c) {
    case ErrorCode::invalid_argument:
      return DDEC_ERR_INVALID;
    case ErrorCode::parse_error:
      return DDEC_ERR_PARSE;
    case ErrorCode::no_certificate:
      return DDEC_ERR_NO_CERTIFICATE;
    case ErrorCode::unstable:
      return DDEC_ERR_UNSTABLE;
    case ErrorCode::unobservable:
      return DDEC_ERR_UNOBSERVABLE;
    case ErrorCode::internal:
      return DDEC_ERR_INTERNAL;
  }
  return DDEC_ERR_INTERNAL;
}

template <class F>
int guarded(F&& fn) {
  try {
    fn();
    return DDEC_OK;
  } catch (const ddecert::Error& e) {
    g_last_error = e.what();
    return code_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DDEC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DDEC_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

int invalid(const char* msg) {
  g_last_error = msg;
  return DDEC_ERR_INVALID;
}

ddecert::NonlinearSpec parse_drift_kind(const char* kind, double amplitude) {
  ddecert::NonlinearSpec spec;
  spec.amplitude = amplitude;
  const std::string k = kind ? kind : "zero";
  if (k == "zero")
    spec.kind = ddecert::NonlinearSpec::Kind::zero;
  else if (k == "tanh")
    spec.kind = ddecert::NonlinearSpec::Kind::tanh_drift;
  else
    ddecert::fail(ddecert::ErrorCode::invalid_argument,
                  "unknown drift perturbation kind: " + k);
  return spec;
}

ddecert::NonlinearSpec parse_noise_kind(const char* kind, double amplitude) {
  ddecert::NonlinearSpec spec;
  spec.amplitude = amplitude;
  const std::string k = kind ? kind : "zero";
  if (k == "zero")
    spec.kind = ddecert::NonlinearSpec::Kind::zero;
  else if (k == "additive")
    spec.kind = ddecert::NonlinearSpec::Kind::additive_noise;
  else if (k == "linear")
    spec.kind = ddecert::NonlinearSpec::Kind::linear_noise;
  else
    ddecert::fail(ddecert::ErrorCode::invalid_argument,
                  "unknown noise kind: " + k);
  return spec;
}

}  // namespace

extern "C" {

const char* ddec_version(void) { return ddecert::kVersion; }

const char* ddec_last_error(void) { return g_last_error.c_str(); }

void ddec_string_free(char* s) { std::free(s); }

void ddec_set_thread_cap(int threads) { ddecert::set_thread_cap(threads); }

int ddec_system_parse(const char* json_text, ddec_system** out) {
  if (!json_text || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    auto sys = std::make_unique<ddec_system>();
    sys->sys = ddecert::parse_system(json_text);
    *out = sys.release();
  });
}

int ddec_system_load(const char* path, ddec_system** out) {
  if (!path || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    auto sys = std::make_unique<ddec_system>();
    sys->sys = ddecert::load_system_file(path);
    *out = sys.release();
  });
}

void ddec_system_free(ddec_system* sys) { delete sys; }

int ddec_system_dim(const ddec_system* sys) {
  return sys ? sys->sys.dim() : 0;
}

int ddec_dissipativity_lambda(const ddec_system* sys, double* out) {
  if (!sys || !out) return invalid("null argument");
  return guarded([&] { *out = ddecert::dissipativity_lambda(sys->sys.drift); });
}

int ddec_total_variation(const ddec_system* sys, double* out) {
  if (!sys || !out) return invalid("null argument");
  return guarded([&] { *out = ddecert::total_variation(sys->sys.kernel); });
}

int ddec_exp_moment(const ddec_system* sys, double mu, double* out) {
  if (!sys || !out) return invalid("null argument");
  return guarded([&] { *out = ddecert::exp_moment(sys->sys.kernel, mu); });
}

int ddec_dissipativity_gap(const ddec_system* sys, double mu, double* out) {
  if (!sys || !out) return invalid("null argument");
  return guarded([&] {
    const double lambda = ddecert::dissipativity_lambda(sys->sys.drift);
    *out = ddecert::dissipativity_gap(lambda, mu, sys->sys.kernel);
  });
}

int ddec_min_mu(const ddec_system* sys, double tol, double* out) {
  if (!sys || !out) return invalid("null argument");
  return guarded([&] {
    const double lambda = ddecert::dissipativity_lambda(sys->sys.drift);
    *out = ddecert::min_mu(lambda, sys->sys.kernel, tol);
  });
}

int ddec_min_mu_report(const ddec_system* sys, double tol, char** json_out) {
  if (!sys || !json_out) return invalid("null argument");
  *json_out = nullptr;
  return guarded([&] {
    const double lambda = ddecert::dissipativity_lambda(sys->sys.drift);
    const double mu = ddecert::min_mu(lambda, sys->sys.kernel, tol);
    *json_out = dup_string(ddecert::min_mu_report_json(lambda, mu, tol));
  });
}

int ddec_bounds_report(const ddec_system* sys, char** json_out) {
  if (!sys || !json_out) return invalid("null argument");
  *json_out = nullptr;
  return guarded([&] {
    const double lambda = ddecert::dissipativity_lambda(sys->sys.drift);
    const auto bounds = ddecert::corollary_bounds(lambda, sys->sys.kernel);
    const double tv = ddecert::total_variation(sys->sys.kernel);
    *json_out = dup_string(ddecert::bounds_report_json(lambda, bounds, tv));
  });
}

int ddec_certify(const ddec_system* sys, double mu, int grid_points,
                 ddec_certificate** out) {
  if (!sys || !out) return invalid("null argument");
  *out = nullptr;
  return guarded([&] {
    auto cert = std::make_unique<ddec_certificate>();
    cert->grid_points =
        grid_points > 0 ? grid_points : ddecert::kDefaultGridPointsPerPanel;
    cert->cert = ddecert::build_certificate(sys->sys, mu, cert->grid_points);
    *out = cert.release();
  });
}

void ddec_certificate_free(ddec_certificate* cert) { delete cert; }

int ddec_certificate_info(const ddec_certificate* cert, double* lambda,
                          double* mu, double* gamma, double* gap, double* c1,
                          double* c2) {
  if (!cert) return invalid("null certificate");
  if (lambda) *lambda = cert->cert.lambda;
  if (mu) *mu = cert->cert.mu;
  if (gamma) *gamma = cert->cert.gamma;
  if (gap) *gap = cert->cert.gap;
  if (c1) *c1 = cert->cert.c1;
  if (c2) *c2 = cert->cert.c2;
  return DDEC_OK;
}

int ddec_certificate_report(const ddec_certificate* cert, char** json_out) {
  if (!cert || !json_out) return invalid("null argument");
  *json_out = nullptr;
  return guarded([&] {
    *json_out = dup_string(
        ddecert::certificate_report_json(cert->cert, cert->grid_points));
  });
}

int ddec_contraction_shift_report(const ddec_system* sys, char** json_out) {
  if (!sys || !json_out) return invalid("null argument");
  *json_out = nullptr;
  return guarded([&] {
    const auto shift = ddecert::generalized_contraction_shift(sys->sys);
    *json_out = dup_string(ddecert::shift_report_json(
        shift, ddecert::kDefaultGridPointsPerPanel));
  });
}

int ddec_lyapunov_renorm(const double* a, const double* c, int n,
                         double* q_out, double* gamma_lower) {
  if (!a || !c || n < 1) return invalid("null or empty matrix input");
  return guarded([&] {
    ddecert::Matrix ma(n, n), mc(n, n);
    for (int r = 0; r < n; ++r)
      for (int col = 0; col < n; ++col) {
        ma(r, col) = a[r * n + col];
        mc(r, col) = c[r * n + col];
      }
    const auto renorm = ddecert::lyapunov_renorm(ma, mc);
    if (q_out)
      for (int r = 0; r < n; ++r)
        for (int col = 0; col < n; ++col) q_out[r * n + col] = renorm.q(r, col);
    if (gamma_lower) *gamma_lower = renorm.gamma_lower;
  });
}

int ddec_lyapunov_renorm_report(const char* pair_json, char** json_out) {
  if (!pair_json || !json_out) return invalid("null argument");
  *json_out = nullptr;
  return guarded([&] {
    auto [a, c] = ddecert::parse_matrix_pair(pair_json);
    const auto renorm = ddecert::lyapunov_renorm(a, c);
    *json_out = dup_string(ddecert::renorm_report_json(renorm));
  });
}

int ddec_dominant_real_root(double b, double c, double tol, double* out) {
  if (!out) return invalid("null argument");
  return guarded([&] { *out = ddecert::dominant_real_root(b, c, tol); });
}

int ddec_spectrum_report(const ddec_system* sys, int nodes_per_panel,
                         char** json_out, char** csv_out) {
  if (!sys || (!json_out && !csv_out)) return invalid("null argument");
  if (json_out) *json_out = nullptr;
  if (csv_out) *csv_out = nullptr;
  return guarded([&] {
    const int n =
        nodes_per_panel > 0 ? nodes_per_panel : ddecert::kDefaultNodesPerPanel;
    const auto spec = ddecert::generator_eigenvalues(sys->sys, n);
    if (json_out) *json_out = dup_string(ddecert::spectrum_report_json(spec));
    if (csv_out) *csv_out = dup_string(ddecert::spectrum_csv(spec));
  });
}

int ddec_verify_characteristic(const ddec_system* sys, double re, double im,
                               double* smallest_sv) {
  if (!sys || !smallest_sv) return invalid("null argument");
  return guarded([&] {
    *smallest_sv =
        ddecert::verify_characteristic(sys->sys, ddecert::Complex(re, im));
  });
}

int ddec_check_margin(const ddec_system* sys, double mu, int nodes_per_panel,
                      double* theta_max, double* margin) {
  if (!sys) return invalid("null argument");
  return guarded([&] {
    const auto cert = ddecert::build_certificate(sys->sys, mu);
    const auto disc = ddecert::discretize_generator(sys->sys, nodes_per_panel);
    const auto report = ddecert::check_dissipativity(disc, cert);
    if (theta_max) *theta_max = report.theta_max;
    if (margin) *margin = report.margin;
  });
}

int ddec_check_report(const ddec_system* sys, double mu, int nodes_per_panel,
                      char** json_out) {
  if (!sys || !json_out) return invalid("null argument");
  *json_out = nullptr;
  return guarded([&] {
    const auto cert = ddecert::build_certificate(sys->sys, mu);
    const auto disc = ddecert::discretize_generator(sys->sys, nodes_per_panel);
    const auto report = ddecert::check_dissipativity(disc, cert);
    *json_out = dup_string(ddecert::check_report_json(report, disc));
  });
}

int ddec_refinement_report(const ddec_system* sys, double mu,
                           const int* node_counts, int count,
                           char** json_out) {
  if (!sys || !json_out || !node_counts || count < 1)
    return invalid("null or empty argument");
  *json_out = nullptr;
  return guarded([&] {
    std::vector<int> counts(node_counts, node_counts + count);
    const auto runs = ddecert::refinement_study(sys->sys, mu, counts);
    *json_out = dup_string(ddecert::refinement_report_json(runs, mu));
  });
}

int ddec_simulate(const ddec_system* sys, double mu, const double* x0,
                  double t_final, double step, uint64_t history_seed,
                  double checkpoint_every, char** csv_out, char** json_out) {
  if (!sys) return invalid("null argument");
  if (csv_out) *csv_out = nullptr;
  if (json_out) *json_out = nullptr;
  return guarded([&] {
    const int n = sys->sys.dim();
    ddecert::HistorySegment history;
    ddecert::Vector start(n);
    if (history_seed != 0) {
      history = ddecert::HistorySegment::random(n, history_seed, step);
      start = history.values.back();
    } else {
      start = ddecert::Vector::Ones(n);
    }
    if (x0) {
      for (int i = 0; i < n; ++i) start(i) = x0[i];
    }
    if (history_seed == 0)
      history = ddecert::HistorySegment::constant(start, step);

    const auto cert = ddecert::build_certificate(sys->sys, mu);
    const auto traj =
        ddecert::integrate_dde(sys->sys, start, history, t_final, step);
    const auto report = ddecert::contraction_report(
        traj, cert, std::nullopt, checkpoint_every > 0 ? checkpoint_every : 0.5);
    if (csv_out) *csv_out = dup_string(ddecert::trajectory_csv(traj, &cert));
    if (json_out) {
      ddecert::SimulateMeta meta;
      meta.mu = mu;
      meta.t_final = t_final;
      meta.step = step;
      meta.history_seed = history_seed;
      meta.checkpoint_every = checkpoint_every > 0 ? checkpoint_every : 0.5;
      *json_out =
          dup_string(ddecert::contraction_report_json(report, meta));
    }
  });
}

int ddec_sdde_pair_report(const ddec_system* sys, const char* drift_kind,
                          double drift_amplitude, const char* noise_kind,
                          double noise_amplitude, const double* x0_a,
                          const double* x0_b, double dt, double t_final,
                          int paths, uint64_t seed, double omega,
                          char** json_out) {
  if (!sys || !json_out || !x0_a || !x0_b) return invalid("null argument");
  *json_out = nullptr;
  return guarded([&] {
    const int n = sys->sys.dim();
    ddecert::SddePairConfig config;
    config.x0_a = Eigen::Map<const ddecert::Vector>(x0_a, n);
    config.x0_b = Eigen::Map<const ddecert::Vector>(x0_b, n);
    config.dt = dt;
    config.t_final = t_final;
    config.paths = paths;
    config.seed = seed;
    config.drift_perturbation = parse_drift_kind(drift_kind, drift_amplitude);
    config.noise = parse_noise_kind(noise_kind, noise_amplitude);
    const auto report = ddecert::mean_square_contraction(sys->sys, config, omega);
    *json_out = dup_string(ddecert::pair_report_json(report, config));
  });
}

int ddec_sdde_lyapunov_report(double b, double c, double sigma, double dt,
                              double t_final, int paths, uint64_t seed,
                              char** json_out) {
  if (!json_out) return invalid("null argument");
  *json_out = nullptr;
  return guarded([&] {
    const auto report =
        ddecert::as_lyapunov_exponent(b, c, sigma, dt, t_final, paths, seed);
    *json_out =
        dup_string(ddecert::lyapunov_report_json(report, dt, t_final, seed));
  });
}

}  // extern "C"
