#include "ddecert/reports.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "ddecert/version.hpp"

namespace ddecert {

using nlohmann::json;

std::string format_g17(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

const char* side_name(Side s) { return s == Side::left ? "left" : "right"; }

json complex_json(const Complex& z) {
  return json{{"re", z.real()}, {"im", z.imag()}};
}

// nlohmann rejects non-finite doubles at dump time; reports that can
// carry them (blow-ups, filtered residuals) go through this instead.
json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string certificate_report_json(const ContractionCertificate& cert,
                                    int grid_points) {
  json j;
  j["version"] = kVersion;
  j["config"] = {{"mu", cert.mu}, {"grid_points", grid_points}};
  j["lambda"] = cert.lambda;
  j["mu"] = cert.mu;
  j["gamma"] = cert.gamma;
  j["gap"] = cert.gap;
  j["c1"] = cert.c1;
  j["c2"] = cert.c2;
  json tau = json::array();
  for (const auto& s : cert.samples)
    tau.push_back(json{{"s", s.s}, {"side", side_name(s.side)}, {"value", s.value}});
  j["tau"] = tau;
  const double lambda = cert.lambda;
  const CorollaryBounds b = corollary_bounds(lambda, cert.weight.kernel());
  j["bounds"] = {{"mu_sufficient", b.mu_sufficient},
                 {"zero_dissipative", b.zero_dissipative},
                 {"webb_mu", b.webb_mu}};
  return j.dump(2);
}

std::string bounds_report_json(double lambda, const CorollaryBounds& bounds,
                               double total_var) {
  json j;
  j["version"] = kVersion;
  j["config"] = json::object();
  j["lambda"] = lambda;
  j["total_variation"] = total_var;
  j["mu_sufficient"] = bounds.mu_sufficient;
  j["zero_dissipative"] = bounds.zero_dissipative;
  j["webb_mu"] = bounds.webb_mu;
  return j.dump(2);
}

std::string min_mu_report_json(double lambda, double mu_min, double tol) {
  json j;
  j["version"] = kVersion;
  j["config"] = {{"tol", tol}};
  j["lambda"] = lambda;
  j["min_mu"] = mu_min;
  return j.dump(2);
}

std::string shift_report_json(const ShiftCertificate& shift, int grid_points) {
  json j = json::parse(certificate_report_json(shift.certificate, grid_points));
  j["nu"] = shift.nu;
  j["config"] = {{"grid_points", grid_points}};
  return j.dump(2);
}

std::string renorm_report_json(const RenormMatrix& renorm) {
  json j;
  j["version"] = kVersion;
  j["config"] = json::object();
  json rows = json::array();
  for (Eigen::Index r = 0; r < renorm.q.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < renorm.q.cols(); ++c)
      row.push_back(renorm.q(r, c));
    rows.push_back(row);
  }
  j["Q"] = rows;
  j["gamma_lower"] = renorm.gamma_lower;
  return j.dump(2);
}

std::string spectrum_report_json(const SpectrumApproximation& spec) {
  json j;
  j["version"] = kVersion;
  j["config"] = {{"nodes_per_panel", spec.nodes_per_panel}};
  j["abscissa"] = finite_or_null(spec.abscissa);
  j["abscissa_unfiltered"] = finite_or_null(spec.abscissa_unfiltered);
  j["panel_breaks"] = spec.panel_breaks;
  json eigs = json::array();
  for (size_t i = 0; i < spec.eigenvalues.size(); ++i) {
    json e = complex_json(spec.eigenvalues[i]);
    e["residual"] = finite_or_null(spec.residuals[i]);
    e["spurious"] = static_cast<bool>(spec.spurious[i]);
    eigs.push_back(e);
  }
  j["eigenvalues"] = eigs;
  return j.dump(2);
}

std::string spectrum_csv(const SpectrumApproximation& spec) {
  std::string out = "re,im,residual,spurious\n";
  for (size_t i = 0; i < spec.eigenvalues.size(); ++i) {
    out += format_g17(spec.eigenvalues[i].real());
    out += ',';
    out += format_g17(spec.eigenvalues[i].imag());
    out += ',';
    out += std::isfinite(spec.residuals[i]) ? format_g17(spec.residuals[i])
                                            : "inf";
    out += ',';
    out += spec.spurious[i] ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string check_report_json(const DissipativityReport& report,
                              const GeneratorDiscretization& disc) {
  json j;
  j["version"] = kVersion;
  j["config"] = {{"mu", report.mu},
                 {"nodes_per_panel", report.nodes_per_panel}};
  j["theta_max"] = report.theta_max;
  j["mu"] = report.mu;
  j["margin"] = report.margin;
  j["nodes_per_panel"] = report.nodes_per_panel;
  j["tolerance"] = discretization_tolerance(report.nodes_per_panel);
  j["pass"] = report.margin >= -discretization_tolerance(report.nodes_per_panel);
  j["panel_breaks"] = disc.layout.breaks;
  j["nodes"] = disc.node_locations;
  j["quad_weights"] = disc.quad_weights;
  return j.dump(2);
}

std::string refinement_report_json(const std::vector<DissipativityReport>& runs,
                                   double mu) {
  json j;
  j["version"] = kVersion;
  json counts = json::array();
  for (const auto& r : runs) counts.push_back(r.nodes_per_panel);
  j["config"] = {{"mu", mu}, {"node_counts", counts}};
  json rows = json::array();
  for (const auto& r : runs)
    rows.push_back(json{{"nodes_per_panel", r.nodes_per_panel},
                        {"theta_max", r.theta_max},
                        {"margin", r.margin},
                        {"tolerance", discretization_tolerance(r.nodes_per_panel)},
                        {"pass", r.margin >= -discretization_tolerance(
                                                  r.nodes_per_panel)}});
  j["runs"] = rows;
  return j.dump(2);
}

std::string trajectory_csv(const DeterministicTrajectory& traj,
                           const ContractionCertificate* cert) {
  const int n = static_cast<int>(traj.states.front().size());
  std::string out = "t";
  for (int c = 0; c < n; ++c) out += ",u" + std::to_string(c);
  if (cert) out += ",weighted_norm";
  out += '\n';

  // Precomputed norm table: tau and |u|^2 at the two Gauss points of
  // every step cell; each row's squared norm is then a sliding window
  // dot product instead of a fresh quadrature.
  std::vector<double> tau_w, usq;
  int m = 0;
  if (cert) {
    const double h = traj.step;
    m = static_cast<int>(std::lround(1.0 / h));
    const double off = 0.5 / std::sqrt(3.0);
    tau_w.resize(2 * m);
    for (int j = 0; j < m; ++j) {
      const double a = -1.0 + j * h;
      for (int q = 0; q < 2; ++q) {
        const double s = a + h * (0.5 + (q == 0 ? -off : off));
        tau_w[2 * j + q] = 0.5 * h * cert->weight.value(s, Side::right);
      }
    }
    const int cells = m + static_cast<int>(traj.states.size()) - 1;
    usq.resize(2 * cells);
    for (int c = 0; c < cells; ++c) {
      const double a = -1.0 + c * h;
      for (int q = 0; q < 2; ++q) {
        const double t = a + h * (0.5 + (q == 0 ? -off : off));
        usq[2 * c + q] = traj.at(t).squaredNorm();
      }
    }
  }

  for (size_t k = 0; k < traj.states.size(); ++k) {
    out += format_g17(traj.times[k]);
    for (int c = 0; c < n; ++c) {
      out += ',';
      out += format_g17(traj.states[k](c));
    }
    if (cert) {
      double acc = traj.states[k].squaredNorm();
      for (int j = 0; j < 2 * m; ++j) acc += tau_w[j] * usq[2 * k + j];
      out += ',';
      out += format_g17(std::sqrt(acc));
    }
    out += '\n';
  }
  return out;
}

std::string contraction_report_json(const ContractionReport& report,
                                    const SimulateMeta& meta) {
  std::string out = "{\n";
  out += "  \"version\": \"" + std::string(kVersion) + "\",\n";
  out += "  \"config\": {\"mu\": " + format_g17(meta.mu) +
         ", \"t_final\": " + format_g17(meta.t_final) +
         ", \"step\": " + format_g17(meta.step) +
         ", \"history_seed\": " + std::to_string(meta.history_seed) +
         ", \"checkpoint_every\": " + format_g17(meta.checkpoint_every) +
         "},\n";
  out += "  \"mu\": " + format_g17(report.mu) + ",\n";
  out += "  \"max_ratio\": " + format_g17(report.max_ratio) + ",\n";
  out += std::string("  \"pass\": ") + (report.pass ? "true" : "false") + ",\n";
  out += "  \"times\": [";
  for (size_t i = 0; i < report.times.size(); ++i) {
    if (i) out += ", ";
    out += format_g17(report.times[i]);
  }
  out += "],\n  \"norms\": [";
  for (size_t i = 0; i < report.norms.size(); ++i) {
    if (i) out += ", ";
    out += format_g17(report.norms[i]);
  }
  out += "]\n}\n";
  return out;
}

namespace {

std::string vector_g17(const Vector& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_g17(v(i));
  }
  return out + "]";
}

std::string doubles_g17(const std::vector<double>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_g17(v[i]);
  }
  return out + "]";
}

const char* kind_name(NonlinearSpec::Kind k) {
  switch (k) {
    case NonlinearSpec::Kind::zero:
      return "zero";
    case NonlinearSpec::Kind::tanh_drift:
      return "tanh";
    case NonlinearSpec::Kind::additive_noise:
      return "additive";
    case NonlinearSpec::Kind::linear_noise:
      return "linear";
  }
  return "zero";
}

}  // namespace

std::string pair_report_json(const MeanSquareReport& report,
                             const SddePairConfig& config) {
  std::string out = "{\n";
  out += "  \"version\": \"" + std::string(kVersion) + "\",\n";
  out += "  \"config\": {\"dt\": " + format_g17(config.dt) +
         ", \"t_final\": " + format_g17(config.t_final) +
         ", \"paths\": " + std::to_string(config.paths) +
         ", \"seed\": " + std::to_string(config.seed) +
         ", \"checkpoint_every\": " + format_g17(config.checkpoint_every) +
         ", \"drift_perturbation\": {\"kind\": \"" +
         kind_name(config.drift_perturbation.kind) +
         "\", \"amplitude\": " + format_g17(config.drift_perturbation.amplitude) +
         "}, \"noise\": {\"kind\": \"" + kind_name(config.noise.kind) +
         "\", \"amplitude\": " + format_g17(config.noise.amplitude) +
         "}, \"x0_a\": " + vector_g17(config.x0_a) +
         ", \"x0_b\": " + vector_g17(config.x0_b) + "},\n";
  out += "  \"condition_lhs\": " + format_g17(report.condition_lhs) + ",\n";
  out += "  \"omega\": " + format_g17(report.omega) + ",\n";
  out += std::string("  \"condition_holds\": ") +
         (report.condition_holds ? "true" : "false") + ",\n";
  out += "  \"cert_mu\": " + format_g17(report.cert_mu) + ",\n";
  out += "  \"rate\": " + format_g17(report.estimate.rate) + ",\n";
  out += "  \"ci_low\": " + format_g17(report.estimate.ci_low) + ",\n";
  out += "  \"ci_high\": " + format_g17(report.estimate.ci_high) + ",\n";
  out += "  \"paths\": " + std::to_string(report.estimate.paths) + ",\n";
  out += std::string("  \"blowup\": ") +
         (report.estimate.blowup ? "true" : "false") + ",\n";
  out += "  \"checkpoint_times\": " + doubles_g17(report.checkpoint_times) + ",\n";
  out += "  \"mean_sq_distance\": " + doubles_g17(report.mean_sq_distance) + "\n";
  out += "}\n";
  return out;
}

std::string lyapunov_report_json(const AsLyapunovReport& report, double dt,
                                 double t_final, std::uint64_t seed) {
  std::string out = "{\n";
  out += "  \"version\": \"" + std::string(kVersion) + "\",\n";
  out += "  \"config\": {\"b\": " + format_g17(report.b) +
         ", \"c\": " + format_g17(report.c) +
         ", \"sigma\": " + format_g17(report.sigma) +
         ", \"dt\": " + format_g17(dt) +
         ", \"t_final\": " + format_g17(t_final) +
         ", \"paths\": " + std::to_string(report.estimate.paths) +
         ", \"seed\": " + std::to_string(seed) + "},\n";
  out += "  \"exponent\": " + format_g17(report.estimate.rate) + ",\n";
  out += "  \"ci_low\": " + format_g17(report.estimate.ci_low) + ",\n";
  out += "  \"ci_high\": " + format_g17(report.estimate.ci_high) + ",\n";
  out += std::string("  \"noise_dominates_drift\": ") +
         (report.noise_dominates_drift ? "true" : "false") + ",\n";
  out += std::string("  \"delay_within_margin\": ") +
         (report.delay_within_margin ? "true" : "false") + ",\n";
  out += std::string("  \"region_ok\": ") +
         (report.region_ok ? "true" : "false") + ",\n";
  out += std::string("  \"blowup\": ") +
         (report.estimate.blowup ? "true" : "false") + "\n";
  out += "}\n";
  return out;
}

}  // namespace ddecert
