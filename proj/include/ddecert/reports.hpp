#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ddecert/certificate.hpp"
#include "ddecert/operator_check.hpp"
#include "ddecert/simulation.hpp"
#include "ddecert/spectrum.hpp"

namespace ddecert {

/// %.17g, with non-finite values mapped to JSON null.
std::string format_g17(double v);

/// Every report embeds the library version and the parameters it was
/// produced with; simulation outputs are written with 17 significant
/// digits so runs can be compared bit for bit.

std::string certificate_report_json(const ContractionCertificate& cert,
                                    int grid_points);
std::string bounds_report_json(double lambda, const CorollaryBounds& bounds,
                               double total_var);
std::string min_mu_report_json(double lambda, double mu_min, double tol);
std::string shift_report_json(const ShiftCertificate& shift, int grid_points);
std::string renorm_report_json(const RenormMatrix& renorm);

std::string spectrum_report_json(const SpectrumApproximation& spec);
std::string spectrum_csv(const SpectrumApproximation& spec);

std::string check_report_json(const DissipativityReport& report,
                              const GeneratorDiscretization& disc);
std::string refinement_report_json(const std::vector<DissipativityReport>& runs,
                                   double mu);

struct SimulateMeta {
  double mu = 0.0;
  double t_final = 0.0;
  double step = 0.0;
  std::uint64_t history_seed = 0;
  double checkpoint_every = 0.5;
};

/// Rows "t,u0,...,u{n-1}[,weighted_norm]" at every grid time.
std::string trajectory_csv(const DeterministicTrajectory& traj,
                           const ContractionCertificate* cert);
std::string contraction_report_json(const ContractionReport& report,
                                    const SimulateMeta& meta);

std::string pair_report_json(const MeanSquareReport& report,
                             const SddePairConfig& config);
std::string lyapunov_report_json(const AsLyapunovReport& report, double dt,
                                 double t_final, std::uint64_t seed);

}  // namespace ddecert
