#pragma once

#include <optional>
#include <vector>

#include "ddecert/certificate.hpp"
#include "ddecert/collocation.hpp"

namespace ddecert {

/// Collocated generator plus the layout data needed to weigh it.
struct GeneratorDiscretization {
  Matrix matrix;                      // (n*m) x (n*m) finite section
  std::vector<double> node_locations;  // m nodes, ascending, last is 0
  std::vector<double> quad_weights;    // per-node mass, sums to 1
  std::vector<int> panel_map;          // panel owning each node's row
  int nodes_per_panel = 0;
  int dimension = 0;
  CollocationLayout layout;
};

/// Diagonal of the weighted Gram matrix: per-node tau mass, plus the unit
/// head term at the s = 0 node. One scalar per node, replicated across
/// the state dimension.
struct WeightedGram {
  std::vector<double> diagonal;
};

struct DissipativityReport {
  double theta_max = 0.0;  // largest eigenvalue of the weighted form
  double mu = 0.0;
  double margin = 0.0;     // mu - theta_max; >= 0 when the check passes
  int nodes_per_panel = 0;
};

GeneratorDiscretization discretize_generator(const LinearDelaySystem& system,
                                             int nodes_per_panel);

WeightedGram weighted_gram(const GeneratorDiscretization& disc,
                           const ContractionCertificate& cert);

/// Largest eigenvalue of the certificate-weighted symmetric part of the
/// discretized generator, reported against the certificate's rate (or a
/// caller-supplied rate, for negative controls).
DissipativityReport check_dissipativity(
    const GeneratorDiscretization& disc, const ContractionCertificate& cert,
    std::optional<double> report_mu = std::nullopt);

std::vector<DissipativityReport> refinement_study(
    const LinearDelaySystem& system, double mu,
    const std::vector<int>& node_counts);

/// Acceptance threshold on -margin as a function of resolution.
double discretization_tolerance(int nodes_per_panel);

}  // namespace ddecert
