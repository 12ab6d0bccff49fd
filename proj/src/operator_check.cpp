#include "ddecert/operator_check.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace ddecert {

GeneratorDiscretization discretize_generator(const LinearDelaySystem& system,
                                             int nodes_per_panel) {
  system.validate();
  GeneratorDiscretization disc;
  disc.layout = make_collocation(system.kernel, nodes_per_panel);
  disc.matrix = assemble_generator_matrix(system, disc.layout);
  disc.nodes_per_panel = nodes_per_panel;
  disc.dimension = system.dim();
  disc.node_locations = disc.layout.nodes;
  const int m = disc.layout.node_count();
  disc.quad_weights.resize(m);
  disc.panel_map.resize(m);
  for (int g = 0; g < m; ++g) {
    disc.quad_weights[g] =
        disc.layout.weight_left[g] + disc.layout.weight_right[g];
    // Joints belong to the panel collocating their transport row, i.e.
    // the one on the right; the 0 node has no such row and keeps the
    // last panel.
    int p = g / (nodes_per_panel - 1);
    disc.panel_map[g] = std::min(p, disc.layout.panel_count() - 1);
  }
  return disc;
}

namespace {

void require_compatible(const GeneratorDiscretization& disc,
                        const ContractionCertificate& cert) {
  if (cert.weight.kernel().dimension != disc.dimension)
    fail(ErrorCode::invalid_argument,
         "certificate dimension does not match the discretization");
  for (const auto& atom : cert.weight.kernel().atoms) {
    bool found = false;
    for (double b : disc.layout.breaks)
      if (std::abs(b - atom.location) <= 1e-9) found = true;
    if (!found)
      fail(ErrorCode::invalid_argument,
           "certificate kernel has an atom at " +
               std::to_string(atom.location) +
               " that is not a panel boundary of the discretization");
  }
}

}  // namespace

WeightedGram weighted_gram(const GeneratorDiscretization& disc,
                           const ContractionCertificate& cert) {
  require_compatible(disc, cert);
  const CollocationLayout& lay = disc.layout;
  WeightedGram gram;
  gram.diagonal.resize(lay.node_count());
  for (int g = 0; g < lay.node_count(); ++g) {
    double mass = 0.0;
    if (lay.weight_left[g] > 0.0)
      mass += lay.weight_left[g] * cert.weight.value(lay.nodes[g], Side::left);
    if (lay.weight_right[g] > 0.0)
      mass += lay.weight_right[g] * cert.weight.value(lay.nodes[g], Side::right);
    gram.diagonal[g] = mass;
  }
  gram.diagonal[lay.zero_index()] += 1.0;
  for (int g = 0; g < lay.node_count(); ++g)
    if (!(gram.diagonal[g] > 0.0))
      fail(ErrorCode::invalid_argument,
           "weighted Gram matrix is not positive at node " + std::to_string(g) +
               "; the certificate weight is not positive there");
  return gram;
}

DissipativityReport check_dissipativity(const GeneratorDiscretization& disc,
                                        const ContractionCertificate& cert,
                                        std::optional<double> report_mu) {
  require_compatible(disc, cert);
  const CollocationLayout& lay = disc.layout;
  const int n = disc.dimension;
  const int m = lay.node_count();
  const int z = lay.zero_index();
  const int npp = lay.nodes_per_panel;
  const WeightedGram gram = weighted_gram(disc, cert);

  // Quadratic form of the weighted generator. The head coupling comes
  // straight from the generator row; the history part is integrated by
  // parts panel by panel, trading the transport derivative for the weight
  // derivative plus panel boundary terms. This keeps the discrete form an
  // exact nodal quadrature of its continuous counterpart.
  Matrix s = Matrix::Zero(n * m, n * m);
  for (int j = 0; j < m; ++j) {
    const Matrix block = disc.matrix.block(z * n, j * n, n, n);
    s.block(z * n, j * n, n, n) += 0.5 * block;
    s.block(j * n, z * n, n, n) += 0.5 * block.transpose();
  }
  const Matrix id = Matrix::Identity(n, n);
  for (int p = 0; p < lay.panel_count(); ++p) {
    const int offset = lay.node_offset(p);
    for (int k = 0; k < npp; ++k) {
      const int g = offset + k;
      const bool right_edge = (k == npp - 1);
      const Side side = right_edge ? Side::left : Side::right;
      const double w = right_edge ? lay.weight_left[g] : lay.weight_right[g];
      s.block(g * n, g * n, n, n) -=
          0.5 * w * cert.weight.derivative(lay.nodes[g], side) * id;
    }
    const int left = offset;
    const int right = offset + npp - 1;
    s.block(right * n, right * n, n, n) +=
        0.5 * cert.weight.value(lay.nodes[right], Side::left) * id;
    s.block(left * n, left * n, n, n) -=
        0.5 * cert.weight.value(lay.nodes[left], Side::right) * id;
  }

  Vector scale(n * m);
  for (int g = 0; g < m; ++g)
    scale.segment(g * n, n).setConstant(1.0 / std::sqrt(gram.diagonal[g]));
  s = scale.asDiagonal() * s * scale.asDiagonal();
  s = 0.5 * (s + s.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);

  DissipativityReport report;
  report.theta_max = es.eigenvalues().maxCoeff();
  report.mu = report_mu.value_or(cert.mu);
  report.margin = report.mu - report.theta_max;
  report.nodes_per_panel = npp;
  return report;
}

std::vector<DissipativityReport> refinement_study(
    const LinearDelaySystem& system, double mu,
    const std::vector<int>& node_counts) {
  if (node_counts.empty())
    fail(ErrorCode::invalid_argument, "refinement_study: no node counts");
  const ContractionCertificate cert = build_certificate(system, mu);
  std::vector<DissipativityReport> reports;
  reports.reserve(node_counts.size());
  for (int n : node_counts)
    reports.push_back(
        check_dissipativity(discretize_generator(system, n), cert));
  return reports;
}

double discretization_tolerance(int nodes_per_panel) {
  return nodes_per_panel >= 64 ? 1e-6 : 1e-3;
}

}  // namespace ddecert
