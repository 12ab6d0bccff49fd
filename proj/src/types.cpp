#include "ddecert/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ddecert {

void require_square(const Matrix& m, const char* name) {
  if (m.rows() == 0 || m.rows() != m.cols())
    fail(ErrorCode::invalid_argument,
         std::string(name) + " must be square and non-empty, got " +
             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

void require_finite(const Matrix& m, const char* name) {
  if (!m.allFinite())
    fail(ErrorCode::invalid_argument,
         std::string(name) + " contains a non-finite entry");
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double spectral_abscissa(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

}  // namespace ddecert
