#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace ddecert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

enum class ErrorCode {
  invalid_argument,
  parse_error,
  no_certificate,
  unstable,
  unobservable,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

void require_square(const Matrix& m, const char* name);
void require_finite(const Matrix& m, const char* name);

/// Operator norm on l2, computed from singular values.
double spectral_norm(const Matrix& m);

/// max Re(eig(m)) for a square real matrix.
double spectral_abscissa(const Matrix& m);

}  // namespace ddecert
