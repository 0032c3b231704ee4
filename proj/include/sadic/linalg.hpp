#pragma once

#include <Eigen/Dense>
#include <complex>

namespace sadic {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Spectral norm (largest singular value). Closed form for 2x2, Jacobi SVD otherwise.
[[nodiscard]] double operator_norm(const ComplexMatrix& m);

/// Smallest singular value.
[[nodiscard]] double smallest_singular_value(const ComplexMatrix& m);

/// Entrywise max |a_ij - b_ij|.
[[nodiscard]] double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace sadic
