#include "sadic/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace sadic {

double operator_norm(const ComplexMatrix& m) {
    if (m.rows() == 2 && m.cols() == 2) {
        // sigma_max^2 = (F + sqrt(F^2 - 4|det|^2)) / 2 with F the squared Frobenius norm.
        // Scale first so that F stays in range for large products.
        const double scale = m.cwiseAbs().maxCoeff();
        if (scale == 0.0) return 0.0;
        const ComplexMatrix s = m / scale;
        const double f = s.squaredNorm();
        const double det = std::abs(s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0));
        const double disc = std::max(0.0, f * f - 4.0 * det * det);
        return scale * std::sqrt(0.5 * (f + std::sqrt(disc)));
    }
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

double smallest_singular_value(const ComplexMatrix& m) {
    if (m.rows() == 2 && m.cols() == 2) {
        const double hi = operator_norm(m);
        if (hi == 0.0) return 0.0;
        const double det = std::abs(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
        return det / hi;
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace sadic
