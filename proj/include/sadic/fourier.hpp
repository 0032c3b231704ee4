#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sadic/laurent.hpp"
#include "sadic/linalg.hpp"
#include "sadic/substitution.hpp"

namespace sadic {

/// Fourier matrix B(t)_{k,j} = sum_{s in T_{k,j}} exp(2 pi i <s, t>).
ComplexMatrix fourier_matrix(const BlockSubstitution& sub, std::span<const double> t);

/// Precomputed digit sets for repeated evaluation of B(t) along orbits.
class FourierFamily {
public:
    explicit FourierFamily(const BlockSubstitution& sub);

    [[nodiscard]] ComplexMatrix evaluate(std::span<const double> t) const;
    [[nodiscard]] const BlockSubstitution& substitution() const { return sub_; }
    [[nodiscard]] const DigitSets& digits() const { return digits_; }

private:
    BlockSubstitution sub_;
    DigitSets digits_;
};

/// S_{k,l} = T_{k,1} intersect T_{l,2} for a binary substitution; the
/// four sets partition F.
struct BinaryOverlapSets {
    std::array<std::array<std::vector<LatticePoint>, 2>, 2> s;
    [[nodiscard]] const std::vector<LatticePoint>& at(int k, int l) const { return s[k - 1][l - 1]; }
};

BinaryOverlapSets overlap_sets(const BlockSubstitution& sub);

/// q_{k,l}(z) = sum over S_{k,l} of z^f.
struct QPolynomials {
    LaurentPolynomial q11, q12, q21, q22;

    /// q_{1,2} - q_{2,1}: the eigenvalue of C(z) on (1, -1)^T.
    [[nodiscard]] LaurentPolynomial difference() const { return q12 - q21; }
};

QPolynomials q_polynomials(const BlockSubstitution& sub);

/// C(z) assembled from the q polynomials:
///   [ q11 + q12   q11 + q21 ]
///   [ q21 + q22   q12 + q22 ]
/// evaluated at z = exp(2 pi i t).
ComplexMatrix c_matrix_from_q(const QPolynomials& q, std::span<const double> t);

/// C(z) in the basis v = (1,-1)^T, w = (1,0)^T:
///
///   T(z) = [ q12 - q21   -(q21 + q22) ]
///          [ 0           sum_F z^f    ]
///
/// so that C(z) = P T(z) P^{-1} with P = [v w]. The zero entry is exact,
/// which keeps long products triangular in floating point.
ComplexMatrix triangular_c_matrix(const QPolynomials& q, std::span<const double> t);

/// P m P^{-1} with P = [[1, 1], [-1, 0]].
ComplexMatrix from_triangular_basis(const ComplexMatrix& m);

/// sum_{f in F} z^f.
LaurentPolynomial block_polynomial(const BlockSubstitution& sub);

/// max of |det C(z) - (q12 - q21)(z) * sum_F z^f| and
/// ||C(z) v - (q12 - q21)(z) v|| with v = (1, -1)^T, for z = exp(2 pi i t).
double det_identity_residual(const BlockSubstitution& sub, std::span<const double> t);

struct SingularityProbe {
    bool q_difference_zero = false;  // exact, from the coefficient map
    bool nonsingular = false;        // some sampled |det C(z)| > threshold
    int samples_used = 0;
    double best_abs_det = 0.0;
};

/// Checks that det C(z) is not identically zero: symbolically through the
/// q difference, and by sampling z until |det| > 1e-8 (at most 8 tries).
SingularityProbe probe_nonsingular(const BlockSubstitution& sub, std::uint64_t seed);

}  // namespace sadic
