#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "sadic/laurent.hpp"
#include "sadic/substitution.hpp"

namespace sadic {

enum class MahlerMethod { jensen_roots, tensor_quadrature, monte_carlo };

std::string to_string(MahlerMethod m);

/// Logarithmic Mahler measure m(p) = integral over T^d of log|p|, in nats.
struct MahlerEstimate {
    double value = 0.0;
    double standard_error = 0.0;  // zero for jensen_roots
    MahlerMethod method = MahlerMethod::jensen_roots;
    std::int64_t samples = 0;
    std::int64_t excluded_cells = 0;
};

/// Roots of a_0 + a_1 z + ... + a_n z^n (a_n != 0) from the eigenvalues of
/// the balanced companion matrix.
std::vector<std::complex<double>> polynomial_roots(const std::vector<std::int64_t>& coeffs);

/// Root moduli within this distance of 1 are treated as lying on the unit circle.
inline constexpr double kUnitCircleSnap = 1e-10;

/// Exact-up-to-root-finding value via Jensen's formula:
///   m(p) = log|a_n| + sum over roots of log max(1, |r|).
/// The monomial factor is removed first since it contributes nothing.
MahlerEstimate mahler_jensen_1d(const LaurentPolynomial& p);

/// Average of log|p| over a randomly shifted uniform grid of
/// grid_per_axis^d points on [0,1)^d. Points with |p| < 1e-13 are moved to
/// a fresh random position inside their cell up to 8 times and then
/// excluded. standard_error is sqrt(sample variance / samples).
/// Throws if more than 1% of cells are excluded.
MahlerEstimate mahler_quadrature(const LaurentPolynomial& p, std::int64_t grid_per_axis, std::uint64_t jitter_seed,
                                 std::size_t point_cap = std::size_t{1} << 26);

/// Jensen for univariate input, quadrature otherwise.
MahlerEstimate mahler_measure(const LaurentPolynomial& p, std::int64_t grid_per_axis = 512,
                              std::uint64_t jitter_seed = 0x5AD1C);

struct MahlerBound {
    double log_sqrt_det = 0.0;  // log sqrt(det phi)
    MahlerEstimate q_difference;
    double margin = 0.0;        // log_sqrt_det - m(q12 - q21)
};

/// log sqrt(det phi) - m(q_{1,2} - q_{2,1}); strictly positive for every
/// valid binary block substitution. Throws "singular Fourier matrix family"
/// when the q difference vanishes.
MahlerBound mahler_bound(const BlockSubstitution& sub, std::int64_t grid_per_axis = 512,
                         std::uint64_t jitter_seed = 0x5AD1C);

double mahler_bound_margin(const BlockSubstitution& sub);

}  // namespace sadic
