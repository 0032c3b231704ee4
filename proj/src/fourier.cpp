#include "sadic/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sadic/error.hpp"
#include "sadic/rng.hpp"

namespace sadic {

namespace {

Complex unit_phase(std::span<const std::int64_t> s, std::span<const double> t) {
    double phase = 0.0;
    for (std::size_t c = 0; c < s.size(); ++c) phase += static_cast<double>(s[c]) * t[c];
    phase -= std::floor(phase);
    return std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

ComplexMatrix evaluate_digits(const DigitSets& ds, std::span<const double> t) {
    if (t.size() != ds.dim) throw Error("wave vector dimension mismatch");
    const auto n = static_cast<Eigen::Index>(ds.alphabet_size);
    ComplexMatrix b = ComplexMatrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index j = 0; j < n; ++j)
            for (const auto& s : ds.at(static_cast<int>(k + 1), static_cast<int>(j + 1))) b(k, j) += unit_phase(s, t);
    return b;
}

void require_binary(const BlockSubstitution& sub) {
    if (sub.alphabet_size != 2)
        throw Error("substitution '" + sub.name + "' is not binary; q polynomials need a two-letter alphabet");
}

}  // namespace

ComplexMatrix fourier_matrix(const BlockSubstitution& sub, std::span<const double> t) {
    return evaluate_digits(digit_sets(sub), t);
}

FourierFamily::FourierFamily(const BlockSubstitution& sub) : sub_(sub), digits_(digit_sets(sub)) {}

ComplexMatrix FourierFamily::evaluate(std::span<const double> t) const { return evaluate_digits(digits_, t); }

BinaryOverlapSets overlap_sets(const BlockSubstitution& sub) {
    require_binary(sub);
    require_valid(sub);
    BinaryOverlapSets out;
    const std::size_t vol = sub.block_volume();
    for (std::size_t f = 0; f < vol; ++f) {
        const int k = sub.blocks[0][f];
        const int l = sub.blocks[1][f];
        out.s[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(l - 1)].push_back(unflatten(f, sub.expansion));
    }
    return out;
}

QPolynomials q_polynomials(const BlockSubstitution& sub) {
    const auto ov = overlap_sets(sub);
    auto poly = [&](int k, int l) {
        LaurentPolynomial p(sub.dim);
        for (const auto& f : ov.at(k, l)) p.add_term(f, 1);
        return p;
    };
    return {poly(1, 1), poly(1, 2), poly(2, 1), poly(2, 2)};
}

ComplexMatrix c_matrix_from_q(const QPolynomials& q, std::span<const double> t) {
    const Complex v11 = q.q11.evaluate(t);
    const Complex v12 = q.q12.evaluate(t);
    const Complex v21 = q.q21.evaluate(t);
    const Complex v22 = q.q22.evaluate(t);
    ComplexMatrix c(2, 2);
    c(0, 0) = v11 + v12;
    c(0, 1) = v11 + v21;
    c(1, 0) = v21 + v22;
    c(1, 1) = v12 + v22;
    return c;
}

ComplexMatrix triangular_c_matrix(const QPolynomials& q, std::span<const double> t) {
    const Complex v11 = q.q11.evaluate(t);
    const Complex v12 = q.q12.evaluate(t);
    const Complex v21 = q.q21.evaluate(t);
    const Complex v22 = q.q22.evaluate(t);
    ComplexMatrix m(2, 2);
    m(0, 0) = v12 - v21;
    m(0, 1) = -(v21 + v22);
    m(1, 0) = 0.0;
    m(1, 1) = v11 + v12 + v21 + v22;
    return m;
}

ComplexMatrix from_triangular_basis(const ComplexMatrix& m) {
    // P = [[1, 1], [-1, 0]], P^{-1} = [[0, -1], [1, 1]].
    const Complex a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    ComplexMatrix r(2, 2);
    r(0, 0) = b + d;
    r(0, 1) = -a - c + b + d;
    r(1, 0) = -b;
    r(1, 1) = a - b;
    return r;
}

LaurentPolynomial block_polynomial(const BlockSubstitution& sub) {
    require_valid(sub);
    LaurentPolynomial p(sub.dim);
    for (std::size_t f = 0; f < sub.block_volume(); ++f) p.add_term(unflatten(f, sub.expansion), 1);
    return p;
}

double det_identity_residual(const BlockSubstitution& sub, std::span<const double> t) {
    require_binary(sub);
    const ComplexMatrix c = fourier_matrix(sub, t);
    const auto q = q_polynomials(sub);
    const Complex lambda = q.difference().evaluate(t);
    const Complex full = block_polynomial(sub).evaluate(t);

    const Complex det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
    const double det_res = std::abs(det - lambda * full);

    ComplexVector v(2);
    v << 1.0, -1.0;
    const double eig_res = (c * v - lambda * v).norm();
    return std::max(det_res, eig_res);
}

SingularityProbe probe_nonsingular(const BlockSubstitution& sub, std::uint64_t seed) {
    SingularityProbe probe;
    if (sub.alphabet_size == 2) probe.q_difference_zero = q_polynomials(sub).difference().is_zero();
    const FourierFamily family(sub);
    Xoshiro256 rng(seed);
    std::vector<double> t(sub.dim);
    for (int attempt = 0; attempt < 8; ++attempt) {
        for (auto& x : t) x = rng.uniform();
        const double d = std::abs(family.evaluate(t).determinant());
        probe.samples_used = attempt + 1;
        probe.best_abs_det = std::max(probe.best_abs_det, d);
        if (d > 1e-8) {
            probe.nonsingular = true;
            break;
        }
    }
    return probe;
}

}  // namespace sadic
