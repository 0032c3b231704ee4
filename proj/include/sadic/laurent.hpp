#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace sadic {

using Exponent = std::vector<std::int64_t>;

/// Integer-coefficient Laurent polynomial in d variables.
///
/// Only nonzero coefficients are stored. Evaluation on the torus takes a
/// real point t in [0,1)^d and uses z_c = exp(2 pi i t_c), so that the
/// monomial z^f evaluates to exp(2 pi i <f, t>).
class LaurentPolynomial {
public:
    explicit LaurentPolynomial(std::size_t dim = 1);

    static LaurentPolynomial constant(std::size_t dim, std::int64_t c);
    static LaurentPolynomial monomial(const Exponent& f, std::int64_t c = 1);

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] const std::map<Exponent, std::int64_t>& terms() const { return terms_; }

    /// Adds c to the coefficient of z^f; zero results are erased.
    void add_term(const Exponent& f, std::int64_t c);
    [[nodiscard]] std::int64_t coefficient(const Exponent& f) const;

    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] bool is_monomial() const { return terms_.size() == 1; }

    /// Value at z = exp(2 pi i t) componentwise.
    [[nodiscard]] std::complex<double> evaluate(std::span<const double> t) const;
    /// Value at an explicit point z in (C^*)^d.
    [[nodiscard]] std::complex<double> evaluate_at(std::span<const std::complex<double>> z) const;

    /// Smallest exponent per axis over all terms (zero vector for the zero polynomial).
    [[nodiscard]] Exponent min_exponent() const;
    /// Multiplies by z^f.
    [[nodiscard]] LaurentPolynomial shifted(const Exponent& f) const;

    /// Univariate coefficients a_0..a_n of z^{-m} p(z) where m is the
    /// minimal exponent, i.e. the monomial factor removed. Requires dim 1.
    [[nodiscard]] std::vector<std::int64_t> dense_coefficients_1d() const;

    /// Human readable form, e.g. "1 - z" or "z1*z2^2 - 3".
    [[nodiscard]] std::string to_string() const;

    friend LaurentPolynomial operator+(const LaurentPolynomial& a, const LaurentPolynomial& b);
    friend LaurentPolynomial operator-(const LaurentPolynomial& a, const LaurentPolynomial& b);
    friend LaurentPolynomial operator*(const LaurentPolynomial& a, const LaurentPolynomial& b);
    friend bool operator==(const LaurentPolynomial& a, const LaurentPolynomial& b) = default;

private:
    std::size_t dim_;
    std::map<Exponent, std::int64_t> terms_;
};

/// Parses expressions such as "1 - z", "2*z^3 + z^-1", "1 - z1*z2".
/// A bare "z" is the first variable; "z1".."zd" are explicit. The
/// dimension is the largest variable index used unless min_dim is larger.
LaurentPolynomial parse_polynomial(const std::string& text, std::size_t min_dim = 1);

}  // namespace sadic
