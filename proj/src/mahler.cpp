#include "sadic/mahler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sadic/error.hpp"
#include "sadic/fourier.hpp"
#include "sadic/rng.hpp"

namespace sadic {

std::string to_string(MahlerMethod m) {
    switch (m) {
        case MahlerMethod::jensen_roots: return "jensen_roots";
        case MahlerMethod::tensor_quadrature: return "tensor_quadrature";
        case MahlerMethod::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

namespace {

// Parlett-Reinsch balancing with radix-2 scaling factors (exact in binary).
void balance(Eigen::MatrixXd& a) {
    constexpr double radix = 2.0;
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

}  // namespace

std::vector<std::complex<double>> polynomial_roots(const std::vector<std::int64_t>& coeffs) {
    std::size_t n = coeffs.size();
    while (n > 0 && coeffs[n - 1] == 0) --n;
    if (n == 0) throw NumericalError("roots of the zero polynomial are undefined");
    const std::size_t degree = n - 1;
    if (degree == 0) return {};
    const double lead = static_cast<double>(coeffs[degree]);
    if (degree == 1) return {std::complex<double>(-static_cast<double>(coeffs[0]) / lead, 0.0)};

    const auto d = static_cast<Eigen::Index>(degree);
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < d; ++i) comp(i, d - 1) = -static_cast<double>(coeffs[static_cast<std::size_t>(i)]) / lead;
    balance(comp);

    Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue iteration did not converge");
    const auto ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

MahlerEstimate mahler_jensen_1d(const LaurentPolynomial& p) {
    if (p.dim() != 1) throw Error("Jensen evaluation needs a univariate polynomial");
    if (p.is_zero()) throw NumericalError("mahler undefined for 0");
    const auto a = p.dense_coefficients_1d();
    MahlerEstimate est;
    est.method = MahlerMethod::jensen_roots;
    est.value = std::log(std::abs(static_cast<double>(a.back())));
    for (const auto& r : polynomial_roots(a)) {
        const double mod = std::abs(r);
        if (std::abs(mod - 1.0) < kUnitCircleSnap) continue;
        if (mod > 1.0) est.value += std::log(mod);
    }
    est.samples = static_cast<std::int64_t>(a.size()) - 1;
    return est;
}

MahlerEstimate mahler_quadrature(const LaurentPolynomial& p, std::int64_t grid_per_axis, std::uint64_t jitter_seed,
                                 std::size_t point_cap) {
    if (p.is_zero()) throw NumericalError("mahler undefined for 0");
    if (grid_per_axis < 16) throw Error("quadrature grid must have at least 16 points per axis");
    const std::size_t dim = p.dim();
    std::size_t total = 1;
    for (std::size_t c = 0; c < dim; ++c) {
        if (total > point_cap / static_cast<std::size_t>(grid_per_axis))
            throw ResourceCapError("quadrature grid exceeds the point cap of " + std::to_string(point_cap));
        total *= static_cast<std::size_t>(grid_per_axis);
    }

    // Global random shift of the grid (one per axis).
    Xoshiro256 shift_rng(jitter_seed);
    std::vector<double> shift(dim);
    for (auto& s : shift) s = shift_rng.uniform();

    const double h = 1.0 / static_cast<double>(grid_per_axis);
    const std::vector<std::int64_t> shape(dim, grid_per_axis);
    std::vector<double> t(dim);

    // Welford accumulation in canonical cell order.
    double mean = 0.0, m2 = 0.0;
    std::int64_t count = 0, excluded = 0;
    for (std::size_t cell = 0; cell < total; ++cell) {
        const LatticePoint idx = unflatten(cell, shape);
        for (std::size_t c = 0; c < dim; ++c) t[c] = (static_cast<double>(idx[c]) + shift[c]) * h;
        double mod = std::abs(p.evaluate(t));
        if (mod < 1e-13) {
            // Re-jitter inside this cell with a cell-local stream.
            Xoshiro256 cell_rng(derive_seed(jitter_seed, cell));
            for (int attempt = 0; attempt < 8 && mod < 1e-13; ++attempt) {
                for (std::size_t c = 0; c < dim; ++c) t[c] = (static_cast<double>(idx[c]) + cell_rng.uniform()) * h;
                mod = std::abs(p.evaluate(t));
            }
            if (mod < 1e-13) {
                ++excluded;
                continue;
            }
        }
        const double v = std::log(mod);
        ++count;
        const double delta = v - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (v - mean);
    }
    if (static_cast<double>(excluded) > 0.01 * static_cast<double>(total))
        throw NumericalError("singular set too dense: " + std::to_string(excluded) + " of " + std::to_string(total) +
                             " cells excluded");

    MahlerEstimate est;
    est.method = MahlerMethod::tensor_quadrature;
    est.value = mean;
    est.samples = count;
    est.excluded_cells = excluded;
    est.standard_error = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
    return est;
}

MahlerEstimate mahler_measure(const LaurentPolynomial& p, std::int64_t grid_per_axis, std::uint64_t jitter_seed) {
    if (p.dim() == 1) return mahler_jensen_1d(p);
    return mahler_quadrature(p, grid_per_axis, jitter_seed);
}

MahlerBound mahler_bound(const BlockSubstitution& sub, std::int64_t grid_per_axis, std::uint64_t jitter_seed) {
    const auto diff = q_polynomials(sub).difference();
    if (diff.is_zero())
        throw NumericalError("singular Fourier matrix family: q12 - q21 vanishes for '" + sub.name + "'");
    MahlerBound b;
    b.log_sqrt_det = 0.5 * std::log(static_cast<double>(sub.block_volume()));
    b.q_difference = mahler_measure(diff, grid_per_axis, jitter_seed);
    b.margin = b.log_sqrt_det - b.q_difference.value;
    return b;
}

double mahler_bound_margin(const BlockSubstitution& sub) { return mahler_bound(sub).margin; }

}  // namespace sadic
