// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "sadic/fourier.hpp"
#include "sadic/lyapunov.hpp"
#include "sadic/mahler.hpp"
#include "sadic/rng.hpp"
#include "sadic/tiling.hpp"

using namespace sadic;
using namespace sadic::testing;

namespace {

constexpr double kHalfLog2 = 0.34657359027997264;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

Complex phase(long double x) {
    const long double r = x - std::floor(x);
    return std::polar(1.0, static_cast<double>(2 * std::numbers::pi_v<long double> * r));
}

// 1. Fourier matrix of Thue-Morse against its closed form.
Outcome fourier_fixture() {
    const auto tm = thue_morse();
    Xoshiro256 rng(101);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double t[] = {rng.uniform()};
        ComplexMatrix expected(2, 2);
        const Complex e = phase(t[0]);
        expected << 1.0, e, e, 1.0;
        worst = std::max(worst, max_abs_diff(fourier_matrix(tm, t), expected));
    }
    return {worst < 1e-12, "max |B(t) - closed form| = " + num(worst) + " over 1000 t"};
}

// 2. det C = (q12 - q21) sum_F z^f and C (1,-1) = (q12 - q21)(1,-1), with the
// polynomials rebuilt here directly from the rule blocks.
double oracle_identity_residual(const BlockSubstitution& s, const std::vector<double>& t) {
    const ComplexMatrix b = fourier_matrix(s, t);
    Complex q_diff = 0.0, block_sum = 0.0;
    for (std::size_t f = 0; f < s.block_volume(); ++f) {
        const auto x = unflatten(f, s.expansion);
        long double dot = 0;
        for (std::size_t c = 0; c < s.dim; ++c) dot += static_cast<long double>(x[c]) * t[c];
        const Complex z = phase(dot);
        block_sum += z;
        if (s.blocks[0][f] == 1 && s.blocks[1][f] == 2) q_diff += z;
        if (s.blocks[0][f] == 2 && s.blocks[1][f] == 1) q_diff -= z;
    }
    const Complex det = b(0, 0) * b(1, 1) - b(0, 1) * b(1, 0);
    double r = std::abs(det - q_diff * block_sum);
    r = std::max(r, std::abs(b(0, 0) - b(0, 1) - q_diff));
    r = std::max(r, std::abs(b(1, 0) - b(1, 1) + q_diff));
    return r;
}

Outcome determinant_identity() {
    Xoshiro256 rng(202);
    double worst = 0.0;
    std::string per;
    for (const auto& s : {thue_morse(), period_doubling(), block_4x3()}) {
        double w = 0.0;
        for (int k = 0; k < 1000; ++k) {
            std::vector<double> t(s.dim);
            for (auto& v : t) v = rng.uniform();
            w = std::max({w, det_identity_residual(s, t), oracle_identity_residual(s, t)});
        }
        per += " " + s.name + "=" + num(w);
        worst = std::max(worst, w);
    }
    return {worst < 1e-10, "max residual over 1000 z:" + per};
}

// 3. Quadrature against Jensen on random integer polynomials.
Outcome mahler_agreement() {
    Xoshiro256 rng(303);
    double worst_excess = -1.0;
    int failures = 0;
    for (int k = 0; k < 50; ++k) {
        LaurentPolynomial p(1);
        while (p.is_zero()) {
            const int degree = 1 + static_cast<int>(rng.below(6));
            for (int e = 0; e <= degree; ++e) p.add_term({e}, static_cast<std::int64_t>(rng.below(7)) - 3);
        }
        const auto exact = mahler_jensen_1d(p);
        const auto quad = mahler_quadrature(p, 4096, rng.next());
        const double bound = 3 * quad.standard_error + 1e-3;
        const double delta = std::abs(quad.value - exact.value);
        worst_excess = std::max(worst_excess, delta - bound);
        failures += delta >= bound;
    }
    const double m1 = mahler_measure(parse_polynomial("1 - z")).value;
    const double mz = mahler_measure(parse_polynomial("z")).value;
    const bool ok = failures == 0 && std::abs(m1) < 1e-3 && std::abs(mz) < 1e-3;
    return {ok, std::to_string(failures) + "/50 outside 3*stderr+1e-3 (worst margin " + num(worst_excess) +
                    "), m(1-z)=" + num(m1) + ", m(z)=" + num(mz)};
}

// 4. Growth of the B cocycle and additivity of the C exponents.
Outcome lyapunov_closed_form() {
    const std::vector subs{thue_morse(), period_doubling()};
    const auto src = DirectiveSource::bernoulli({0.5, 0.5}, kDefaultSeed);
    const TSampler sampler{kDefaultSeed, 100};
    const auto b = estimate_chi_plus_B(subs, src, sampler, 10000);
    const auto c = estimate_chi_pair_C(subs, src, sampler, 10000);
    const double sum = c.chi_plus.chi + c.chi_minus.chi;
    const double gap = std::abs(sum - c.log_det_rate.chi);
    const bool ok = std::abs(b.chi) < 0.02 && gap <= 3 * c.log_det_rate.stderr_;
    return {ok, "growth=" + num(b.chi) + " (closed form " + num(b.closed_form.value_or(NAN)) + "), chi+ + chi- = " +
                    num(sum) + " vs log-det " + num(c.log_det_rate.chi) + " +- " + num(c.log_det_rate.stderr_)};
}

// 5. Criterion margin for a Bernoulli mix and a Sturmian directive.
Outcome criterion_margin_check() {
    const std::vector subs{thue_morse(), period_doubling()};
    const TSampler sampler{kDefaultSeed, 100};
    const auto bern = criterion_margin(subs, DirectiveSource::bernoulli({0.5, 0.5}, kDefaultSeed), sampler, 10000);
    const auto rot =
        criterion_margin(subs, DirectiveSource::rotation(0.6180339887, {0.3819660113}), sampler, 10000);
    auto good = [](const CriterionReport& r) {
        return std::abs(r.margin - kHalfLog2) <= 0.05 && r.verdict == Verdict::positive_margin;
    };
    return {good(bern) && good(rot), "bernoulli margin=" + num(bern.margin) + " " + to_string(bern.verdict) +
                                         "; rotation margin=" + num(rot.margin) + " " + to_string(rot.verdict)};
}

// 6. Pair-correlation renormalization identity. When the expansion divides R the
// fine window is exactly the image of the coarse one and the residual vanishes,
// so odd radii are checked as well to expose the boundary term.
Outcome renormalization() {
    const std::vector tm{thue_morse()};
    const std::vector mixed{thue_morse(), period_doubling()};
    Word alternating;
    for (int k = 0; k < 13; ++k) alternating.push_back(1 + k % 2);
    double r_tm = 0.0, r_mixed = 0.0;
    for (std::int64_t radius : {32, 33}) {
        r_tm = std::max(r_tm, renormalization_residual(tm, Word(13, 1), 1, 12, radius));
        r_mixed = std::max(r_mixed, renormalization_residual(mixed, alternating, 1, 12, radius));
    }
    std::vector<double> r;
    for (std::size_t level : {8, 10, 12, 14}) r.push_back(renormalization_residual(tm, Word(level + 1, 1), 1, level, 7));
    bool monotone = true;
    for (std::size_t k = 0; k + 1 < r.size(); ++k) monotone = monotone && r[k] >= r[k + 1] - 0.005;
    const bool ok = r_tm < 0.01 && r_mixed < 0.02 && monotone;
    return {ok, "R in {32,33}: TM=" + num(r_tm) + " mixed=" + num(r_mixed) + "; R=7 levels 8..14: " + num(r[0]) + " " +
                    num(r[1]) + " " + num(r[2]) + " " + num(r[3])};
}

// 7. Letter frequencies.
Outcome frequencies() {
    const std::vector pd{period_doubling()};
    const std::vector tm{thue_morse()};
    const auto f = letter_frequencies(supertile(pd, Word(10, 1), 1));
    bool tm_exact = true;
    for (std::size_t level = 1; level <= 16; ++level) {
        const auto g = letter_frequencies(supertile(tm, Word(level, 1), 1));
        tm_exact = tm_exact && g[0] == 0.5 && g[1] == 0.5;
    }
    const bool ok = std::abs(f[0] - 2.0 / 3) < 1e-2 && std::abs(f[1] - 1.0 / 3) < 1e-2 && tm_exact;
    return {ok, "PD level 10 = (" + num(f[0]) + ", " + num(f[1]) + "), TM exact at levels 1..16: " +
                    (tm_exact ? "yes" : "no")};
}

// 8. Parseval on the DFT grid and a long-double phase-sum oracle.
Outcome diffraction() {
    const std::vector tm{thue_morse()};
    const auto p = supertile(tm, Word(12, 1), 1);
    const Weights w{1.0, -1.0};
    const auto g = dft_intensity(p, w);
    double mean = 0.0;
    for (double v : g.intensity) mean += v;
    mean /= static_cast<double>(g.size());
    const double parseval = std::abs(mean - 1.0);

    Xoshiro256 rng(808);
    std::vector<std::vector<double>> ts;
    for (int k = 0; k < 100; ++k) ts.push_back({rng.uniform()});
    const auto d = diffraction_intensity(p, w, ts);
    double worst = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        long double re = 0, im = 0;
        for (std::size_t x = 0; x < p.volume(); ++x) {
            const long double a = static_cast<long double>(ts[k][0]) * static_cast<long double>(x);
            const long double r = 2 * std::numbers::pi_v<long double> * (a - std::floor(a));
            const long double s = p.cells[x] == 1 ? 1.0L : -1.0L;
            re += s * std::cos(r);
            im -= s * std::sin(r);
        }
        const double brute = static_cast<double>((re * re + im * im) / static_cast<long double>(p.volume()));
        worst = std::max(worst, std::abs(d.intensity[k] - brute));
    }
    return {parseval < 1e-9 && worst < 1e-10,
            "Parseval error " + num(parseval) + ", max |I - brute| = " + num(worst) + " at 100 t"};
}

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "Fourier fixture", 1.0, fourier_fixture},
        {2, "determinant/eigenvector identity", 1.0, determinant_identity},
        {3, "Mahler oracle agreement", 30.0, mahler_agreement},
        {4, "Lyapunov closed form", 120.0, lyapunov_closed_form},
        {5, "criterion margin", 180.0, criterion_margin_check},
        {6, "renormalization identity", 60.0, renormalization},
        {7, "frequency convergence", 5.0, frequencies},
        {8, "diffraction surrogate", 30.0, diffraction},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("[%s] %d. %s: %s (%.2fs, budget %.0fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
