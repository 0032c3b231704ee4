#include "sadic/lyapunov.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "sadic/error.hpp"
#include "sadic/mahler.hpp"

namespace sadic {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::positive_margin: return "positive_margin";
        case Verdict::nonpositive_margin: return "nonpositive_margin";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

namespace {

constexpr double kDegenerateNorm = 1e-300;

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index writes
// its own result slot, so the outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

MeanStderr summarize(const std::vector<double>& xs) {
    MeanStderr r;
    if (xs.empty()) return r;
    double sum = 0.0;
    for (double x : xs) sum += x;
    r.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - r.mean) * (x - r.mean);
        r.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return r;
}

ExponentEstimate make_estimate(std::vector<double> per_sample, std::int64_t steps) {
    ExponentEstimate e;
    const auto s = summarize(per_sample);
    e.chi = s.mean;
    e.stderr_ = s.stderr_;
    e.t_samples = per_sample.size();
    e.steps_per_sample = steps;
    e.per_sample = std::move(per_sample);
    return e;
}

void check_family(std::span<const BlockSubstitution> subs, const DirectiveSource& src) {
    if (subs.empty()) throw Error("no substitutions given");
    for (const auto& s : subs) {
        require_valid(s);
        if (s.dim != subs.front().dim) throw Error("substitutions differ in dimension");
        if (s.alphabet_size != subs.front().alphabet_size) throw Error("substitutions differ in alphabet size");
    }
    if (src.symbol_count() > subs.size())
        throw Error("directive uses " + std::to_string(src.symbol_count()) + " symbols but only " +
                    std::to_string(subs.size()) + " substitutions were given");
}

std::vector<double> log_dets(std::span<const BlockSubstitution> subs) {
    std::vector<double> out;
    for (const auto& s : subs) out.push_back(std::log(static_cast<double>(s.block_volume())));
    return out;
}

void strip_norm(ComplexMatrix& m, double& log_sum) {
    const double norm = operator_norm(m);
    if (!(norm >= kDegenerateNorm) || !std::isfinite(norm)) throw NumericalError("cocycle degenerate");
    m /= norm;
    log_sum += std::log(norm);
}

struct BSample {
    double growth = 0.0;
    double volume = 0.0;
    double liminf_margin = 0.0;
    std::vector<double> t0;
    bool origin = false;
};

/// Orbit randomness of sample s. Kept apart from derive_seed(seed, s), which
/// is what a directive replica uses when it shares the sampler seed.
std::uint64_t orbit_seed(std::uint64_t seed, std::size_t s) { return derive_seed(derive_seed(seed, s), 0x0B17); }

/// log ||P m P^{-1}|| for a matrix m in the triangular basis.
double log_norm_from_triangular(const ComplexMatrix& m) { return std::log(operator_norm(from_triangular_basis(m))); }

BSample run_b_sample(std::span<const FourierFamily> families, const std::vector<QPolynomials>& qs,
                     const std::vector<double>& log_det, const DirectiveSource& src, const TSampler& sampler,
                     std::size_t s, std::int64_t steps) {
    Xoshiro256 rng(orbit_seed(sampler.seed, s));
    const auto& first = families.front().substitution();
    auto orbit = random_orbit_start(first.dim, rng);
    BSample out;
    out.t0 = orbit.torus_point();
    out.origin = orbit.is_origin();

    // Binary alphabets: the product is kept in the triangular basis, where
    // its lower-left entry stays exactly zero.
    const bool triangular = !qs.empty();
    auto directive = src.replica(s);
    auto state = CocycleState::start(first.alphabet_size, orbit);
    ComplexMatrix tri = ComplexMatrix::Identity(2, 2);
    double tri_log = 0.0;
    double volume = 0.0;
    const std::int64_t tail_start = steps - steps / 10;
    double tail_min = std::numeric_limits<double>::infinity();
    for (std::int64_t k = 1; k <= steps; ++k) {
        const int symbol = directive.next_symbol();
        const auto idx = static_cast<std::size_t>(symbol - 1);
        volume += log_det[idx];
        double log_norm = 0.0;
        if (triangular) {
            tri = tri * triangular_c_matrix(qs[idx], orbit.torus_point());
            strip_norm(tri, tri_log);
            orbit = skew_step(orbit, families[idx].substitution(), rng);
            if (k >= tail_start) log_norm = tri_log + log_norm_from_triangular(tri);
        } else {
            state = cocycle_step_forward(state, families, symbol, &rng);
            log_norm = state.log_norm_sum;
        }
        if (k >= tail_start) {
            const double kd = static_cast<double>(k);
            tail_min = std::min(tail_min, volume / (2.0 * kd) - log_norm / kd);
        }
    }
    const double n = static_cast<double>(steps);
    const double total = triangular ? tri_log + log_norm_from_triangular(tri) : state.log_norm_sum;
    out.growth = total / n;
    out.volume = volume / (2.0 * n);
    out.liminf_margin = tail_min;
    return out;
}

std::vector<BSample> run_b_samples(std::span<const BlockSubstitution> subs, const DirectiveSource& src,
                                   const TSampler& sampler, std::int64_t steps, const RunOptions& opts) {
    check_family(subs, src);
    if (steps < 1000) throw Error("at least 1000 steps per sample are required");
    if (sampler.count == 0) throw Error("at least one t sample is required");
    std::vector<FourierFamily> families(subs.begin(), subs.end());
    const auto log_det = log_dets(subs);
    std::vector<QPolynomials> qs;
    if (subs.front().alphabet_size == 2)
        for (const auto& s : subs) qs.push_back(q_polynomials(s));
    std::vector<BSample> samples(sampler.count);
    parallel_for(sampler.count, opts.threads,
                 [&](std::size_t s) { samples[s] = run_b_sample(families, qs, log_det, src, sampler, s, steps); });
    return samples;
}

struct CSample {
    bool ok = false;
    double chi_plus = 0.0, chi_minus = 0.0, vector_rate = 0.0, log_det = 0.0;
    std::vector<double> t0;
};

class SingularStep : public std::exception {};

CSample run_c_attempt(const std::vector<QPolynomials>& qs, const DirectiveSource& src, std::size_t s,
                      std::uint64_t seed, std::size_t dim, std::span<const BlockSubstitution> subs,
                      std::int64_t steps) {
    Xoshiro256 rng(seed);
    auto orbit = random_orbit_start(dim, rng);
    CSample out;
    out.t0 = orbit.torus_point();
    auto directive = src.replica(s);

    // Products are formed in the triangular basis: C = P T P^{-1} with
    // T = [[lambda, beta], [0, mu]], and (1,-1) = P e_1 is an eigenvector.
    ComplexMatrix left = ComplexMatrix::Identity(2, 2);   // T_n^{-1} = T(R^{n-1}w)^{-1} ... T(w)^{-1}
    ComplexMatrix right = ComplexMatrix::Identity(2, 2);  // T(w) ... T(R^{n-1}w)
    double left_log = 0.0, right_log = 0.0, vec_log = 0.5 * std::log(2.0), det_log = 0.0;

    for (std::int64_t k = 0; k < steps; ++k) {
        const int symbol = directive.next_symbol();
        const auto idx = static_cast<std::size_t>(symbol - 1);
        const ComplexMatrix c = triangular_c_matrix(qs[idx], orbit.torus_point());
        const Complex lambda = c(0, 0), beta = c(0, 1), mu = c(1, 1);
        const double abs_det = std::abs(lambda * mu);
        if (!(abs_det > kDegenerateNorm)) throw SingularStep{};
        ComplexMatrix inv(2, 2);
        inv(0, 0) = 1.0 / lambda;
        inv(0, 1) = -beta / (lambda * mu);
        inv(1, 0) = 0.0;
        inv(1, 1) = 1.0 / mu;

        left = inv * left;
        strip_norm(left, left_log);
        right = right * c;
        strip_norm(right, right_log);

        vec_log -= std::log(std::abs(lambda));
        det_log -= std::log(abs_det);
        orbit = skew_step(orbit, subs[idx], rng);
    }
    left_log += log_norm_from_triangular(left);
    right_log += log_norm_from_triangular(right);
    const double n = static_cast<double>(steps);
    out.ok = true;
    out.chi_plus = left_log / n;
    out.chi_minus = -right_log / n;
    out.vector_rate = vec_log / n;
    out.log_det = det_log / n;
    return out;
}

}  // namespace

CocycleState CocycleState::start(std::size_t alphabet_size, SkewOrbitState orbit) {
    CocycleState s;
    const auto n = static_cast<Eigen::Index>(alphabet_size);
    s.normalized_matrix = ComplexMatrix::Identity(n, n);
    s.orbit = std::move(orbit);
    return s;
}

CocycleState cocycle_step_forward(const CocycleState& state, std::span<const FourierFamily> families, int symbol,
                                  Xoshiro256* rng) {
    if (symbol < 1 || static_cast<std::size_t>(symbol) > families.size())
        throw Error("directive symbol " + std::to_string(symbol) + " has no substitution");
    const auto& family = families[static_cast<std::size_t>(symbol - 1)];
    CocycleState next;
    next.normalized_matrix = state.normalized_matrix * family.evaluate(state.orbit.torus_point());
    next.log_norm_sum = state.log_norm_sum;
    strip_norm(next.normalized_matrix, next.log_norm_sum);
    next.steps = state.steps + 1;
    next.orbit = rng ? skew_step(state.orbit, family.substitution(), *rng) : skew_step(state.orbit, family.substitution());
    next.orbit.directive_index = symbol;
    return next;
}

CocycleState cocycle_step_forward(const CocycleState& state, std::span<const BlockSubstitution> subs, int symbol,
                                  Xoshiro256* rng) {
    if (symbol < 1 || static_cast<std::size_t>(symbol) > subs.size())
        throw Error("directive symbol " + std::to_string(symbol) + " has no substitution");
    const FourierFamily family(subs[static_cast<std::size_t>(symbol - 1)]);
    return cocycle_step_forward(state, std::span<const FourierFamily>(&family, 1), 1, rng);
}

std::optional<double> closed_form_growth(std::span<const BlockSubstitution> subs, const DirectiveSource& src,
                                         std::int64_t mahler_grid) {
    const auto mu = src.symbol_measure();
    double total = 0.0;
    for (std::size_t i = 0; i < mu.size() && i < subs.size(); ++i) {
        if (subs[i].alphabet_size != 2) return std::nullopt;
        if (mu[i] <= 0.0) continue;
        const auto diff = q_polynomials(subs[i]).difference();
        if (diff.is_zero())
            throw NumericalError("singular Fourier matrix family: q12 - q21 vanishes for '" + subs[i].name + "'");
        total += mu[i] * mahler_measure(diff, mahler_grid).value;
    }
    return total;
}

ExponentEstimate estimate_chi_plus_B(std::span<const BlockSubstitution> subs, const DirectiveSource& src,
                                     const TSampler& sampler, std::int64_t steps, const RunOptions& opts) {
    const auto samples = run_b_samples(subs, src, sampler, steps, opts);
    std::vector<double> growth;
    ExponentEstimate est;
    for (const auto& s : samples) {
        growth.push_back(s.growth);
        est.sample_points.push_back(s.t0);
    }
    auto points = std::move(est.sample_points);
    est = make_estimate(std::move(growth), steps);
    est.sample_points = std::move(points);
    est.closed_form = closed_form_growth(subs, src, opts.mahler_grid);
    return est;
}

CPairEstimate estimate_chi_pair_C(std::span<const BlockSubstitution> subs, const DirectiveSource& src,
                                  const TSampler& sampler, std::int64_t steps, const RunOptions& opts) {
    check_family(subs, src);
    if (subs.front().alphabet_size != 2) throw Error("the inverse C cocycle is defined for binary alphabets only");
    if (steps < 1000) throw Error("at least 1000 steps per sample are required");
    if (sampler.count == 0) throw Error("at least one t sample is required");

    std::vector<QPolynomials> qs;
    for (const auto& s : subs) qs.push_back(q_polynomials(s));
    const std::size_t dim = subs.front().dim;

    std::vector<CSample> samples(sampler.count);
    parallel_for(sampler.count, opts.threads, [&](std::size_t s) {
        const std::uint64_t base = orbit_seed(sampler.seed, s);
        for (int attempt = 0; attempt < 8; ++attempt) {
            const std::uint64_t seed = attempt == 0 ? base : derive_seed(base, static_cast<std::uint64_t>(attempt));
            try {
                samples[s] = run_c_attempt(qs, src, s, seed, dim, subs, steps);
                return;
            } catch (const SingularStep&) {
            }
        }
    });

    std::vector<double> plus, minus, vec, logdet;
    std::vector<std::vector<double>> points;
    double gap = 0.0;
    std::size_t dropped = 0;
    for (const auto& s : samples) {
        if (!s.ok) {
            ++dropped;
            continue;
        }
        plus.push_back(s.chi_plus);
        minus.push_back(s.chi_minus);
        vec.push_back(s.vector_rate);
        logdet.push_back(s.log_det);
        points.push_back(s.t0);
        gap = std::max(gap, std::abs(s.chi_plus + s.chi_minus - s.log_det));
    }
    if (plus.empty()) throw NumericalError("every t sample hit a singular C matrix");

    CPairEstimate out;
    out.chi_plus = make_estimate(std::move(plus), steps);
    out.chi_minus = make_estimate(std::move(minus), steps);
    out.vector_rate = make_estimate(std::move(vec), steps);
    out.log_det_rate = make_estimate(std::move(logdet), steps);
    for (auto* e : {&out.chi_plus, &out.chi_minus, &out.vector_rate, &out.log_det_rate}) {
        e->dropped_samples = dropped;
        e->sample_points = points;
    }
    out.max_identity_gap = gap;

    if (auto g = closed_form_growth(subs, src, opts.mahler_grid)) {
        out.chi_plus.closed_form = 0.0;
        out.chi_minus.closed_form = -*g;
        out.vector_rate.closed_form = -*g;
        out.log_det_rate.closed_form = -*g;
    }
    return out;
}

CriterionReport criterion_margin(std::span<const BlockSubstitution> subs, const DirectiveSource& src,
                                 const TSampler& sampler, std::int64_t steps, const RunOptions& opts) {
    CriterionReport report;
    report.steps = steps;
    check_family(subs, src);

    try {
        report.growth_closed = closed_form_growth(subs, src, opts.mahler_grid);
    } catch (const NumericalError& e) {
        report.verdict = Verdict::inconclusive;
        report.note = e.what();
        return report;
    }
    const auto mu = src.symbol_measure();
    const auto log_det = log_dets(subs);
    double vol_closed = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) vol_closed += 0.5 * mu[i] * log_det[i];
    report.volume_rate_closed = vol_closed;

    const auto samples = run_b_samples(subs, src, sampler, steps, opts);
    std::vector<double> growth, volume, liminf;
    for (const auto& s : samples) {
        if (s.origin) {
            ++report.excluded_samples;
            continue;
        }
        growth.push_back(s.growth);
        volume.push_back(s.volume);
        liminf.push_back(s.liminf_margin);
        report.per_t_margins.push_back(s.volume - s.growth);
        report.sample_points.push_back(s.t0);
    }
    report.per_t_liminf_margins = liminf;
    report.t_samples = report.per_t_margins.size();
    if (report.t_samples == 0) {
        report.verdict = Verdict::inconclusive;
        report.note = "no usable t samples";
        return report;
    }

    const auto g = summarize(growth);
    const auto v = summarize(volume);
    const auto m = summarize(report.per_t_margins);
    report.growth_rate = g.mean;
    report.growth_stderr = g.stderr_;
    report.volume_rate = v.mean;
    report.margin = report.volume_rate - report.growth_rate;
    report.margin_stderr = m.stderr_;
    report.liminf_margin = summarize(liminf).mean;

    std::size_t positive = 0, negative = 0;
    for (double x : report.per_t_margins) {
        if (x - 2.0 * report.margin_stderr > 0.0) ++positive;
        if (x + 2.0 * report.margin_stderr <= 0.0) ++negative;
    }
    const double n = static_cast<double>(report.t_samples);
    report.positive_fraction = static_cast<double>(positive) / n;
    if (report.positive_fraction >= 0.95)
        report.verdict = Verdict::positive_margin;
    else if (static_cast<double>(negative) / n >= 0.95)
        report.verdict = Verdict::nonpositive_margin;
    else
        report.verdict = Verdict::inconclusive;
    return report;
}

}  // namespace sadic
