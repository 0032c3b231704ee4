#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sadic/directive.hpp"
#include "sadic/fourier.hpp"
#include "sadic/linalg.hpp"
#include "sadic/substitution.hpp"

namespace sadic {

/// Running product B^{(i_1)}(t) B^{(i_2)}(phi_1 t) ... kept as a unit-norm
/// matrix times exp(log_norm_sum).
struct CocycleState {
    ComplexMatrix normalized_matrix;
    double log_norm_sum = 0.0;
    std::int64_t steps = 0;
    SkewOrbitState orbit;

    /// Empty product (identity, log_norm_sum 0) at the given orbit point.
    static CocycleState start(std::size_t alphabet_size, SkewOrbitState orbit);
};

/// Multiplies on the right by B^{(symbol)} at the current torus point,
/// strips the operator norm into log_norm_sum, then advances the orbit.
/// With rng the orbit refills its low digits (see skew_step). Throws
/// NumericalError("cocycle degenerate") if the norm drops below 1e-300.
CocycleState cocycle_step_forward(const CocycleState& state, std::span<const FourierFamily> families, int symbol,
                                  Xoshiro256* rng = nullptr);
CocycleState cocycle_step_forward(const CocycleState& state, std::span<const BlockSubstitution> subs, int symbol,
                                  Xoshiro256* rng = nullptr);

/// Uniform t samples. Sample s draws its start point and orbit digits from
/// derive_seed(derive_seed(seed, s), 0x0B17) and its directive from src.replica(s).
struct TSampler {
    std::uint64_t seed = kDefaultSeed;
    std::size_t count = 100;
};

struct ExponentEstimate {
    double chi = 0.0;     // nats per step, mean over samples
    double stderr_ = 0.0; // standard error of the mean over samples
    std::size_t t_samples = 0;
    std::int64_t steps_per_sample = 0;
    std::optional<double> closed_form;
    std::vector<double> per_sample;
    std::vector<std::vector<double>> sample_points;  // starting t of each sample
    std::size_t dropped_samples = 0;
};

/// Execution knobs shared by the estimators. Results do not depend on threads.
struct RunOptions {
    unsigned threads = 0;  // 0: hardware concurrency
    std::int64_t mahler_grid = 512;
};

/// sum_i mu(E_i) m(q^{(i)}_{1,2} - q^{(i)}_{2,1}) for binary families, or
/// nullopt when the alphabet is not binary. Throws NumericalError when a
/// substitution carrying positive mass has a vanishing q difference.
std::optional<double> closed_form_growth(std::span<const BlockSubstitution> subs, const DirectiveSource& src,
                                         std::int64_t mahler_grid = 512);

/// Top exponent of the Fourier cocycle: mean of log||B-bar^{(k)}(t)|| / k.
/// For binary alphabets the product is accumulated in the basis of
/// triangular_c_matrix and conjugated back only when a norm is read.
ExponentEstimate estimate_chi_plus_B(std::span<const BlockSubstitution> subs, const DirectiveSource& src,
                                     const TSampler& sampler, std::int64_t steps, const RunOptions& opts = {});

/// Exponents of the inverse cocycle C(z, x) = C^{(i)}(z)^{-1}, binary only.
struct CPairEstimate {
    ExponentEstimate chi_plus;     // (1/n) log ||C_n||, left products of inverses
    ExponentEstimate chi_minus;    // -(1/n) log ||C_n^{-1}||, right products of C
    ExponentEstimate vector_rate;  // (1/n) log ||C_n v||, v = (1, -1)^T
    ExponentEstimate log_det_rate; // Birkhoff average of log|det C|
    double max_identity_gap = 0.0; // max over samples |chi_+ + chi_- - log_det_rate|
};

/// Products are accumulated in the triangular basis.
CPairEstimate estimate_chi_pair_C(std::span<const BlockSubstitution> subs, const DirectiveSource& src,
                                  const TSampler& sampler, std::int64_t steps, const RunOptions& opts = {});

enum class Verdict { positive_margin, nonpositive_margin, inconclusive };

std::string to_string(Verdict v);

struct CriterionReport {
    double volume_rate = 0.0;                  // mean of (1/2k) sum log det phi_{i_n}
    std::optional<double> volume_rate_closed;  // (1/2) sum mu(E_i) log det phi_i
    double growth_rate = 0.0;                  // mean of (1/k) log ||B-bar^{(k)}(t)||
    double growth_stderr = 0.0;
    std::optional<double> growth_closed;       // sum mu(E_i) m(q diff)
    double margin = 0.0;                       // volume_rate - growth_rate
    double margin_stderr = 0.0;
    double liminf_margin = 0.0;                // mean over samples of the tail-min surrogate
    std::vector<double> per_t_margins;
    std::vector<double> per_t_liminf_margins;
    std::vector<std::vector<double>> sample_points;
    double positive_fraction = 0.0;
    std::size_t t_samples = 0;
    std::size_t excluded_samples = 0;
    std::int64_t steps = 0;
    Verdict verdict = Verdict::inconclusive;
    std::string note;
};

/// Evaluates (1/2k) log(det phi_{i_1} ... det phi_{i_k}) - (1/k) log||B-bar^{(k)}(t)||
/// over sampled t and directive replicas. Verdict is positive_margin iff
/// margin_s - 2 * margin_stderr > 0 for at least 95% of samples.
/// The liminf is approximated by the minimum running margin over the last
/// 10% of steps. Samples starting at t = 0 are excluded from the verdict.
/// A vanishing q difference yields verdict inconclusive with a note.
CriterionReport criterion_margin(std::span<const BlockSubstitution> subs, const DirectiveSource& src,
                                 const TSampler& sampler, std::int64_t steps, const RunOptions& opts = {});

}  // namespace sadic
