#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sadic/rng.hpp"
#include "sadic/substitution.hpp"

namespace sadic {

enum class DirectiveKind { constant, periodic_word, bernoulli, markov, rotation_coding };

std::string to_string(DirectiveKind k);

/// Default seed used whenever none is given. Never derived from the clock.
inline constexpr std::uint64_t kDefaultSeed = 20240607;

/// A stream of directive symbols i_1, i_2, ... in {1..m}.
///
/// constant / periodic_word: cycle through a fixed word.
/// bernoulli: i.i.d. draws from a probability vector.
/// markov: first symbol from the initial distribution, then rows of a
///   stochastic matrix.
/// rotation_coding: symbol n is the partition cell of {x0 + n*alpha};
///   cuts 0 < c_1 < ... < c_{m-1} < 1 split [0,1) into [0,c_1), [c_1,c_2), ...
///   The orbit is advanced with compensated (Kahan) summation; it is
///   approximate beyond roughly 1e9 steps. Irrationality of alpha (needed
///   for ergodicity) is not checked.
///
/// A source is a single-consumer stream. replica() gives an independent
/// copy whose random state is derived from (seed, stream).
class DirectiveSource {
public:
    static DirectiveSource constant(int symbol);
    static DirectiveSource periodic(Word word);
    static DirectiveSource bernoulli(std::vector<double> probabilities, std::uint64_t seed);
    static DirectiveSource markov(std::vector<std::vector<double>> transition, std::vector<double> initial,
                                  std::uint64_t seed);
    static DirectiveSource rotation(double alpha, std::vector<double> cuts, double x0 = 0.0);

    int next_symbol();

    /// Number of symbols m.
    [[nodiscard]] std::size_t symbol_count() const { return symbol_count_; }
    [[nodiscard]] DirectiveKind kind() const { return kind_; }
    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] std::int64_t step() const { return step_; }

    /// mu(E_i): stationary mass of each symbol (closed form for every kind).
    [[nodiscard]] std::vector<double> symbol_measure() const;

    /// Fresh copy restarted at step 0. Random kinds reseed with
    /// derive_seed(seed, stream); deterministic kinds are unchanged.
    [[nodiscard]] DirectiveSource replica(std::uint64_t stream) const;

    /// Restart at step 0 with the original seed.
    void reset();

    /// Canonical textual form, parseable by parse_directive.
    [[nodiscard]] std::string describe() const;

private:
    DirectiveSource(DirectiveKind kind, std::uint64_t seed);
    int draw(const std::vector<double>& cdf);

    DirectiveKind kind_;
    std::uint64_t seed_;
    Xoshiro256 rng_;
    std::int64_t step_ = 0;
    std::size_t symbol_count_ = 0;

    Word word_;
    std::vector<double> probabilities_;
    std::vector<double> cdf_;
    std::vector<std::vector<double>> transition_;
    std::vector<std::vector<double>> transition_cdf_;
    std::vector<double> initial_;
    std::vector<double> initial_cdf_;
    int last_ = 0;
    double alpha_ = 0.0;
    double x0_ = 0.0;
    std::vector<double> cuts_;
    double x_ = 0.0;
    double compensation_ = 0.0;
};

/// Parses "constant:1", "word:121" (or "word:1,2,1"), "bernoulli:0.3,0.7",
/// "markov:rows=0.9,0.1/0.2,0.8;init=0.5,0.5",
/// "rotation:alpha=0.6180339887,cut=0.3819660113[,x0=0.1]".
DirectiveSource parse_directive(const std::string& spec, std::uint64_t seed = kDefaultSeed);

/// First n symbols of a fresh replica-free copy of src.
Word take_word(DirectiveSource src, std::size_t n);

/// Point of the skew product orbit.
///
/// The torus coordinate is stored in 64-bit fixed point: t_c = fixed[c] / 2^64.
/// Multiplication by an integer expansion is then exact modulo 1.
struct SkewOrbitState {
    std::vector<std::uint64_t> fixed;
    std::int64_t step = 0;
    int directive_index = 0;

    static SkewOrbitState at(const std::vector<double>& t);
    [[nodiscard]] std::vector<double> torus_point() const;
    [[nodiscard]] std::size_t dim() const { return fixed.size(); }
    [[nodiscard]] bool is_origin() const;
};

/// t_c <- frac(expansion[c] * t_c) on every axis; step incremented.
SkewOrbitState skew_step(const SkewOrbitState& state, const BlockSubstitution& sub);

/// Same map, with the low-order digits lost to the multiplication refilled
/// from rng: fixed_c <- expansion[c] * fixed_c + U_c (mod 2^64), U_c uniform
/// in [0, expansion[c]). If the starting point carries uniform sub-grid
/// randomness, this reproduces the law of the exact orbit of a
/// Lebesgue-random t for any number of steps (a plain double orbit of the
/// doubling map collapses to 0 after 53 steps).
SkewOrbitState skew_step(const SkewOrbitState& state, const BlockSubstitution& sub, Xoshiro256& rng);

/// Uniform random starting point in 64-bit fixed point.
SkewOrbitState random_orbit_start(std::size_t dim, Xoshiro256& rng);

/// Exact rational torus point num[c] / den[c].
struct RationalTorusPoint {
    std::vector<std::int64_t> num;
    std::vector<std::int64_t> den;
    friend bool operator==(const RationalTorusPoint&, const RationalTorusPoint&) = default;
};

RationalTorusPoint skew_step_exact(const RationalTorusPoint& p, const BlockSubstitution& sub);

}  // namespace sadic
