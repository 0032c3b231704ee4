#pragma once

#include <array>
#include <cstdint>

namespace sadic {

/// SplitMix64 step. Used for seeding and for deriving per-stream seeds.
///
///   z = (state += 0x9E3779B97F4A7C15)
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
std::uint64_t splitmix64(std::uint64_t& state);

/// Mixes a base seed with a stream index into an independent seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// xoshiro256** (Blackman & Vigna), a member of the xorshift family.
///
/// State is four 64-bit words filled from SplitMix64(seed). One step:
///
///   result = rotl(s1 * 5, 7) * 9
///   t  = s1 << 17
///   s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3
///   s2 ^= t;  s3 = rotl(s3, 45)
///
/// The algorithm is fully specified here so that sequences can be
/// reproduced bit for bit in any language.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();

    /// Uniform double in [0, 1) with 53 random bits: (next() >> 11) * 2^-53.
    double uniform();

    /// Uniform integer in [0, bound) by rejection on the top of the range.
    std::uint64_t below(std::uint64_t bound);

private:
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace sadic
