#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sadic/substitution.hpp"

namespace sadic {

/// #{x : cells[x] = i} / volume for i = 1..alphabet_size. With
/// alphabet_size 0 the largest letter present is used.
std::vector<double> letter_frequencies(const Patch& patch, std::size_t alphabet_size = 0);

/// Empirical nu_{i,j}(z): density of x with letter i at x and letter j at
/// x + z, for |z|_inf <= radius.
///
/// Reference points x range over the eroded window prod [R, extent_c - R),
/// so x + z never leaves the patch; counts are divided by its volume.
class PairCorrelationTable {
public:
    PairCorrelationTable(std::size_t dim, std::int64_t radius, std::size_t alphabet_size, std::int64_t window_volume);

    [[nodiscard]] std::size_t dim() const { return dim_; }
    [[nodiscard]] std::int64_t radius() const { return radius_; }
    [[nodiscard]] std::size_t alphabet_size() const { return alphabet_size_; }
    [[nodiscard]] std::int64_t window_volume() const { return window_volume_; }
    [[nodiscard]] std::size_t displacement_count() const { return displacements_; }

    /// Displacement number k (row-major over [-R, R]^d).
    [[nodiscard]] std::vector<std::int64_t> displacement(std::size_t k) const;
    [[nodiscard]] bool contains(std::span<const std::int64_t> z) const;

    [[nodiscard]] std::int64_t count(int i, int j, std::span<const std::int64_t> z) const;
    [[nodiscard]] double frequency(int i, int j, std::span<const std::int64_t> z) const;

    std::int64_t& raw_count(int i, int j, std::size_t k);

private:
    [[nodiscard]] std::size_t slot(int i, int j, std::size_t k) const;
    [[nodiscard]] std::size_t displacement_index(std::span<const std::int64_t> z) const;

    std::size_t dim_;
    std::int64_t radius_;
    std::size_t alphabet_size_;
    std::int64_t window_volume_;
    std::size_t displacements_;
    std::vector<std::int64_t> counts_;
};

/// Requires radius < min extent / 4.
PairCorrelationTable pair_correlations(const Patch& patch, std::int64_t radius, std::size_t alphabet_size = 0);

struct RenormalizationCheck {
    double residual = 0.0;
    std::int64_t coarse_radius = 0;
    std::size_t fine_volume = 0;
    std::size_t coarse_volume = 0;
};

/// Compares both sides of the pair-correlation renormalization equation
///
///   nu_fine_{i,j}(z) = (1/det phi) sum_{m,n} sum_{x in T_{i,m}} sum_{y in T_{j,n}}
///                      nu_coarse_{m,n}(phi^{-1}(z + x - y))
///
/// where phi belongs to word[0], the coarse patch is the supertile of
/// word[1..level] and the fine patch is obtained from it by one forward
/// substitution with word[0] (no de-substitution is ever needed). Terms
/// where phi^{-1}(z + x - y) is not integral vanish. Returns the max
/// deviation over (i, j) and |z|_inf <= radius.
RenormalizationCheck renormalization_check(std::span<const BlockSubstitution> subs, const Word& word,
                                           int seed_letter, std::size_t level, std::int64_t radius,
                                           std::size_t cell_cap = kDefaultCellCap);

double renormalization_residual(std::span<const BlockSubstitution> subs, const Word& word, int seed_letter,
                                std::size_t level, std::int64_t radius);

using Weights = std::vector<std::complex<double>>;

/// Finite-window intensities I(t) = |sum_x w_{label(x)} exp(-2 pi i <t, x>)|^2 / volume.
struct DiffractionGrid {
    std::size_t dim = 1;
    std::vector<std::int64_t> window;       // patch extent
    Weights weights;
    std::vector<std::vector<double>> points;  // explicit wave vectors (empty for DFT grids)
    std::vector<std::int64_t> dft_shape;      // set for DFT-aligned grids: t = m / extent
    std::vector<double> intensity;

    [[nodiscard]] std::size_t size() const { return intensity.size(); }
    [[nodiscard]] std::vector<double> point(std::size_t k) const;
};

inline constexpr std::size_t kDefaultWaveVectorCap = std::size_t{1} << 20;

/// Direct summation at arbitrary wave vectors (per-axis phase tables).
DiffractionGrid diffraction_intensity(const Patch& patch, const Weights& weights,
                                      const std::vector<std::vector<double>>& t_grid,
                                      std::size_t wave_vector_cap = kDefaultWaveVectorCap);

/// All DFT-aligned wave vectors t = m / extent via FFT.
DiffractionGrid dft_intensity(const Patch& patch, const Weights& weights);

/// Text encoding of a patch: '#' comment lines, "dim d", "extent e_1 .. e_d",
/// then "runs" followed by letter*count tokens in row-major order.
void write_patch_rle(std::ostream& os, const Patch& patch);
Patch read_patch_rle(std::istream& is);

}  // namespace sadic
