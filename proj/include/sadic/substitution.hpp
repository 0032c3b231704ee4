#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sadic {

using LatticePoint = std::vector<std::int64_t>;

/// Directive word: 1-based indices into a list of substitutions.
using Word = std::vector<int>;

/// Default cap on patch cells (4096^2).
inline constexpr std::size_t kDefaultCellCap = std::size_t{4096} * 4096;

/// Row-major flat index of a point inside a box of the given shape
/// (axis 0 varies slowest).
std::size_t flat_index(std::span<const std::int64_t> point, std::span<const std::int64_t> shape);
LatticePoint unflatten(std::size_t index, std::span<const std::int64_t> shape);

/// A d-dimensional block substitution on letters 1..alphabet_size.
///
/// Every prototile has support [0,1]^d and the expansion is the diagonal
/// matrix diag(expansion). The image of letter j is the box
/// F = prod [0, expansion[c]) with letter blocks[j-1][f] placed at offset f.
/// Letters are dense 1-based integers; letter_names is metadata only.
///
/// Finite local complexity holds automatically for this class, so it is
/// never checked.
struct BlockSubstitution {
    std::string name;
    std::size_t dim = 1;
    std::size_t alphabet_size = 0;
    std::vector<std::string> letter_names;
    std::vector<std::int64_t> expansion;
    std::vector<std::vector<int>> blocks;  // [letter-1][flat offset]

    /// #F = product of the expansion entries = det(phi).
    [[nodiscard]] std::size_t block_volume() const;
    [[nodiscard]] int letter_at(int source_letter, std::span<const std::int64_t> offset) const;
};

struct ValidationReport {
    std::vector<std::string> issues;
    [[nodiscard]] bool ok() const { return issues.empty(); }
};

/// Lists every violated invariant; an empty report means the substitution is valid.
ValidationReport validate(const BlockSubstitution& sub);

/// Throws sadic::Error carrying the first issues when sub is invalid.
void require_valid(const BlockSubstitution& sub);

/// T_{k,j}: offsets where letter k appears in the image of letter j.
struct DigitSets {
    std::size_t dim = 1;
    std::size_t alphabet_size = 0;
    std::vector<std::vector<LatticePoint>> sets;  // index (k-1)*n + (j-1)

    [[nodiscard]] const std::vector<LatticePoint>& at(int k, int j) const {
        return sets[static_cast<std::size_t>(k - 1) * alphabet_size + static_cast<std::size_t>(j - 1)];
    }
};

DigitSets digit_sets(const BlockSubstitution& sub);

/// Nonnegative integer n x n matrix with A[k][j] = #T_{k,j}; 1-based accessors.
class SubstitutionMatrix {
public:
    explicit SubstitutionMatrix(std::size_t n = 0) : n_(n), a_(n * n, 0) {}
    SubstitutionMatrix(std::size_t n, std::vector<std::int64_t> row_major);

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::int64_t operator()(int k, int j) const { return a_[idx(k, j)]; }
    std::int64_t& operator()(int k, int j) { return a_[idx(k, j)]; }
    [[nodiscard]] std::int64_t column_sum(int j) const;
    [[nodiscard]] bool all_positive() const;

    friend SubstitutionMatrix operator*(const SubstitutionMatrix& a, const SubstitutionMatrix& b);
    friend bool operator==(const SubstitutionMatrix&, const SubstitutionMatrix&) = default;

private:
    [[nodiscard]] std::size_t idx(int k, int j) const {
        return static_cast<std::size_t>(k - 1) * n_ + static_cast<std::size_t>(j - 1);
    }
    std::size_t n_;
    std::vector<std::int64_t> a_;
};

SubstitutionMatrix substitution_matrix(const BlockSubstitution& sub);

/// outer o inner: apply inner first, then outer. The expansion is the
/// entrywise product and the matrix is A_outer * A_inner.
BlockSubstitution compose(const BlockSubstitution& outer, const BlockSubstitution& inner);

/// True iff every entry of A_{word_1} ... A_{word_m} is positive. Only the
/// zero pattern matters, so the product is taken over booleans.
bool is_positive_product(std::span<const BlockSubstitution> subs, const Word& word);

/// Finite labeled box of Z^d with a letter on every cell.
struct Patch {
    std::size_t dim = 1;
    std::vector<std::int64_t> extent;
    std::vector<int> cells;  // row-major, axis 0 slowest

    [[nodiscard]] std::size_t volume() const { return cells.size(); }
    [[nodiscard]] int at(std::span<const std::int64_t> point) const { return cells[flat_index(point, extent)]; }

    static Patch single(std::size_t dim, int letter);
};

/// One substitution step rho(P): the cell at x becomes the block of its
/// letter placed at phi(x).
Patch substitute(const Patch& patch, const BlockSubstitution& sub, std::size_t cell_cap = kDefaultCellCap);

/// rho_{word_1} o rho_{word_2} o ... o rho_{word_m} applied to a single
/// tile of seed_letter at the origin (word_1 is applied last).
Patch supertile(std::span<const BlockSubstitution> subs, const Word& word, int seed_letter,
                std::size_t cell_cap = kDefaultCellCap);

/// Symbolic word of a one-dimensional patch, e.g. {1,2,2,1}.
std::vector<int> symbols(const Patch& patch);

/// Letter counts (index 0 is letter 1).
std::vector<std::int64_t> letter_counts(const Patch& patch, std::size_t alphabet_size);

}  // namespace sadic
