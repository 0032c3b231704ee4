#include "sadic/substitution.hpp"

#include <algorithm>
#include <sstream>

#include "sadic/error.hpp"

namespace sadic {

std::size_t flat_index(std::span<const std::int64_t> point, std::span<const std::int64_t> shape) {
    std::size_t idx = 0;
    for (std::size_t c = 0; c < shape.size(); ++c)
        idx = idx * static_cast<std::size_t>(shape[c]) + static_cast<std::size_t>(point[c]);
    return idx;
}

LatticePoint unflatten(std::size_t index, std::span<const std::int64_t> shape) {
    LatticePoint p(shape.size(), 0);
    for (std::size_t c = shape.size(); c-- > 0;) {
        const auto e = static_cast<std::size_t>(shape[c]);
        p[c] = static_cast<std::int64_t>(index % e);
        index /= e;
    }
    return p;
}

namespace {

std::string point_string(const LatticePoint& p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t c = 0; c < p.size(); ++c) os << (c ? "," : "") << p[c];
    os << ")";
    return os.str();
}

std::string letter_label(const BlockSubstitution& sub, std::size_t j) {
    std::string s = std::to_string(j + 1);
    if (j < sub.letter_names.size() && !sub.letter_names[j].empty()) s += " (" + sub.letter_names[j] + ")";
    return s;
}

}  // namespace

std::size_t BlockSubstitution::block_volume() const {
    std::size_t v = 1;
    for (auto e : expansion) v *= static_cast<std::size_t>(e);
    return v;
}

int BlockSubstitution::letter_at(int source_letter, std::span<const std::int64_t> offset) const {
    return blocks[static_cast<std::size_t>(source_letter - 1)][flat_index(offset, expansion)];
}

ValidationReport validate(const BlockSubstitution& sub) {
    ValidationReport r;
    if (sub.dim == 0) r.issues.push_back("dimension must be positive");
    if (sub.alphabet_size == 0) r.issues.push_back("alphabet is empty");
    if (sub.expansion.size() != sub.dim)
        r.issues.push_back("expansion has " + std::to_string(sub.expansion.size()) + " entries, expected " +
                           std::to_string(sub.dim));
    bool expansion_ok = sub.expansion.size() == sub.dim;
    for (std::size_t c = 0; c < sub.expansion.size(); ++c)
        if (sub.expansion[c] < 2) {
            r.issues.push_back("expansion entry < 2 on axis " + std::to_string(c) + " (got " +
                               std::to_string(sub.expansion[c]) + ")");
            expansion_ok = false;
        }
    if (!sub.letter_names.empty() && sub.letter_names.size() != sub.alphabet_size)
        r.issues.push_back("alphabet names do not match alphabet size");
    if (sub.blocks.size() != sub.alphabet_size)
        r.issues.push_back("expected a rule for each of the " + std::to_string(sub.alphabet_size) +
                           " letters, got " + std::to_string(sub.blocks.size()));
    if (!expansion_ok) return r;

    const std::size_t vol = sub.block_volume();
    for (std::size_t j = 0; j < sub.blocks.size(); ++j) {
        const auto& b = sub.blocks[j];
        if (b.size() != vol) {
            r.issues.push_back("rule for letter " + letter_label(sub, j) + " has " + std::to_string(b.size()) +
                               " cells, expected " + std::to_string(vol));
            continue;
        }
        for (std::size_t f = 0; f < b.size(); ++f) {
            if (b[f] < 1 || static_cast<std::size_t>(b[f]) > sub.alphabet_size) {
                r.issues.push_back("letter out of range: rule for letter " + letter_label(sub, j) + " at cell " +
                                   point_string(unflatten(f, sub.expansion)) + " has letter " +
                                   std::to_string(b[f]));
            }
        }
    }
    return r;
}

void require_valid(const BlockSubstitution& sub) {
    auto r = validate(sub);
    if (r.ok()) return;
    std::string msg = "invalid substitution '" + sub.name + "': " + r.issues.front();
    if (r.issues.size() > 1) msg += " (and " + std::to_string(r.issues.size() - 1) + " more)";
    throw Error(msg);
}

DigitSets digit_sets(const BlockSubstitution& sub) {
    require_valid(sub);
    const std::size_t n = sub.alphabet_size;
    DigitSets ds;
    ds.dim = sub.dim;
    ds.alphabet_size = n;
    ds.sets.assign(n * n, {});
    const std::size_t vol = sub.block_volume();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t f = 0; f < vol; ++f) {
            const auto k = static_cast<std::size_t>(sub.blocks[j][f] - 1);
            ds.sets[k * n + j].push_back(unflatten(f, sub.expansion));
        }
    return ds;
}

SubstitutionMatrix::SubstitutionMatrix(std::size_t n, std::vector<std::int64_t> row_major)
    : n_(n), a_(std::move(row_major)) {
    if (a_.size() != n * n) throw Error("matrix entry count does not match size");
}

std::int64_t SubstitutionMatrix::column_sum(int j) const {
    std::int64_t s = 0;
    for (std::size_t k = 1; k <= n_; ++k) s += (*this)(static_cast<int>(k), j);
    return s;
}

bool SubstitutionMatrix::all_positive() const {
    return std::all_of(a_.begin(), a_.end(), [](std::int64_t v) { return v > 0; });
}

SubstitutionMatrix operator*(const SubstitutionMatrix& a, const SubstitutionMatrix& b) {
    if (a.n_ != b.n_) throw Error("matrix size mismatch");
    SubstitutionMatrix c(a.n_);
    for (std::size_t i = 0; i < a.n_; ++i)
        for (std::size_t k = 0; k < a.n_; ++k) {
            const auto aik = a.a_[i * a.n_ + k];
            if (aik == 0) continue;
            for (std::size_t j = 0; j < a.n_; ++j) c.a_[i * a.n_ + j] += aik * b.a_[k * a.n_ + j];
        }
    return c;
}

SubstitutionMatrix substitution_matrix(const BlockSubstitution& sub) {
    require_valid(sub);
    SubstitutionMatrix a(sub.alphabet_size);
    for (std::size_t j = 0; j < sub.alphabet_size; ++j)
        for (int k : sub.blocks[j]) a(k, static_cast<int>(j + 1)) += 1;
    return a;
}

BlockSubstitution compose(const BlockSubstitution& outer, const BlockSubstitution& inner) {
    require_valid(outer);
    require_valid(inner);
    if (outer.dim != inner.dim) throw Error("compose: dimension mismatch");
    if (outer.alphabet_size != inner.alphabet_size) throw Error("compose: alphabet size mismatch");

    BlockSubstitution out;
    out.name = outer.name + "*" + inner.name;
    out.dim = outer.dim;
    out.alphabet_size = outer.alphabet_size;
    out.letter_names = outer.letter_names;
    out.expansion.resize(out.dim);
    for (std::size_t c = 0; c < out.dim; ++c) out.expansion[c] = outer.expansion[c] * inner.expansion[c];

    const std::size_t vol_in = inner.block_volume();
    const std::size_t vol_out = outer.block_volume();
    out.blocks.assign(out.alphabet_size, std::vector<int>(out.block_volume(), 0));
    LatticePoint pos(out.dim);
    for (std::size_t j = 0; j < out.alphabet_size; ++j)
        for (std::size_t gi = 0; gi < vol_in; ++gi) {
            const LatticePoint g = unflatten(gi, inner.expansion);
            const int mid = inner.blocks[j][gi];
            for (std::size_t hi = 0; hi < vol_out; ++hi) {
                const LatticePoint h = unflatten(hi, outer.expansion);
                for (std::size_t c = 0; c < out.dim; ++c) pos[c] = outer.expansion[c] * g[c] + h[c];
                out.blocks[j][flat_index(pos, out.expansion)] = outer.blocks[static_cast<std::size_t>(mid - 1)][hi];
            }
        }
    return out;
}

bool is_positive_product(std::span<const BlockSubstitution> subs, const Word& word) {
    if (word.empty()) throw Error("is_positive_product: empty word");
    std::size_t n = 0;
    std::vector<char> acc;
    for (int w : word) {
        if (w < 1 || static_cast<std::size_t>(w) > subs.size()) throw Error("directive index out of range");
        const auto a = substitution_matrix(subs[static_cast<std::size_t>(w - 1)]);
        if (acc.empty()) {
            n = a.size();
            acc.resize(n * n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    acc[i * n + j] = a(static_cast<int>(i + 1), static_cast<int>(j + 1)) > 0;
            continue;
        }
        if (a.size() != n) throw Error("alphabet size mismatch in product");
        std::vector<char> next(n * n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                if (!acc[i * n + k]) continue;
                for (std::size_t j = 0; j < n; ++j)
                    if (a(static_cast<int>(k + 1), static_cast<int>(j + 1)) > 0) next[i * n + j] = 1;
            }
        acc = std::move(next);
    }
    return std::all_of(acc.begin(), acc.end(), [](char v) { return v != 0; });
}

Patch Patch::single(std::size_t dim, int letter) {
    Patch p;
    p.dim = dim;
    p.extent.assign(dim, 1);
    p.cells = {letter};
    return p;
}

Patch substitute(const Patch& patch, const BlockSubstitution& sub, std::size_t cell_cap) {
    if (patch.dim != sub.dim) throw Error("substitute: dimension mismatch");
    const std::size_t vol = sub.block_volume();
    if (patch.volume() > cell_cap / vol)
        throw ResourceCapError("patch would exceed the cell cap of " + std::to_string(cell_cap) + " cells");

    Patch out;
    out.dim = patch.dim;
    out.extent.resize(patch.dim);
    for (std::size_t c = 0; c < patch.dim; ++c) out.extent[c] = patch.extent[c] * sub.expansion[c];
    out.cells.assign(patch.volume() * vol, 0);

    // Precompute the flat displacement of each block cell inside the output box.
    std::vector<std::size_t> block_shift(vol);
    for (std::size_t h = 0; h < vol; ++h) block_shift[h] = flat_index(unflatten(h, sub.expansion), out.extent);

    LatticePoint scaled(patch.dim);
    for (std::size_t x = 0; x < patch.volume(); ++x) {
        const LatticePoint p = unflatten(x, patch.extent);
        for (std::size_t c = 0; c < patch.dim; ++c) scaled[c] = p[c] * sub.expansion[c];
        const std::size_t base = flat_index(scaled, out.extent);
        const int letter = patch.cells[x];
        if (letter < 1 || static_cast<std::size_t>(letter) > sub.alphabet_size)
            throw Error("patch letter outside the substitution alphabet");
        const auto& block = sub.blocks[static_cast<std::size_t>(letter - 1)];
        for (std::size_t h = 0; h < vol; ++h) out.cells[base + block_shift[h]] = block[h];
    }
    return out;
}

Patch supertile(std::span<const BlockSubstitution> subs, const Word& word, int seed_letter, std::size_t cell_cap) {
    if (subs.empty()) throw Error("supertile: no substitutions given");
    for (const auto& s : subs) require_valid(s);
    const std::size_t dim = subs.front().dim;
    if (seed_letter < 1 || static_cast<std::size_t>(seed_letter) > subs.front().alphabet_size)
        throw Error("seed letter out of range");
    for (int w : word)
        if (w < 1 || static_cast<std::size_t>(w) > subs.size()) throw Error("directive index out of range");

    Patch p = Patch::single(dim, seed_letter);
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        p = substitute(p, subs[static_cast<std::size_t>(*it - 1)], cell_cap);
    return p;
}

std::vector<int> symbols(const Patch& patch) { return patch.cells; }

std::vector<std::int64_t> letter_counts(const Patch& patch, std::size_t alphabet_size) {
    std::vector<std::int64_t> counts(alphabet_size, 0);
    for (int c : patch.cells) {
        if (c < 1 || static_cast<std::size_t>(c) > alphabet_size) throw Error("patch letter out of range");
        ++counts[static_cast<std::size_t>(c - 1)];
    }
    return counts;
}

}  // namespace sadic
