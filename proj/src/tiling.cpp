#include "sadic/tiling.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

#include "sadic/error.hpp"

namespace sadic {

namespace {

std::size_t infer_alphabet(const Patch& patch, std::size_t alphabet_size) {
    if (alphabet_size != 0) return alphabet_size;
    int hi = 0;
    for (int c : patch.cells) hi = std::max(hi, c);
    return static_cast<std::size_t>(hi);
}

std::vector<std::size_t> strides(std::span<const std::int64_t> extent) {
    std::vector<std::size_t> s(extent.size(), 1);
    for (std::size_t c = extent.size(); c-- > 1;) s[c - 1] = s[c] * static_cast<std::size_t>(extent[c]);
    return s;
}

}  // namespace

std::vector<double> letter_frequencies(const Patch& patch, std::size_t alphabet_size) {
    if (patch.cells.empty()) throw Error("letter_frequencies: empty patch");
    const std::size_t n = infer_alphabet(patch, alphabet_size);
    const auto counts = letter_counts(patch, n);
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = static_cast<double>(counts[i]) / static_cast<double>(patch.volume());
    return f;
}

PairCorrelationTable::PairCorrelationTable(std::size_t dim, std::int64_t radius, std::size_t alphabet_size,
                                           std::int64_t window_volume)
    : dim_(dim), radius_(radius), alphabet_size_(alphabet_size), window_volume_(window_volume), displacements_(1) {
    for (std::size_t c = 0; c < dim; ++c) displacements_ *= static_cast<std::size_t>(2 * radius + 1);
    counts_.assign(alphabet_size * alphabet_size * displacements_, 0);
}

std::vector<std::int64_t> PairCorrelationTable::displacement(std::size_t k) const {
    const std::vector<std::int64_t> shape(dim_, 2 * radius_ + 1);
    auto z = unflatten(k, shape);
    for (auto& v : z) v -= radius_;
    return z;
}

bool PairCorrelationTable::contains(std::span<const std::int64_t> z) const {
    if (z.size() != dim_) return false;
    return std::all_of(z.begin(), z.end(), [&](std::int64_t v) { return v >= -radius_ && v <= radius_; });
}

std::size_t PairCorrelationTable::displacement_index(std::span<const std::int64_t> z) const {
    if (!contains(z)) throw Error("displacement outside the correlation window");
    std::size_t k = 0;
    for (std::size_t c = 0; c < dim_; ++c) k = k * static_cast<std::size_t>(2 * radius_ + 1) + static_cast<std::size_t>(z[c] + radius_);
    return k;
}

std::size_t PairCorrelationTable::slot(int i, int j, std::size_t k) const {
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > alphabet_size_ || static_cast<std::size_t>(j) > alphabet_size_)
        throw Error("letter outside the correlation table alphabet");
    return ((static_cast<std::size_t>(i - 1) * alphabet_size_) + static_cast<std::size_t>(j - 1)) * displacements_ + k;
}

std::int64_t PairCorrelationTable::count(int i, int j, std::span<const std::int64_t> z) const {
    return counts_[slot(i, j, displacement_index(z))];
}

double PairCorrelationTable::frequency(int i, int j, std::span<const std::int64_t> z) const {
    return static_cast<double>(count(i, j, z)) / static_cast<double>(window_volume_);
}

std::int64_t& PairCorrelationTable::raw_count(int i, int j, std::size_t k) { return counts_[slot(i, j, k)]; }

PairCorrelationTable pair_correlations(const Patch& patch, std::int64_t radius, std::size_t alphabet_size) {
    if (radius < 0) throw Error("correlation radius must be nonnegative");
    const std::int64_t min_extent = *std::min_element(patch.extent.begin(), patch.extent.end());
    if (4 * radius >= min_extent)
        throw Error("R too large: radius " + std::to_string(radius) + " needs extent > " +
                    std::to_string(4 * radius) + " on every axis (smallest is " + std::to_string(min_extent) + ")");
    const std::size_t n = infer_alphabet(patch, alphabet_size);
    const std::size_t dim = patch.dim;

    std::vector<std::int64_t> window(dim);
    std::int64_t window_volume = 1;
    for (std::size_t c = 0; c < dim; ++c) {
        window[c] = patch.extent[c] - 2 * radius;
        window_volume *= window[c];
    }
    PairCorrelationTable table(dim, radius, n, window_volume);

    const auto stride = strides(patch.extent);
    // Flat indices of the eroded window.
    std::vector<std::size_t> refs;
    refs.reserve(static_cast<std::size_t>(window_volume));
    LatticePoint p(dim);
    for (std::size_t w = 0; w < static_cast<std::size_t>(window_volume); ++w) {
        const auto q = unflatten(w, window);
        for (std::size_t c = 0; c < dim; ++c) p[c] = q[c] + radius;
        refs.push_back(flat_index(p, patch.extent));
    }

    std::vector<std::int64_t> local(n * n);
    for (std::size_t k = 0; k < table.displacement_count(); ++k) {
        const auto z = table.displacement(k);
        std::ptrdiff_t shift = 0;
        for (std::size_t c = 0; c < dim; ++c) shift += static_cast<std::ptrdiff_t>(z[c]) * static_cast<std::ptrdiff_t>(stride[c]);
        std::fill(local.begin(), local.end(), 0);
        for (std::size_t x : refs) {
            const int i = patch.cells[x];
            const int j = patch.cells[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(x) + shift)];
            ++local[static_cast<std::size_t>(i - 1) * n + static_cast<std::size_t>(j - 1)];
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                table.raw_count(static_cast<int>(i + 1), static_cast<int>(j + 1), k) = local[i * n + j];
    }
    return table;
}

RenormalizationCheck renormalization_check(std::span<const BlockSubstitution> subs, const Word& word,
                                           int seed_letter, std::size_t level, std::int64_t radius,
                                           std::size_t cell_cap) {
    if (word.size() < level + 1) throw Error("renormalization check needs a word of length level + 1");
    const Word coarse_word(word.begin() + 1, word.begin() + static_cast<std::ptrdiff_t>(level) + 1);
    const auto& sub = subs[static_cast<std::size_t>(word.front() - 1)];
    const Patch coarse = supertile(subs, coarse_word, seed_letter, cell_cap);
    const Patch fine = substitute(coarse, sub, cell_cap);

    const std::size_t n = sub.alphabet_size;
    const std::size_t dim = sub.dim;
    std::int64_t coarse_radius = 0;
    for (std::size_t c = 0; c < dim; ++c) {
        const std::int64_t q = sub.expansion[c];
        coarse_radius = std::max(coarse_radius, (radius + q - 1) / q);
    }

    const auto fine_table = pair_correlations(fine, radius, n);
    const auto coarse_table = pair_correlations(coarse, coarse_radius, n);
    const auto digits = digit_sets(sub);
    const double inv_det = 1.0 / static_cast<double>(sub.block_volume());

    RenormalizationCheck out;
    out.coarse_radius = coarse_radius;
    out.fine_volume = fine.volume();
    out.coarse_volume = coarse.volume();

    LatticePoint target(dim);
    for (std::size_t k = 0; k < fine_table.displacement_count(); ++k) {
        const auto z = fine_table.displacement(k);
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 1; j <= n; ++j) {
                double rhs = 0.0;
                for (std::size_t m = 1; m <= n; ++m)
                    for (std::size_t nn = 1; nn <= n; ++nn)
                        for (const auto& x : digits.at(static_cast<int>(i), static_cast<int>(m)))
                            for (const auto& y : digits.at(static_cast<int>(j), static_cast<int>(nn))) {
                                bool integral = true;
                                for (std::size_t c = 0; c < dim && integral; ++c) {
                                    const std::int64_t v = z[c] + x[c] - y[c];
                                    if (v % sub.expansion[c] != 0) integral = false;
                                    target[c] = v / sub.expansion[c];
                                }
                                if (!integral) continue;
                                rhs += coarse_table.frequency(static_cast<int>(m), static_cast<int>(nn), target);
                            }
                rhs *= inv_det;
                const double lhs = fine_table.frequency(static_cast<int>(i), static_cast<int>(j), z);
                out.residual = std::max(out.residual, std::abs(lhs - rhs));
            }
    }
    return out;
}

double renormalization_residual(std::span<const BlockSubstitution> subs, const Word& word, int seed_letter,
                                std::size_t level, std::int64_t radius) {
    return renormalization_check(subs, word, seed_letter, level, radius).residual;
}

std::vector<double> DiffractionGrid::point(std::size_t k) const {
    if (dft_shape.empty()) return points.at(k);
    const auto m = unflatten(k, dft_shape);
    std::vector<double> t(dim);
    for (std::size_t c = 0; c < dim; ++c) t[c] = static_cast<double>(m[c]) / static_cast<double>(dft_shape[c]);
    return t;
}

namespace {

std::vector<std::complex<double>> cell_weights(const Patch& patch, const Weights& weights) {
    std::vector<std::complex<double>> w(patch.volume());
    for (std::size_t x = 0; x < patch.volume(); ++x) {
        const int l = patch.cells[x];
        if (l < 1 || static_cast<std::size_t>(l) > weights.size()) throw Error("no weight given for letter " + std::to_string(l));
        w[x] = weights[static_cast<std::size_t>(l - 1)];
    }
    return w;
}

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

DiffractionGrid diffraction_intensity(const Patch& patch, const Weights& weights,
                                      const std::vector<std::vector<double>>& t_grid, std::size_t wave_vector_cap) {
    if (patch.cells.empty()) throw Error("diffraction_intensity: empty patch");
    if (t_grid.size() > wave_vector_cap)
        throw ResourceCapError("wave vector grid of " + std::to_string(t_grid.size()) + " points exceeds the cap of " +
                               std::to_string(wave_vector_cap));
    const std::size_t dim = patch.dim;
    const auto w = cell_weights(patch, weights);

    DiffractionGrid out;
    out.dim = dim;
    out.window = patch.extent;
    out.weights = weights;
    out.points = t_grid;
    out.intensity.reserve(t_grid.size());

    std::vector<std::vector<std::complex<double>>> table(dim);
    for (const auto& t : t_grid) {
        if (t.size() != dim) throw Error("wave vector dimension mismatch");
        for (std::size_t c = 0; c < dim; ++c) {
            table[c].resize(static_cast<std::size_t>(patch.extent[c]));
            for (std::int64_t x = 0; x < patch.extent[c]; ++x) {
                double phase = t[c] * static_cast<double>(x);
                phase -= std::floor(phase);
                table[c][static_cast<std::size_t>(x)] = std::polar(1.0, -2.0 * std::numbers::pi * phase);
            }
        }
        std::complex<double> sum{0.0, 0.0};
        std::vector<std::int64_t> idx(dim, 0);
        for (std::size_t x = 0; x < patch.volume(); ++x) {
            std::complex<double> ph = table[0][static_cast<std::size_t>(idx[0])];
            for (std::size_t c = 1; c < dim; ++c) ph *= table[c][static_cast<std::size_t>(idx[c])];
            sum += w[x] * ph;
            for (std::size_t c = dim; c-- > 0;) {
                if (++idx[c] < patch.extent[c]) break;
                idx[c] = 0;
            }
        }
        out.intensity.push_back(std::norm(sum) / static_cast<double>(patch.volume()));
    }
    return out;
}

DiffractionGrid dft_intensity(const Patch& patch, const Weights& weights) {
    if (patch.cells.empty()) throw Error("dft_intensity: empty patch");
    const auto w = cell_weights(patch, weights);
    const std::size_t n = patch.volume();

    std::vector<int> dims;
    for (auto e : patch.extent) dims.push_back(static_cast<int>(e));

    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (!buf) throw ResourceCapError("cannot allocate FFT buffer");
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (std::size_t x = 0; x < n; ++x) {
        buf[x][0] = w[x].real();
        buf[x][1] = w[x].imag();
    }
    fftw_execute(plan);

    DiffractionGrid out;
    out.dim = patch.dim;
    out.window = patch.extent;
    out.weights = weights;
    out.dft_shape = patch.extent;
    out.intensity.resize(n);
    for (std::size_t m = 0; m < n; ++m)
        out.intensity[m] = (buf[m][0] * buf[m][0] + buf[m][1] * buf[m][1]) / static_cast<double>(n);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

void write_patch_rle(std::ostream& os, const Patch& patch) {
    os << "dim " << patch.dim << "\nextent";
    for (auto e : patch.extent) os << ' ' << e;
    os << "\nruns\n";
    std::size_t on_line = 0;
    for (std::size_t x = 0; x < patch.cells.size();) {
        std::size_t y = x;
        while (y < patch.cells.size() && patch.cells[y] == patch.cells[x]) ++y;
        os << patch.cells[x] << '*' << (y - x);
        if (++on_line == 16) {
            os << '\n';
            on_line = 0;
        } else if (y < patch.cells.size()) {
            os << ' ';
        }
        x = y;
    }
    if (on_line != 0) os << '\n';
}

Patch read_patch_rle(std::istream& is) {
    Patch p;
    std::string line;
    bool in_runs = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (!in_runs) {
            std::string key;
            ls >> key;
            if (key == "dim") {
                ls >> p.dim;
            } else if (key == "extent") {
                std::int64_t e;
                while (ls >> e) p.extent.push_back(e);
            } else if (key == "runs") {
                in_runs = true;
            } else {
                throw Error("unexpected line in patch file: " + line);
            }
            continue;
        }
        std::string tok;
        while (ls >> tok) {
            const auto star = tok.find('*');
            if (star == std::string::npos) throw Error("bad run token '" + tok + "'");
            const int letter = std::stoi(tok.substr(0, star));
            const auto count = std::stoull(tok.substr(star + 1));
            p.cells.insert(p.cells.end(), count, letter);
        }
    }
    std::size_t vol = 1;
    for (auto e : p.extent) vol *= static_cast<std::size_t>(e);
    if (p.extent.size() != p.dim || p.cells.size() != vol) throw Error("patch file is inconsistent with its extent");
    return p;
}

}  // namespace sadic
