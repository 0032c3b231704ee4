#include "cli_app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "sadic/directive.hpp"
#include "sadic/error.hpp"
#include "sadic/fourier.hpp"
#include "sadic/lyapunov.hpp"
#include "sadic/mahler.hpp"
#include "sadic/substitution_io.hpp"
#include "sadic/tiling.hpp"

namespace sadic::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Failure of the command line itself (unknown flag, bad value).
class UsageError : public Error {
public:
    using Error::Error;
};

/// Validation failure that carries the full issue list.
class InvalidSubstitution : public Error {
public:
    InvalidSubstitution(const std::string& what, std::vector<std::string> issues)
        : Error(what), issues(std::move(issues)) {}
    std::vector<std::string> issues;
};

struct Common {
    std::uint64_t seed = kDefaultSeed;
    unsigned threads = 0;
    std::string out;
};

json header(const std::string& command, const json& config) {
    return {{"artifact", "sadic"}, {"version", SADIC_VERSION}, {"command", command}, {"config", config}};
}

void write_comment_header(std::ostream& os, const std::string& command, const json& config) {
    os << "# sadic " << SADIC_VERSION << '\n';
    os << "# command: " << command << '\n';
    os << "# config: " << config.dump() << '\n';
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

/// Writes to the file if a path is given, otherwise to out.
template <class Body>
void emit(const std::string& path, std::ostream& out, Body body) {
    if (path.empty()) {
        body(out);
        return;
    }
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open output file '" + path + "'");
    body(f);
    if (!f) throw Error("failed writing '" + path + "'");
}

/// A path, or the name of a shipped substitution ("thue_morse").
BlockSubstitution resolve_substitution(const std::string& spec) {
    fs::path p(spec);
    if (!fs::exists(p)) {
        const fs::path shipped = fs::path(SADIC_DATA_DIR) / (spec + ".json");
        if (!fs::exists(shipped)) throw Error("no substitution file or shipped substitution named '" + spec + "'");
        p = shipped;
    }
    auto sub = load_substitution(p);
    const auto report = validate(sub);
    if (!report.ok()) throw InvalidSubstitution("invalid substitution '" + sub.name + "'", report.issues);
    return sub;
}

std::vector<BlockSubstitution> resolve_all(const std::vector<std::string>& specs) {
    if (specs.empty()) throw UsageError("--subs needs at least one substitution");
    std::vector<BlockSubstitution> subs;
    for (const auto& s : specs) subs.push_back(resolve_substitution(s));
    return subs;
}

std::vector<double> parse_reals(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("cannot parse number '" + item + "'");
        }
    }
    return v;
}

/// FNV-1a, used to name cache entries.
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// supertile(), memoized as RLE files under SADIC_CACHE_DIR when it is set.
Patch cached_supertile(const std::vector<BlockSubstitution>& subs, const Word& word, int seed_letter,
                       std::size_t cell_cap) {
    const char* dir = std::getenv("SADIC_CACHE_DIR");
    if (!dir || !*dir) return supertile(subs, word, seed_letter, cell_cap);

    std::string key;
    for (const auto& s : subs) key += substitution_to_json(s) + '\n';
    for (int w : word) key += std::to_string(w) + ',';
    key += '|' + std::to_string(seed_letter);
    std::ostringstream name;
    name << "supertile-" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(key) << ".rle";
    const fs::path path = fs::path(dir) / name.str();

    if (fs::exists(path)) {
        std::ifstream f(path);
        auto p = read_patch_rle(f);
        if (p.volume() > cell_cap) throw ResourceCapError("cached patch exceeds the cell cap");
        return p;
    }
    auto p = supertile(subs, word, seed_letter, cell_cap);
    fs::create_directories(dir);
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        write_patch_rle(f, p);
    }
    fs::rename(tmp, path);
    return p;
}

json substitution_summary(const BlockSubstitution& sub) {
    const auto a = substitution_matrix(sub);
    json m = json::array();
    for (std::size_t k = 1; k <= a.size(); ++k) {
        json row = json::array();
        for (std::size_t j = 1; j <= a.size(); ++j) row.push_back(a(static_cast<int>(k), static_cast<int>(j)));
        m.push_back(row);
    }
    json s = {{"name", sub.name},
              {"dim", sub.dim},
              {"alphabet_size", sub.alphabet_size},
              {"expansion", sub.expansion},
              {"matrix", m}};
    if (sub.alphabet_size == 2) {
        const auto q = q_polynomials(sub);
        s["q_difference"] = q.difference().to_string();
        s["q_difference_zero"] = q.difference().is_zero();
    }
    return s;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// --- subcommands -----------------------------------------------------------

struct ValidateArgs {
    std::vector<std::string> subs;
};

int cmd_validate(const ValidateArgs& a, const Common& c, std::ostream& out) {
    json config = {{"subs", a.subs}};
    json result = {{"_header", header("validate", config)}, {"valid", true}, {"substitutions", json::array()}};
    for (const auto& s : a.subs) result["substitutions"].push_back(substitution_summary(resolve_substitution(s)));
    emit(c.out, out, [&](std::ostream& os) { os << result.dump(2) << '\n'; });
    return 0;
}

struct FourierArgs {
    std::string sub;
    std::vector<std::string> points;
    std::int64_t grid = 0;
};

int cmd_fourier(const FourierArgs& a, const Common& c, std::ostream& out) {
    const auto sub = resolve_substitution(a.sub);
    std::vector<std::vector<double>> ts;
    for (const auto& p : a.points) {
        ts.push_back(parse_reals(p));
        if (ts.back().size() != sub.dim) throw UsageError("--t '" + p + "' does not have " + std::to_string(sub.dim) + " coordinates");
    }
    if (a.grid > 0) {
        std::vector<std::int64_t> shape(sub.dim, a.grid);
        std::size_t total = 1;
        for (std::size_t k = 0; k < sub.dim; ++k) {
            total *= static_cast<std::size_t>(a.grid);
            if (total > kDefaultWaveVectorCap) throw ResourceCapError("fourier-eval grid exceeds the wave vector cap");
        }
        for (std::size_t k = 0; k < total; ++k) {
            const auto m = unflatten(k, shape);
            std::vector<double> t(sub.dim);
            for (std::size_t d = 0; d < sub.dim; ++d) t[d] = static_cast<double>(m[d]) / static_cast<double>(a.grid);
            ts.push_back(t);
        }
    }
    if (ts.empty()) throw UsageError("give wave vectors with --t or --grid");

    const json config = {{"sub", a.sub}, {"t", a.points}, {"grid", a.grid}};
    const FourierFamily family(sub);
    const std::size_t n = sub.alphabet_size;
    emit(c.out, out, [&](std::ostream& os) {
        write_comment_header(os, "fourier-eval", config);
        for (std::size_t d = 1; d <= sub.dim; ++d) os << 't' << d << ',';
        for (std::size_t k = 1; k <= n; ++k)
            for (std::size_t j = 1; j <= n; ++j) {
                os << "re_" << k << '_' << j << ",im_" << k << '_' << j;
                if (k != n || j != n) os << ',';
            }
        os << '\n';
        for (const auto& t : ts) {
            const auto b = family.evaluate(t);
            for (double v : t) os << fmt(v) << ',';
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t j = 0; j < n; ++j) {
                    const auto z = b(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
                    os << fmt(z.real()) << ',' << fmt(z.imag());
                    if (k + 1 != n || j + 1 != n) os << ',';
                }
            os << '\n';
        }
    });
    return 0;
}

struct MahlerArgs {
    std::string poly;
    std::string method = "auto";
    std::int64_t grid = 512;
};

LaurentPolynomial resolve_polynomial(const std::string& spec) {
    const std::string prefix = "substitution:";
    if (spec.rfind(prefix, 0) == 0) return q_polynomials(resolve_substitution(spec.substr(prefix.size()))).difference();
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json" && fs::exists(spec))
        return q_polynomials(resolve_substitution(spec)).difference();
    return parse_polynomial(spec);
}

int cmd_mahler(const MahlerArgs& a, const Common& c, std::ostream& out) {
    const auto p = resolve_polynomial(a.poly);
    MahlerEstimate e;
    if (a.method == "jensen")
        e = mahler_jensen_1d(p);
    else if (a.method == "quad")
        e = mahler_quadrature(p, a.grid, c.seed);
    else
        e = mahler_measure(p, a.grid, c.seed);

    const json config = {{"poly", a.poly}, {"method", a.method}, {"grid", a.grid}, {"seed", c.seed}};
    emit(c.out, out, [&](std::ostream& os) {
        write_comment_header(os, "mahler", config);
        os << "polynomial,value,stderr,method,samples,excluded_cells\n";
        os << '"' << p.to_string() << "\"," << fmt(e.value) << ',' << fmt(e.standard_error) << ',' << to_string(e.method)
           << ',' << e.samples << ',' << e.excluded_cells << '\n';
    });
    return 0;
}

struct CocycleArgs {
    std::vector<std::string> subs;
    std::string directive = "bernoulli:0.5,0.5";
    std::int64_t steps = 10000;
    std::size_t t_samples = 100;
    std::int64_t mahler_grid = 512;
    bool inverse = false;
};

json cocycle_config(const CocycleArgs& a, const Common& c) {
    return {{"subs", a.subs},           {"directive", a.directive}, {"steps", a.steps},
            {"t_samples", a.t_samples}, {"seed", c.seed},           {"mahler_grid", a.mahler_grid}};
}

int cmd_lyapunov(const CocycleArgs& a, const Common& c, std::ostream& out) {
    const auto subs = resolve_all(a.subs);
    const auto src = parse_directive(a.directive, c.seed);
    const TSampler sampler{c.seed, a.t_samples};
    const RunOptions opts{c.threads, a.mahler_grid};
    const auto b = estimate_chi_plus_B(subs, src, sampler, a.steps, opts);
    std::optional<CPairEstimate> pair;
    if (a.inverse) pair = estimate_chi_pair_C(subs, src, sampler, a.steps, opts);

    auto config = cocycle_config(a, c);
    config["inverse"] = a.inverse;
    const std::size_t dim = subs.front().dim;
    emit(c.out, out, [&](std::ostream& os) {
        write_comment_header(os, "lyapunov", config);
        os << "quantity,sample,";
        for (std::size_t d = 1; d <= dim; ++d) os << 't' << d << ',';
        os << "value,stderr,closed_form\n";
        const std::string blanks(dim, ',');
        for (std::size_t s = 0; s < b.per_sample.size(); ++s) {
            os << "chi_plus_B," << s << ',';
            for (double v : b.sample_points[s]) os << fmt(v) << ',';
            os << fmt(b.per_sample[s]) << ",,\n";
        }
        auto summary = [&](const std::string& name, const ExponentEstimate& e) {
            os << name << ",summary," << blanks << fmt(e.chi) << ',' << fmt(e.stderr_) << ','
               << (e.closed_form ? fmt(*e.closed_form) : std::string()) << '\n';
        };
        summary("chi_plus_B", b);
        if (pair) {
            summary("chi_plus_C", pair->chi_plus);
            summary("chi_minus_C", pair->chi_minus);
            summary("vector_rate_C", pair->vector_rate);
            summary("log_det_rate_C", pair->log_det_rate);
        }
    });
    return 0;
}

int cmd_criterion(const CocycleArgs& a, const Common& c, std::ostream& out) {
    const auto subs = resolve_all(a.subs);
    const auto src = parse_directive(a.directive, c.seed);
    const auto r = criterion_margin(subs, src, {c.seed, a.t_samples}, a.steps, {c.threads, a.mahler_grid});
    const json report = {{"_header", header("criterion", cocycle_config(a, c))},
                         {"volume_rate", r.volume_rate},
                         {"volume_rate_closed", optional_json(r.volume_rate_closed)},
                         {"growth_rate", r.growth_rate},
                         {"growth_stderr", r.growth_stderr},
                         {"growth_closed", optional_json(r.growth_closed)},
                         {"margin", r.margin},
                         {"margin_stderr", r.margin_stderr},
                         {"liminf_margin", r.liminf_margin},
                         {"positive_fraction", r.positive_fraction},
                         {"t_samples", r.t_samples},
                         {"excluded_samples", r.excluded_samples},
                         {"steps", r.steps},
                         {"verdict", to_string(r.verdict)},
                         {"note", r.note},
                         {"per_t_margins", r.per_t_margins},
                         {"per_t_liminf_margins", r.per_t_liminf_margins},
                         {"sample_points", r.sample_points}};
    emit(c.out, out, [&](std::ostream& os) { os << report.dump(2) << '\n'; });
    return 0;
}

struct SimulateArgs {
    std::vector<std::string> subs;
    std::string directive = "constant:1";
    std::size_t level = 10;
    int seed_letter = 1;
    std::string weights = "1,-1";
    std::int64_t radius = 4;
    std::size_t max_cells = kDefaultCellCap;
};

Weights parse_weights(const std::string& text) {
    Weights w;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            w.emplace_back(parse_reals(item).at(0), 0.0);
        } else {
            w.emplace_back(parse_reals(item.substr(0, colon)).at(0), parse_reals(item.substr(colon + 1)).at(0));
        }
    }
    return w;
}

int cmd_simulate(const SimulateArgs& a, const Common& c, std::ostream& out) {
    if (c.out.empty()) throw UsageError("simulate needs --out <prefix>");
    const auto subs = resolve_all(a.subs);
    const auto weights = parse_weights(a.weights);
    if (weights.size() < subs.front().alphabet_size) throw UsageError("--weights needs one entry per letter");
    const auto word = take_word(parse_directive(a.directive, c.seed), a.level);
    for (int w : word)
        if (static_cast<std::size_t>(w) > subs.size()) throw Error("directive symbol " + std::to_string(w) + " has no substitution");

    const Patch patch = cached_supertile(subs, word, a.seed_letter, a.max_cells);
    const auto corr = pair_correlations(patch, a.radius, subs.front().alphabet_size);
    const auto diff = dft_intensity(patch, weights);

    json config = {{"subs", a.subs},   {"directive", a.directive}, {"level", a.level},
                   {"seed", c.seed},   {"seed_letter", a.seed_letter}, {"weights", a.weights},
                   {"radius", a.radius}, {"max_cells", a.max_cells},  {"word", word}};
    const std::size_t dim = patch.dim;
    const std::string prefix = c.out;

    emit(prefix + ".patch.rle", out, [&](std::ostream& os) {
        write_comment_header(os, "simulate", config);
        write_patch_rle(os, patch);
    });
    emit(prefix + ".correlations.csv", out, [&](std::ostream& os) {
        write_comment_header(os, "simulate", config);
        os << "i,j,";
        for (std::size_t d = 1; d <= dim; ++d) os << 'z' << d << ',';
        os << "count,freq\n";
        const int n = static_cast<int>(corr.alphabet_size());
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                for (std::size_t k = 0; k < corr.displacement_count(); ++k) {
                    const auto z = corr.displacement(k);
                    os << i << ',' << j << ',';
                    for (auto v : z) os << v << ',';
                    os << corr.count(i, j, z) << ',' << fmt(corr.frequency(i, j, z)) << '\n';
                }
    });
    emit(prefix + ".diffraction.csv", out, [&](std::ostream& os) {
        write_comment_header(os, "simulate", config);
        for (std::size_t d = 1; d <= dim; ++d) os << 't' << d << ',';
        os << "intensity\n";
        for (std::size_t k = 0; k < diff.size(); ++k) {
            for (double v : diff.point(k)) os << fmt(v) << ',';
            os << fmt(diff.intensity[k]) << '\n';
        }
    });
    emit(prefix + ".plot.gp", out, [&](std::ostream& os) {
        os << "# sadic " << SADIC_VERSION << "\n# command: simulate\n# config: " << config.dump() << '\n';
        const std::string data = fs::path(prefix + ".diffraction.csv").filename().string();
        os << "set datafile separator ','\nset datafile commentschars '#'\n";
        os << "set terminal pngcairo size 1000,700\nset output '" << fs::path(prefix).filename().string()
           << ".diffraction.png'\n";
        if (dim == 1) {
            os << "set xlabel 't'\nset ylabel 'I(t)'\nset logscale y\n";
            os << "plot '" << data << "' using 1:2 every ::1 with impulses notitle\n";
        } else {
            os << "set xlabel 't1'\nset ylabel 't2'\nset view map\nset palette grey negative\n";
            os << "splot '" << data << "' using 1:2:(log(1e-12 + $3)) every ::1 with points pt 5 ps 0.3 palette notitle\n";
        }
    });
    json done = {{"_header", header("simulate", config)},
                 {"files",
                  {prefix + ".patch.rle", prefix + ".correlations.csv", prefix + ".diffraction.csv", prefix + ".plot.gp"}},
                 {"extent", patch.extent},
                 {"frequencies", letter_frequencies(patch, subs.front().alphabet_size)}};
    out << done.dump(2) << '\n';
    return 0;
}

void write_error(std::ostream& out, const std::string& kind, const std::string& message,
                 const std::vector<std::string>& issues = {}) {
    json e = {{"error", {{"kind", kind}, {"message", message}}}};
    if (!issues.empty()) e["error"]["issues"] = issues;
    out << e.dump(2) << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"S-adic block substitution toolkit", "sadic"};
    app.set_version_flag("--version", std::string(SADIC_VERSION));
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool out_is_prefix = false) {
        sub->add_option("--seed", common.seed, "RNG seed")->capture_default_str();
        sub->add_option("--threads", common.threads, "worker threads (0: all cores)")->capture_default_str();
        sub->add_option("--out", common.out, out_is_prefix ? "output prefix" : "output file (default stdout)");
    };

    ValidateArgs va;
    auto* validate_cmd = app.add_subcommand("validate", "check substitution files");
    validate_cmd->add_option("subs", va.subs, "substitution files or shipped names")->required();
    add_common(validate_cmd);

    FourierArgs fa;
    auto* fourier_cmd = app.add_subcommand("fourier-eval", "evaluate the Fourier matrix B(t)");
    fourier_cmd->add_option("--sub", fa.sub, "substitution file or shipped name")->required();
    fourier_cmd->add_option("--t", fa.points, "wave vector t1,..,td (repeatable)");
    fourier_cmd->add_option("--grid", fa.grid, "uniform grid m/N per axis");
    add_common(fourier_cmd);

    MahlerArgs ma;
    auto* mahler_cmd = app.add_subcommand("mahler", "logarithmic Mahler measure");
    mahler_cmd->add_option("--poly", ma.poly, "polynomial, substitution:<name> or a substitution file")->required();
    mahler_cmd->add_option("--method", ma.method)->check(CLI::IsMember({"auto", "jensen", "quad"}))->capture_default_str();
    mahler_cmd->add_option("--grid", ma.grid, "quadrature points per axis")->capture_default_str();
    add_common(mahler_cmd);

    CocycleArgs la;
    auto add_cocycle = [&](CLI::App* sub) {
        sub->add_option("--subs", la.subs, "substitutions indexed by directive symbol")->delimiter(',')->required();
        sub->add_option("--directive", la.directive)->capture_default_str();
        sub->add_option("--steps", la.steps)->capture_default_str();
        sub->add_option("--t-samples", la.t_samples)->capture_default_str();
        sub->add_option("--mahler-grid", la.mahler_grid)->capture_default_str();
        add_common(sub);
    };
    auto* lyapunov_cmd = app.add_subcommand("lyapunov", "Lyapunov exponents per t sample");
    add_cocycle(lyapunov_cmd);
    lyapunov_cmd->add_flag("--inverse", la.inverse, "also estimate exponents of the inverse C cocycle");
    auto* criterion_cmd = app.add_subcommand("criterion", "margin of the singularity criterion");
    add_cocycle(criterion_cmd);

    SimulateArgs sa;
    auto* simulate_cmd = app.add_subcommand("simulate", "supertile patch, correlations and diffraction");
    simulate_cmd->add_option("--subs", sa.subs)->delimiter(',')->required();
    simulate_cmd->add_option("--directive", sa.directive)->capture_default_str();
    simulate_cmd->add_option("--level", sa.level)->capture_default_str();
    simulate_cmd->add_option("--seed-letter", sa.seed_letter)->capture_default_str();
    simulate_cmd->add_option("--weights", sa.weights, "w1,w2,.. (re or re:im)")->capture_default_str();
    simulate_cmd->add_option("--radius", sa.radius, "pair correlation radius")->capture_default_str();
    simulate_cmd->add_option("--max-cells", sa.max_cells)->capture_default_str();
    add_common(simulate_cmd, true);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        write_error(out, "usage", e.what());
        return 1;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(va, common, out);
        if (fourier_cmd->parsed()) return cmd_fourier(fa, common, out);
        if (mahler_cmd->parsed()) return cmd_mahler(ma, common, out);
        if (lyapunov_cmd->parsed()) return cmd_lyapunov(la, common, out);
        if (criterion_cmd->parsed()) return cmd_criterion(la, common, out);
        if (simulate_cmd->parsed()) return cmd_simulate(sa, common, out);
    } catch (const ResourceCapError& e) {
        write_error(out, "resource_cap", e.what());
        return 2;
    } catch (const InvalidSubstitution& e) {
        write_error(out, "validation", e.what(), e.issues);
        return 1;
    } catch (const UsageError& e) {
        write_error(out, "usage", e.what());
        return 1;
    } catch (const NumericalError& e) {
        write_error(out, "numerical", e.what());
        return 1;
    } catch (const std::exception& e) {
        write_error(out, "validation", e.what());
        return 1;
    }
    return 1;
}

}  // namespace sadic::cli
