#include "sadic/directive.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "sadic/error.hpp"

namespace sadic {

std::string to_string(DirectiveKind k) {
    switch (k) {
        case DirectiveKind::constant: return "constant";
        case DirectiveKind::periodic_word: return "periodic_word";
        case DirectiveKind::bernoulli: return "bernoulli";
        case DirectiveKind::markov: return "markov";
        case DirectiveKind::rotation_coding: return "rotation_coding";
    }
    return "unknown";
}

namespace {

constexpr double kProbabilityTolerance = 1e-12;

void check_probability_vector(const std::vector<double>& p, const std::string& what) {
    if (p.empty()) throw Error(what + " is empty");
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error(what + " has a negative or non-finite entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) throw Error(what + " does not sum to 1");
}

std::vector<double> cumulative(const std::vector<double>& p) {
    std::vector<double> c(p.size());
    std::partial_sum(p.begin(), p.end(), c.begin());
    c.back() = 1.0;
    return c;
}

std::string join(const std::vector<double>& v, char sep = ',') {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? std::string(1, sep) : "") << v[i];
    return os.str();
}

}  // namespace

DirectiveSource::DirectiveSource(DirectiveKind kind, std::uint64_t seed) : kind_(kind), seed_(seed), rng_(seed) {}

DirectiveSource DirectiveSource::constant(int symbol) {
    if (symbol < 1) throw Error("directive symbols are 1-based");
    DirectiveSource s(DirectiveKind::constant, 0);
    s.word_ = {symbol};
    s.symbol_count_ = static_cast<std::size_t>(symbol);
    return s;
}

DirectiveSource DirectiveSource::periodic(Word word) {
    if (word.empty()) throw Error("periodic directive word is empty");
    for (int w : word)
        if (w < 1) throw Error("directive symbols are 1-based");
    DirectiveSource s(DirectiveKind::periodic_word, 0);
    s.symbol_count_ = static_cast<std::size_t>(*std::max_element(word.begin(), word.end()));
    s.word_ = std::move(word);
    return s;
}

DirectiveSource DirectiveSource::bernoulli(std::vector<double> probabilities, std::uint64_t seed) {
    check_probability_vector(probabilities, "bernoulli probability vector");
    DirectiveSource s(DirectiveKind::bernoulli, seed);
    s.symbol_count_ = probabilities.size();
    s.cdf_ = cumulative(probabilities);
    s.probabilities_ = std::move(probabilities);
    return s;
}

DirectiveSource DirectiveSource::markov(std::vector<std::vector<double>> transition, std::vector<double> initial,
                                        std::uint64_t seed) {
    check_probability_vector(initial, "markov initial distribution");
    if (transition.size() != initial.size()) throw Error("markov matrix size does not match initial distribution");
    DirectiveSource s(DirectiveKind::markov, seed);
    for (const auto& row : transition) {
        if (row.size() != initial.size()) throw Error("markov matrix is not square");
        check_probability_vector(row, "markov matrix row");
        s.transition_cdf_.push_back(cumulative(row));
    }
    s.symbol_count_ = initial.size();
    s.initial_cdf_ = cumulative(initial);
    s.transition_ = std::move(transition);
    s.initial_ = std::move(initial);
    return s;
}

DirectiveSource DirectiveSource::rotation(double alpha, std::vector<double> cuts, double x0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("rotation angle must lie in (0, 1)");
    if (!(x0 >= 0.0 && x0 < 1.0)) throw Error("rotation start must lie in [0, 1)");
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        if (!(cuts[i] > 0.0 && cuts[i] < 1.0)) throw Error("rotation cuts must lie in (0, 1)");
        if (i > 0 && !(cuts[i] > cuts[i - 1])) throw Error("rotation cuts must be strictly increasing");
    }
    DirectiveSource s(DirectiveKind::rotation_coding, 0);
    s.alpha_ = alpha;
    s.x0_ = x0;
    s.x_ = x0;
    s.symbol_count_ = cuts.size() + 1;
    s.cuts_ = std::move(cuts);
    return s;
}

int DirectiveSource::draw(const std::vector<double>& cdf) {
    const double u = rng_.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), static_cast<std::ptrdiff_t>(cdf.size()) - 1)) + 1;
}

int DirectiveSource::next_symbol() {
    int symbol = 0;
    switch (kind_) {
        case DirectiveKind::constant:
        case DirectiveKind::periodic_word:
            symbol = word_[static_cast<std::size_t>(step_) % word_.size()];
            break;
        case DirectiveKind::bernoulli:
            symbol = draw(cdf_);
            break;
        case DirectiveKind::markov:
            symbol = step_ == 0 ? draw(initial_cdf_) : draw(transition_cdf_[static_cast<std::size_t>(last_ - 1)]);
            last_ = symbol;
            break;
        case DirectiveKind::rotation_coding: {
            symbol = static_cast<int>(std::upper_bound(cuts_.begin(), cuts_.end(), x_) - cuts_.begin()) + 1;
            // Kahan-compensated x <- x + alpha (mod 1).
            const double y = alpha_ - compensation_;
            double t = x_ + y;
            compensation_ = (t - x_) - y;
            if (t >= 1.0) t -= 1.0;
            x_ = t;
            break;
        }
    }
    ++step_;
    return symbol;
}

std::vector<double> DirectiveSource::symbol_measure() const {
    std::vector<double> mu(symbol_count_, 0.0);
    switch (kind_) {
        case DirectiveKind::constant:
        case DirectiveKind::periodic_word:
            for (int w : word_) mu[static_cast<std::size_t>(w - 1)] += 1.0 / static_cast<double>(word_.size());
            break;
        case DirectiveKind::bernoulli:
            mu = probabilities_;
            break;
        case DirectiveKind::markov: {
            // Stationary pi with pi P = pi and sum pi = 1, via least squares.
            const auto n = static_cast<Eigen::Index>(symbol_count_);
            Eigen::MatrixXd a(n + 1, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    a(j, i) = transition_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - (i == j ? 1.0 : 0.0);
            a.row(n).setOnes();
            Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
            b(n) = 1.0;
            const Eigen::VectorXd pi = a.colPivHouseholderQr().solve(b);
            for (Eigen::Index i = 0; i < n; ++i) mu[static_cast<std::size_t>(i)] = pi(i);
            break;
        }
        case DirectiveKind::rotation_coding: {
            double prev = 0.0;
            for (std::size_t i = 0; i < cuts_.size(); ++i) {
                mu[i] = cuts_[i] - prev;
                prev = cuts_[i];
            }
            mu.back() = 1.0 - prev;
            break;
        }
    }
    return mu;
}

DirectiveSource DirectiveSource::replica(std::uint64_t stream) const {
    DirectiveSource copy = *this;
    if (kind_ == DirectiveKind::bernoulli || kind_ == DirectiveKind::markov) copy.seed_ = derive_seed(seed_, stream);
    copy.reset();
    return copy;
}

void DirectiveSource::reset() {
    rng_ = Xoshiro256(seed_);
    step_ = 0;
    last_ = 0;
    x_ = x0_;
    compensation_ = 0.0;
}

std::string DirectiveSource::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case DirectiveKind::constant: os << "constant:" << word_.front(); break;
        case DirectiveKind::periodic_word:
            os << "word:";
            for (std::size_t i = 0; i < word_.size(); ++i) os << (i ? "," : "") << word_[i];
            break;
        case DirectiveKind::bernoulli: os << "bernoulli:" << join(probabilities_); break;
        case DirectiveKind::markov: {
            os << "markov:rows=";
            for (std::size_t i = 0; i < transition_.size(); ++i) os << (i ? "/" : "") << join(transition_[i]);
            os << ";init=" << join(initial_);
            break;
        }
        case DirectiveKind::rotation_coding:
            os << "rotation:alpha=" << alpha_;
            for (double c : cuts_) os << ",cut=" << c;
            if (x0_ != 0.0) os << ",x0=" << x0_;
            break;
    }
    return os.str();
}

namespace {

std::vector<double> parse_numbers(const std::string& s, char sep = ',') {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error("cannot parse number '" + item + "' in directive");
        }
    }
    return out;
}

}  // namespace

DirectiveSource parse_directive(const std::string& spec, std::uint64_t seed) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw Error("directive must look like kind:parameters, got '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string body = spec.substr(colon + 1);

    if (kind == "constant") {
        const auto v = parse_numbers(body);
        if (v.size() != 1) throw Error("constant directive takes one symbol");
        return DirectiveSource::constant(static_cast<int>(v[0]));
    }
    if (kind == "word" || kind == "periodic") {
        Word w;
        if (body.find(',') != std::string::npos) {
            for (double v : parse_numbers(body)) w.push_back(static_cast<int>(v));
        } else {
            for (char c : body) {
                if (c < '1' || c > '9') throw Error("word directive symbols must be digits 1-9");
                w.push_back(c - '0');
            }
        }
        return DirectiveSource::periodic(std::move(w));
    }
    if (kind == "bernoulli") return DirectiveSource::bernoulli(parse_numbers(body), seed);
    if (kind == "markov") {
        std::vector<std::vector<double>> rows;
        std::vector<double> init;
        std::stringstream ss(body);
        std::string part;
        while (std::getline(ss, part, ';')) {
            if (part.rfind("rows=", 0) == 0) {
                std::stringstream rs(part.substr(5));
                std::string row;
                while (std::getline(rs, row, '/')) rows.push_back(parse_numbers(row));
            } else if (part.rfind("init=", 0) == 0) {
                init = parse_numbers(part.substr(5));
            } else {
                throw Error("unknown markov directive field '" + part + "'");
            }
        }
        if (init.empty() && !rows.empty()) init.assign(rows.size(), 1.0 / static_cast<double>(rows.size()));
        return DirectiveSource::markov(std::move(rows), std::move(init), seed);
    }
    if (kind == "rotation") {
        double alpha = -1.0, x0 = 0.0;
        std::vector<double> cuts;
        std::stringstream ss(body);
        std::string field;
        while (std::getline(ss, field, ',')) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) throw Error("rotation fields look like key=value, got '" + field + "'");
            const std::string key = field.substr(0, eq);
            const double value = parse_numbers(field.substr(eq + 1)).at(0);
            if (key == "alpha") alpha = value;
            else if (key == "cut") cuts.push_back(value);
            else if (key == "x0") x0 = value;
            else throw Error("unknown rotation field '" + key + "'");
        }
        return DirectiveSource::rotation(alpha, std::move(cuts), x0);
    }
    throw Error("unknown directive kind '" + kind + "'");
}

Word take_word(DirectiveSource src, std::size_t n) {
    Word w(n);
    for (auto& s : w) s = src.next_symbol();
    return w;
}

SkewOrbitState SkewOrbitState::at(const std::vector<double>& t) {
    SkewOrbitState s;
    s.fixed.resize(t.size());
    for (std::size_t c = 0; c < t.size(); ++c) {
        const double frac = t[c] - std::floor(t[c]);
        s.fixed[c] = static_cast<std::uint64_t>(std::ldexp(frac, 64));
    }
    return s;
}

std::vector<double> SkewOrbitState::torus_point() const {
    std::vector<double> t(fixed.size());
    for (std::size_t c = 0; c < fixed.size(); ++c) t[c] = static_cast<double>(fixed[c] >> 11) * 0x1.0p-53;
    return t;
}

bool SkewOrbitState::is_origin() const {
    return std::all_of(fixed.begin(), fixed.end(), [](std::uint64_t v) { return v == 0; });
}

SkewOrbitState skew_step(const SkewOrbitState& state, const BlockSubstitution& sub) {
    if (state.dim() != sub.dim) throw Error("skew_step: dimension mismatch");
    SkewOrbitState next = state;
    for (std::size_t c = 0; c < state.dim(); ++c) next.fixed[c] = static_cast<std::uint64_t>(sub.expansion[c]) * state.fixed[c];
    ++next.step;
    return next;
}

SkewOrbitState skew_step(const SkewOrbitState& state, const BlockSubstitution& sub, Xoshiro256& rng) {
    if (state.dim() != sub.dim) throw Error("skew_step: dimension mismatch");
    SkewOrbitState next = state;
    for (std::size_t c = 0; c < state.dim(); ++c) {
        const auto q = static_cast<std::uint64_t>(sub.expansion[c]);
        next.fixed[c] = q * state.fixed[c] + rng.below(q);
    }
    ++next.step;
    return next;
}

SkewOrbitState random_orbit_start(std::size_t dim, Xoshiro256& rng) {
    SkewOrbitState s;
    s.fixed.resize(dim);
    for (auto& f : s.fixed) f = rng.next();
    return s;
}

RationalTorusPoint skew_step_exact(const RationalTorusPoint& p, const BlockSubstitution& sub) {
    if (p.num.size() != sub.dim || p.den.size() != sub.dim) throw Error("skew_step_exact: dimension mismatch");
    RationalTorusPoint out = p;
    for (std::size_t c = 0; c < sub.dim; ++c) {
        if (p.den[c] <= 0) throw Error("rational torus point needs positive denominators");
        out.num[c] = (sub.expansion[c] * p.num[c]) % p.den[c];
        if (out.num[c] < 0) out.num[c] += p.den[c];
    }
    return out;
}

}  // namespace sadic
