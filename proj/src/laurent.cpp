#include "sadic/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sadic/error.hpp"

namespace sadic {

LaurentPolynomial::LaurentPolynomial(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw Error("polynomial dimension must be positive");
}

LaurentPolynomial LaurentPolynomial::constant(std::size_t dim, std::int64_t c) {
    LaurentPolynomial p(dim);
    p.add_term(Exponent(dim, 0), c);
    return p;
}

LaurentPolynomial LaurentPolynomial::monomial(const Exponent& f, std::int64_t c) {
    LaurentPolynomial p(f.size());
    p.add_term(f, c);
    return p;
}

void LaurentPolynomial::add_term(const Exponent& f, std::int64_t c) {
    if (f.size() != dim_) throw Error("exponent dimension mismatch");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(f, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

std::int64_t LaurentPolynomial::coefficient(const Exponent& f) const {
    auto it = terms_.find(f);
    return it == terms_.end() ? 0 : it->second;
}

std::complex<double> LaurentPolynomial::evaluate(std::span<const double> t) const {
    if (t.size() != dim_) throw Error("evaluation point dimension mismatch");
    std::complex<double> sum{0.0, 0.0};
    for (const auto& [f, c] : terms_) {
        double phase = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) phase += static_cast<double>(f[k]) * t[k];
        phase -= std::floor(phase);
        sum += static_cast<double>(c) * std::polar(1.0, 2.0 * std::numbers::pi * phase);
    }
    return sum;
}

std::complex<double> LaurentPolynomial::evaluate_at(std::span<const std::complex<double>> z) const {
    if (z.size() != dim_) throw Error("evaluation point dimension mismatch");
    std::complex<double> sum{0.0, 0.0};
    for (const auto& [f, c] : terms_) {
        std::complex<double> m{1.0, 0.0};
        for (std::size_t k = 0; k < dim_; ++k) m *= std::pow(z[k], static_cast<double>(f[k]));
        sum += static_cast<double>(c) * m;
    }
    return sum;
}

Exponent LaurentPolynomial::min_exponent() const {
    if (terms_.empty()) return Exponent(dim_, 0);
    Exponent lo = terms_.begin()->first;
    for (const auto& [f, c] : terms_)
        for (std::size_t k = 0; k < dim_; ++k) lo[k] = std::min(lo[k], f[k]);
    return lo;
}

LaurentPolynomial LaurentPolynomial::shifted(const Exponent& f) const {
    if (f.size() != dim_) throw Error("exponent dimension mismatch");
    LaurentPolynomial out(dim_);
    for (const auto& [g, c] : terms_) {
        Exponent h = g;
        for (std::size_t k = 0; k < dim_; ++k) h[k] += f[k];
        out.terms_.emplace(std::move(h), c);
    }
    return out;
}

std::vector<std::int64_t> LaurentPolynomial::dense_coefficients_1d() const {
    if (dim_ != 1) throw Error("dense coefficients require a univariate polynomial");
    if (terms_.empty()) return {};
    const std::int64_t lo = terms_.begin()->first[0];
    const std::int64_t hi = terms_.rbegin()->first[0];
    std::vector<std::int64_t> a(static_cast<std::size_t>(hi - lo + 1), 0);
    for (const auto& [f, c] : terms_) a[static_cast<std::size_t>(f[0] - lo)] = c;
    return a;
}

std::string LaurentPolynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [f, c] : terms_) {
        const bool is_const = std::all_of(f.begin(), f.end(), [](std::int64_t e) { return e == 0; });
        std::int64_t mag = c < 0 ? -c : c;
        if (first) {
            if (c < 0) os << "-";
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        bool need_star = false;
        if (mag != 1 || is_const) {
            os << mag;
            need_star = true;
        }
        for (std::size_t k = 0; k < dim_; ++k) {
            if (f[k] == 0) continue;
            if (need_star) os << "*";
            os << "z";
            if (dim_ > 1) os << (k + 1);
            if (f[k] != 1) os << "^" << f[k];
            need_star = true;
        }
    }
    return os.str();
}

LaurentPolynomial operator+(const LaurentPolynomial& a, const LaurentPolynomial& b) {
    if (a.dim_ != b.dim_) throw Error("polynomial dimension mismatch");
    LaurentPolynomial out = a;
    for (const auto& [f, c] : b.terms_) out.add_term(f, c);
    return out;
}

LaurentPolynomial operator-(const LaurentPolynomial& a, const LaurentPolynomial& b) {
    if (a.dim_ != b.dim_) throw Error("polynomial dimension mismatch");
    LaurentPolynomial out = a;
    for (const auto& [f, c] : b.terms_) out.add_term(f, -c);
    return out;
}

LaurentPolynomial operator*(const LaurentPolynomial& a, const LaurentPolynomial& b) {
    if (a.dim_ != b.dim_) throw Error("polynomial dimension mismatch");
    LaurentPolynomial out(a.dim_);
    for (const auto& [f, c] : a.terms_)
        for (const auto& [g, e] : b.terms_) {
            Exponent h = f;
            for (std::size_t k = 0; k < a.dim_; ++k) h[k] += g[k];
            out.add_term(h, c * e);
        }
    return out;
}

namespace {

struct ParsedTerm {
    std::int64_t coef = 1;
    std::map<std::size_t, std::int64_t> powers;  // 1-based variable index
};

class PolyParser {
public:
    explicit PolyParser(const std::string& s) : s_(s) {}

    std::vector<ParsedTerm> parse() {
        std::vector<ParsedTerm> out;
        skip_ws();
        if (at_end()) fail("empty polynomial");
        int sign = 1;
        if (peek() == '+' || peek() == '-') {
            sign = peek() == '-' ? -1 : 1;
            ++pos_;
        }
        out.push_back(term(sign));
        skip_ws();
        while (!at_end()) {
            char op = peek();
            if (op != '+' && op != '-') fail("expected '+' or '-'");
            ++pos_;
            out.push_back(term(op == '-' ? -1 : 1));
            skip_ws();
        }
        return out;
    }

private:
    ParsedTerm term(int sign) {
        ParsedTerm t;
        t.coef = sign;
        bool any = false;
        while (true) {
            skip_ws();
            if (at_end()) break;
            char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                t.coef *= integer();
            } else if (c == 'z') {
                ++pos_;
                std::size_t var = 1;
                if (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
                    var = static_cast<std::size_t>(integer());
                if (var == 0) fail("variable index must be >= 1");
                std::int64_t e = 1;
                skip_ws();
                if (!at_end() && peek() == '^') {
                    ++pos_;
                    e = signed_exponent();
                }
                t.powers[var] += e;
            } else {
                break;
            }
            any = true;
            skip_ws();
            if (!at_end() && peek() == '*') {
                ++pos_;
                continue;
            }
            if (!at_end() && (peek() == 'z' || std::isdigit(static_cast<unsigned char>(peek())))) continue;
            break;
        }
        if (!any) fail("expected a term");
        return t;
    }

    std::int64_t signed_exponent() {
        skip_ws();
        bool paren = false;
        if (!at_end() && peek() == '(') {
            paren = true;
            ++pos_;
        }
        skip_ws();
        int sign = 1;
        if (!at_end() && (peek() == '-' || peek() == '+')) {
            sign = peek() == '-' ? -1 : 1;
            ++pos_;
        }
        std::int64_t v = sign * integer();
        skip_ws();
        if (paren) {
            if (at_end() || peek() != ')') fail("expected ')'");
            ++pos_;
        }
        return v;
    }

    std::int64_t integer() {
        if (at_end() || !std::isdigit(static_cast<unsigned char>(peek()))) fail("expected integer");
        std::int64_t v = 0;
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
            v = v * 10 + (peek() - '0');
            ++pos_;
        }
        return v;
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
    }
    [[nodiscard]] bool at_end() const { return pos_ >= s_.size(); }
    [[nodiscard]] char peek() const { return s_[pos_]; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error("cannot parse polynomial '" + s_ + "' at offset " + std::to_string(pos_) + ": " + msg);
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

LaurentPolynomial parse_polynomial(const std::string& text, std::size_t min_dim) {
    auto terms = PolyParser(text).parse();
    std::size_t dim = std::max<std::size_t>(min_dim, 1);
    for (const auto& t : terms)
        for (const auto& [v, e] : t.powers) dim = std::max(dim, v);
    LaurentPolynomial p(dim);
    for (const auto& t : terms) {
        Exponent f(dim, 0);
        for (const auto& [v, e] : t.powers) f[v - 1] += e;
        p.add_term(f, t.coef);
    }
    return p;
}

}  // namespace sadic
