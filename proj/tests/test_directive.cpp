#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "sadic/directive.hpp"
#include "sadic/error.hpp"

using namespace sadic;
using namespace sadic::testing;

TEST_CASE("rng reproducibility") {
    Xoshiro256 a(kDefaultSeed), b(kDefaultSeed), c(kDefaultSeed + 1);
    bool differs = false;
    for (int k = 0; k < 1000; ++k) {
        const auto x = a.next();
        CHECK(x == b.next());
        differs = differs || x != c.next();
    }
    CHECK(differs);
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));

    // SplitMix64 reference output for state 0.
    std::uint64_t state = 0;
    CHECK(splitmix64(state) == 0xE220A8397B1DCDAFULL);

    Xoshiro256 r(5);
    for (int k = 0; k < 10000; ++k) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(r.below(7) < 7);
    }
}

TEST_CASE("constant and periodic sources") {
    CHECK(take_word(DirectiveSource::constant(1), 5) == Word{1, 1, 1, 1, 1});
    CHECK(take_word(DirectiveSource::periodic({1, 2, 2}), 7) == Word{1, 2, 2, 1, 2, 2, 1});
    CHECK(DirectiveSource::periodic({1, 2, 2}).symbol_count() == 2);
    const auto mu = DirectiveSource::periodic({1, 2, 2}).symbol_measure();
    CHECK(mu[0] == doctest::Approx(1.0 / 3));
    CHECK(mu[1] == doctest::Approx(2.0 / 3));
    CHECK_THROWS_AS(DirectiveSource::periodic({}), Error);
    CHECK_THROWS_AS(DirectiveSource::constant(0), Error);
}

TEST_CASE("bernoulli sources") {
    CHECK(take_word(DirectiveSource::bernoulli({1.0, 0.0}, 99), 1000) == Word(1000, 1));

    auto src = DirectiveSource::bernoulli({0.3, 0.7}, kDefaultSeed);
    int ones = 0;
    for (int k = 0; k < 100000; ++k) ones += src.next_symbol() == 1;
    CHECK(std::abs(ones / 1e5 - 0.3) < 0.01);

    auto a = DirectiveSource::bernoulli({0.5, 0.5}, 31);
    auto b = DirectiveSource::bernoulli({0.5, 0.5}, 31);
    bool same = true;
    for (int k = 0; k < 1000000; ++k) same = same && a.next_symbol() == b.next_symbol();
    CHECK(same);

    auto c = DirectiveSource::bernoulli({0.5, 0.5}, 31);
    const auto w1 = take_word(c, 64);
    c.reset();
    CHECK(take_word(c, 64) == w1);
    CHECK(take_word(c.replica(1), 64) != take_word(c.replica(2), 64));
    CHECK(take_word(c.replica(1), 64) == take_word(c.replica(1), 64));

    CHECK_THROWS_AS(DirectiveSource::bernoulli({0.5, 0.6}, 1), Error);
    CHECK_THROWS_AS(DirectiveSource::bernoulli({-0.5, 1.5}, 1), Error);
}

TEST_CASE("markov sources") {
    auto src = DirectiveSource::markov({{0.9, 0.1}, {0.2, 0.8}}, {0.5, 0.5}, 3);
    const auto mu = src.symbol_measure();
    CHECK(mu[0] == doctest::Approx(2.0 / 3).epsilon(1e-12));
    CHECK(mu[1] == doctest::Approx(1.0 / 3).epsilon(1e-12));
    int ones = 0;
    for (int k = 0; k < 200000; ++k) ones += src.next_symbol() == 1;
    CHECK(std::abs(ones / 2e5 - 2.0 / 3) < 0.01);

    CHECK(take_word(DirectiveSource::markov({{0.0, 1.0}, {1.0, 0.0}}, {1.0, 0.0}, 3), 6) == Word{1, 2, 1, 2, 1, 2});
    CHECK_THROWS_AS(DirectiveSource::markov({{0.5, 0.6}, {0.5, 0.5}}, {1.0, 0.0}, 3), Error);
}

TEST_CASE("rotation coding") {
    const double alpha = 0.6180339887;
    const double cut = 1.0 - alpha;
    auto src = DirectiveSource::rotation(alpha, {cut});
    for (int n = 0; n < 8; ++n) {
        const double x = std::fmod(n * alpha, 1.0);
        CHECK(src.next_symbol() == (x < cut ? 1 : 2));
    }
    auto long_run = DirectiveSource::rotation(alpha, {cut}, 0.1);
    int ones = 0;
    for (int k = 0; k < 100000; ++k) ones += long_run.next_symbol() == 1;
    CHECK(std::abs(ones / 1e5 - cut) < 1e-3);
    CHECK(long_run.symbol_measure()[0] == doctest::Approx(cut));
    CHECK_THROWS_AS(DirectiveSource::rotation(1.5, {0.5}), Error);
    CHECK_THROWS_AS(DirectiveSource::rotation(0.3, {0.6, 0.4}), Error);
}

TEST_CASE("parse directive specs") {
    CHECK(take_word(parse_directive("constant:2"), 3) == Word{2, 2, 2});
    CHECK(take_word(parse_directive("word:121"), 4) == Word{1, 2, 1, 1});
    CHECK(take_word(parse_directive("word:1,2,2"), 3) == Word{1, 2, 2});
    CHECK(parse_directive("bernoulli:0.3,0.7").kind() == DirectiveKind::bernoulli);
    CHECK(parse_directive("markov:rows=0.9,0.1/0.2,0.8;init=0.5,0.5").kind() == DirectiveKind::markov);
    CHECK(parse_directive("rotation:alpha=0.6180339887,cut=0.3819660113").symbol_count() == 2);
    CHECK_THROWS_AS(parse_directive("nonsense"), Error);
    CHECK_THROWS_AS(parse_directive("gaussian:1"), Error);
    CHECK_THROWS_AS(parse_directive("bernoulli:0.3,x"), Error);

    for (const std::string spec : {"constant:1", "word:1,2,2", "bernoulli:0.25,0.75",
                                   "markov:rows=0.9,0.1/0.2,0.8;init=0.5,0.5",
                                   "rotation:alpha=0.6180339887,cut=0.3819660113,x0=0.25"}) {
        const auto a = parse_directive(spec, 8);
        const auto b = parse_directive(a.describe(), 8);
        CHECK(take_word(a, 200) == take_word(b, 200));
    }
}

TEST_CASE("skew product on the torus") {
    const auto tm = thue_morse();
    auto origin = SkewOrbitState::at({0.0});
    for (int k = 0; k < 10; ++k) origin = skew_step(origin, tm);
    CHECK(origin.is_origin());
    CHECK(origin.step == 10);

    RationalTorusPoint third{{1}, {3}};
    third = skew_step_exact(third, tm);
    CHECK(third == RationalTorusPoint{{2}, {3}});
    third = skew_step_exact(third, tm);
    CHECK(third == RationalTorusPoint{{1}, {3}});

    const RationalTorusPoint p{{1, 1}, {5, 7}};
    CHECK(skew_step_exact(p, block_4x3()) == RationalTorusPoint{{4, 3}, {5, 7}});

    auto s = SkewOrbitState::at({0.2, 1.0 / 7});
    s = skew_step(s, block_4x3());
    const auto t = s.torus_point();
    CHECK(t[0] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(t[1] == doctest::Approx(3.0 / 7).epsilon(1e-15));

    CHECK_THROWS_AS(skew_step(SkewOrbitState::at({0.5}), block_4x3()), Error);
}

TEST_CASE("property: rationals with coprime denominators stay periodic") {
    const auto tm = thue_morse();
    for (std::int64_t den : {3, 5, 7, 9, 11, 13, 15, 21}) {
        for (std::int64_t num = 1; num < den; ++num) {
            RationalTorusPoint p{{num}, {den}};
            const auto start = p;
            bool returned = false;
            for (std::int64_t k = 0; k < den && !returned; ++k) {
                p = skew_step_exact(p, tm);
                CHECK(p.den[0] == den);
                returned = p == start;
            }
            CHECK(returned);
        }
    }
}

TEST_CASE("randomized orbit keeps the doubling map alive") {
    const auto tm = thue_morse();
    Xoshiro256 rng(12);
    auto s = random_orbit_start(1, rng);
    auto plain = s;
    int low = 0;
    for (int k = 0; k < 10000; ++k) {
        s = skew_step(s, tm, rng);
        plain = skew_step(plain, tm);
        low += s.torus_point()[0] < 0.5;
    }
    CHECK(plain.is_origin());
    CHECK_FALSE(s.is_origin());
    CHECK(std::abs(low / 1e4 - 0.5) < 0.03);
}
