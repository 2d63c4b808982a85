#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "sac/algebra.hpp"
#include "sac/errors.hpp"

using namespace sac;
using namespace sac::algebra;

namespace {

Symbol sym(const std::string& s) { return parse_symbol(s); }

Homogeneity hom(const std::string& s, int d) { return homogeneity(sym(s), d); }

Homogeneity H(Rational a, std::int64_t b) { return Homogeneity{a, b}; }

std::set<std::string> names(const std::vector<Symbol>& v) {
    std::set<std::string> out;
    for (const auto& s : v) out.insert(to_string(s));
    return out;
}

}  // namespace

TEST_CASE("homogeneity of the generators") {
    CHECK(hom("One", 1) == H(Rational(0), 0));
    CHECK(hom("One", 3) == H(Rational(0), 0));
    for (int d = 1; d <= 3; ++d) {
        CHECK(hom("Xi", d) == H(Rational(-(d + 2), 2), -1));
        CHECK(hom("X0", d) == H(Rational(2), 0));
        CHECK(hom("X1", d) == H(Rational(1), 0));
    }
}

TEST_CASE("homogeneity worked examples") {
    // |I(Xi)^2| = 2 - d - 2 kappa
    CHECK(hom("I(Xi)^2", 3) == H(Rational(-1), -2));
    CHECK(hom("I(Xi)^2", 2) == H(Rational(0), -2));
    // |I(I(Xi)^3)| = 5 - 3d/2 - 3 kappa
    CHECK(hom("I(I(Xi)^3)", 2) == H(Rational(2), -3));
    CHECK(hom("I(I(Xi)^3)", 3) == H(Rational(1, 2), -3));
    // |Xi I(Xi)| = -d - 2 kappa
    CHECK(hom("Xi*I(Xi)", 3) == H(Rational(-3), -2));
    // d=1 linear solution symbol is positive: 1/2 - kappa
    CHECK(hom("I(Xi)", 1) == H(Rational(1, 2), -1));
    CHECK(H(Rational(0), 0) < hom("I(Xi)", 1));
}

TEST_CASE("homogeneity additivity over random products") {
    std::mt19937 rng(7);
    const std::vector<std::string> pool = {"I(Xi)", "I(Xi)^2", "I(I(Xi)^3)", "X1",
                                           "X0",    "I(Xi)^3", "I(I(Xi)^2)"};
    for (int rep = 0; rep < 200; ++rep) {
        const int d = 1 + static_cast<int>(rng() % 3);
        const auto& s1 = pool[rng() % pool.size()];
        const auto& s2 = pool[rng() % pool.size()];
        const Symbol p = Symbol::prod({sym(s1), sym(s2)});
        CHECK(homogeneity(p, d) == hom(s1, d) + hom(s2, d));
        CHECK(chaos_order(p) == chaos_order(sym(s1)) + chaos_order(sym(s2)));
    }
}

TEST_CASE("kappa ordering is lexicographic for kappa -> 0+") {
    CHECK(H(Rational(0), -2) < H(Rational(0), 0));
    CHECK(H(Rational(0), -2) < H(Rational(1, 100), -1000));
    CHECK(H(Rational(-1), 5) < H(Rational(0), -5));
}

TEST_CASE("chaos orders") {
    CHECK(chaos_order(sym("Xi")) == 1);
    CHECK(chaos_order(sym("I(Xi)")) == 1);
    CHECK(chaos_order(sym("I(Xi)^2")) == 2);
    CHECK(chaos_order(sym("I(Xi)^3")) == 3);
    CHECK(chaos_order(sym("I(Xi)^2*I(I(Xi)^2)")) == 4);
    CHECK(chaos_order(sym("I(Xi)*I(I(Xi)^3)")) == 4);
    CHECK(chaos_order(sym("I(Xi)^2*I(I(Xi)^3)")) == 5);
    CHECK(chaos_order(sym("One")) == 0);
    CHECK(chaos_order(sym("X0^2*X1")) == 0);
    CHECK(chaos_order(Symbol::integ(sym("I(Xi)^3"))) == 3);
}

TEST_CASE("I annihilates polynomials") {
    CHECK_THROWS_AS(Symbol::integ(sym("One")), StructuralError);
    CHECK_THROWS_AS(Symbol::integ(sym("X0^2")), StructuralError);
    CHECK_THROWS_AS(sym("I(X1)"), StructuralError);
    CHECK_NOTHROW(sym("I(X1*I(Xi))"));
}

TEST_CASE("canonical product form") {
    CHECK(sym("I(Xi)*X0*I(Xi)") == sym("X0*I(Xi)^2"));
    CHECK(sym("One*I(Xi)") == sym("I(Xi)"));
    CHECK(sym("X1*X1") == sym("X1^2"));
    CHECK(to_string(sym("I(Xi)^2*X0")) == to_string(sym("X0*I(Xi)*I(Xi)")));
}

TEST_CASE("negative-order symbol lists") {
    SUBCASE("d=2") {
        const auto sets = generate_symbols(2);
        CHECK(names(sets.W_minus) ==
              std::set<std::string>{"Xi", "I(Xi)", "I(Xi)^2", "I(Xi)^3"});
    }
    SUBCASE("d=3 has exactly the seven expected symbols") {
        const auto sets = generate_symbols(3);
        CHECK(names(sets.W_minus) ==
              std::set<std::string>{"Xi", "I(Xi)", "I(Xi)^2", "I(Xi)^3",
                                    "I(Xi)^2*I(I(Xi)^3)", "I(Xi)^2*I(I(Xi)^2)",
                                    "I(Xi)*I(I(Xi)^3)"});
        CHECK(sets.W_minus.size() == 7);
    }
    SUBCASE("d=1 only keeps the noise symbol") {
        const auto sets = generate_symbols(1);
        CHECK(names(sets.W_minus) == std::set<std::string>{"Xi"});
    }
}

TEST_CASE("d=3 homogeneity table of the negative-order symbols") {
    const auto sets = generate_symbols(3);
    std::map<std::string, Homogeneity> expect = {
        {"Xi", H(Rational(-5, 2), -1)},
        {"I(Xi)", H(Rational(-1, 2), -1)},
        {"I(Xi)^2", H(Rational(-1), -2)},
        {"I(Xi)^3", H(Rational(-3, 2), -3)},
        {"I(Xi)^2*I(I(Xi)^3)", H(Rational(-1, 2), -5)},
        {"I(Xi)^2*I(I(Xi)^2)", H(Rational(0), -4)},
        {"I(Xi)*I(I(Xi)^3)", H(Rational(0), -4)},
    };
    CHECK(sets.W_minus.size() == expect.size());
    const std::set<Rational> apool = {Rational(-5, 2), Rational(-1, 2), Rational(-1),
                                      Rational(-3, 2), Rational(0)};
    for (const auto& s : sets.W_minus) {
        const auto h = homogeneity(s, 3);
        REQUIRE(expect.count(to_string(s)) == 1);
        CHECK(h == expect[to_string(s)]);
        CHECK(apool.count(h.a) == 1);
        // kappa coefficient is minus the chaos order throughout the list
        CHECK(h.b == -chaos_order(s));
    }
}

TEST_CASE("U closure contains the integrated squares and cubes in d=3") {
    const auto sets = generate_symbols(3);
    const auto u = names(sets.U);
    CHECK(u.count("One") == 1);
    CHECK(u.count("X1") == 1);
    CHECK(u.count("X0") == 0);  // homogeneity 2 is outside the zeta=2 truncation
    CHECK(u.count("I(Xi)") == 1);
    CHECK(u.count("I(I(Xi)^2)") == 1);
    CHECK(u.count("I(I(Xi)^3)") == 1);
}

namespace {

std::string coproduct_str(const std::string& tau, int d) {
    std::string out;
    for (const auto& t : coproduct(sym(tau), d)) {
        if (!out.empty()) out += " + ";
        out += to_string(t);
    }
    return out;
}

}  // namespace

TEST_CASE("coproduct primitives") {
    CHECK(coproduct_str("Xi", 3) == "Xi (x) One");
    CHECK(coproduct_str("One", 3) == "One (x) One");
    CHECK(coproduct_str("X1", 3) == "One (x) X1 + X1 (x) One");
    CHECK(coproduct_str("I(Xi)", 3) == "I(Xi) (x) One");
    CHECK(coproduct_str("I(Xi)^3", 3) == "I(Xi)^3 (x) One");
}

TEST_CASE("coproduct of the composite d=3 symbols") {
    CHECK(coproduct_str("I(Xi)^2*I(I(Xi)^2)", 3) ==
          "I(Xi)^2 (x) J(I(Xi)^2) + I(Xi)^2*I(I(Xi)^2) (x) One");
    CHECK(coproduct_str("I(Xi)*I(I(Xi)^3)", 3) ==
          "I(Xi) (x) J(I(Xi)^3) + I(Xi)*I(I(Xi)^3) (x) One");
    CHECK(coproduct_str("I(Xi)^2*I(I(Xi)^3)", 3) ==
          "I(Xi)^2 (x) J(I(Xi)^3) + I(Xi)^2*I(I(Xi)^3) (x) One");
}

TEST_CASE("coproduct with polynomial corrections in d=1") {
    // In d=1 the integrated noise has positive homogeneity, so the Taylor
    // correction term J_0 appears.
    CHECK(coproduct_str("I(Xi)", 1) == "One (x) J(Xi) + I(Xi) (x) One");
}

TEST_CASE("first tensor factor never exceeds the symbol's homogeneity") {
    for (int d = 1; d <= 3; ++d) {
        const auto sets = generate_symbols(d);
        for (const auto& tau : sets.W) {
            const auto h = homogeneity(tau, d);
            for (const auto& term : coproduct(tau, d)) {
                const auto hl = homogeneity(term.left, d);
                CHECK(hl <= h);
                if (hl == h) {
                    CHECK(term.left == tau);
                    CHECK(term.right.is_unit());
                }
            }
        }
    }
}

TEST_CASE("parse/print round trip on every generated symbol") {
    for (int d = 1; d <= 3; ++d) {
        const auto sets = generate_symbols(d);
        for (const auto& s : sets.W) {
            CHECK(parse_symbol(to_string(s)) == s);
        }
        for (const auto& s : sets.U) {
            CHECK(parse_symbol(to_string(s)) == s);
        }
    }
    CHECK(parse_symbol("X0^2*I(Xi)") == Symbol::prod({Symbol::x_coord(0, 2), sym("I(Xi)")}));
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS(parse_symbol("I("), StructuralError);
    CHECK_THROWS_AS(parse_symbol("Y"), StructuralError);
    CHECK_THROWS_AS(parse_symbol("I(Xi)) "), StructuralError);
    CHECK_THROWS_AS(parse_symbol("X9"), StructuralError);
    CHECK_THROWS_AS(parse_symbol(""), StructuralError);
}

TEST_CASE("generate_symbols validates inputs") {
    CHECK_THROWS_AS(generate_symbols(4), StructuralError);
    CHECK_THROWS_AS(generate_symbols(2, Homogeneity{Rational(1), 0}), StructuralError);
}
