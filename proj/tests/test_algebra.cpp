#include <random>

#include <gtest/gtest.h>

#include "itergm/errors.hpp"
#include "itergm/forms.hpp"
#include "itergm/parse.hpp"

using namespace itergm;

namespace {

BivarPoly random_poly(std::mt19937_64& rng, int deg, int density = 60) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 5), pct(0, 99);
    BivarPoly p;
    for (int d = 0; d <= deg; ++d)
        for (int i = 0; i <= d; ++i)
            if (pct(rng) < density) p.add_term(i, d - i, Rational(num(rng), den(rng)));
    return p;
}

}  // namespace

TEST(Rational, CanonicalForm) {
    Rational q(6, -4);
    q.canonicalize();
    EXPECT_EQ(q.get_num(), -3);
    EXPECT_EQ(q.get_den(), 2);
    EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
    EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
}

TEST(BivarPoly, ParsePrintRoundTrip) {
    BivarPoly p = parse_bivar("3/2*x^2*y - y^3");
    EXPECT_EQ(p.coeff(2, 1), Rational(3, 2));
    EXPECT_EQ(p.coeff(0, 3), Rational(-1));
    EXPECT_EQ(to_string(p), "3/2*x^2*y - y^3");
    EXPECT_EQ(to_string(parse_bivar("y^2/2 + x^3/3 - x")), "1/3*x^3 + 1/2*y^2 - x");
    EXPECT_EQ(to_string(BivarPoly()), "0");
    EXPECT_THROW(parse_bivar("x +* y"), ParseError);
    EXPECT_THROW(parse_bivar("x/y"), ParseError);
    EXPECT_THROW(parse_bivar("z"), ParseError);
}

TEST(BivarPoly, RandomRoundTrip) {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 100; ++k) {
        BivarPoly p = random_poly(rng, 7);
        EXPECT_EQ(parse_bivar(to_string(p)), p);
        PolyOneForm w{random_poly(rng, 5), random_poly(rng, 5)};
        EXPECT_EQ(parse_one_form(to_string(w)), w);
        PolyTwoForm m{random_poly(rng, 6)};
        EXPECT_EQ(parse_two_form(to_string(m)), m);
    }
}

TEST(BivarPoly, NormIsSubmultiplicative) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 200; ++k) {
        BivarPoly a = random_poly(rng, 5), b = random_poly(rng, 5);
        EXPECT_LE((a * b).norm(), a.norm() * b.norm());
    }
}

TEST(BivarPoly, DegreeAndEval) {
    BivarPoly h = parse_bivar("y^2/2 + x^3/3 - x");
    EXPECT_EQ(h.degree(), 3);
    EXPECT_EQ(h.eval(Rational(1), Rational(0)), Rational(-2, 3));
    EXPECT_EQ(h.eval(Rational(-1), Rational(0)), Rational(2, 3));
    EXPECT_NEAR(h.eval(0.0, 2.0), 2.0, 1e-15);
    EXPECT_EQ(h.weighted_degree(2, 3), 6);
    EXPECT_EQ(to_string(h.weighted_part(2, 3, 6)), "1/3*x^3 + 1/2*y^2");
}

TEST(Forms, ExteriorDerivative) {
    EXPECT_EQ(exterior_derivative(parse_one_form("(y)dx")).R, BivarPoly(-1));
    BivarPoly g = parse_bivar("x^2*y");
    EXPECT_TRUE(exterior_derivative(PolyOneForm::exact(g)).is_zero());
    EXPECT_EQ(exterior_derivative(parse_one_form("(x^2*y^3)dx")).R, parse_bivar("-3*x^2*y^2"));
}

TEST(Forms, DdIsZeroOnRandomPolynomials) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k)
        EXPECT_TRUE(exterior_derivative(PolyOneForm::exact(random_poly(rng, 10))).is_zero());
}

TEST(Forms, Wedge) {
    EXPECT_EQ(wedge(parse_one_form("(y)dx"), parse_one_form("(x)dy")).R, parse_bivar("x*y"));
    EXPECT_TRUE(wedge(parse_one_form("(y)dx"), parse_one_form("(y^2)dx")).is_zero());
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        PolyOneForm a{random_poly(rng, 4), random_poly(rng, 4)}, b{random_poly(rng, 4), random_poly(rng, 4)};
        EXPECT_TRUE(wedge(a, a).is_zero());
        EXPECT_EQ(wedge(a, b), -wedge(b, a));
    }
}

TEST(Forms, ComposeWithHamiltonian) {
    BivarPoly circle = parse_bivar("(x^2+y^2)/2");
    EXPECT_EQ(compose_with_hamiltonian(UniPoly::variable(Var::h), circle), circle);
    EXPECT_EQ(compose_with_hamiltonian(UniPoly::constant(Var::h, 1), circle), BivarPoly(1));
    EXPECT_EQ(compose_with_hamiltonian(parse_unipoly("h^2", Var::h), parse_bivar("x + y")),
              parse_bivar("x^2 + 2*x*y + y^2"));
}

TEST(Forms, PullbackToTransversal) {
    EXPECT_TRUE(pullback_to_transversal(parse_one_form("(x*y^2)dx")).is_zero());
    EXPECT_EQ(pullback_to_transversal(parse_one_form("(y)dy")), UniPoly::variable(Var::p));
    EXPECT_TRUE(pullback_to_transversal(parse_one_form("(x)dy")).is_zero());
}

TEST(UniPoly, Arithmetic) {
    UniPoly a = parse_unipoly("h^2 - 4/9", Var::h);
    UniPoly b = parse_unipoly("h - 2/3", Var::h);
    UniPoly q, r;
    divmod(a, b, q, r);
    EXPECT_TRUE(r.is_zero());
    EXPECT_EQ(q, parse_unipoly("h + 2/3", Var::h));
    EXPECT_EQ(gcd(a, b), b);
    EXPECT_EQ(to_string(a), "h^2 - 4/9");
    UniPoly t = parse_unipoly("p^2/2", Var::p);
    EXPECT_EQ(a.compose(t), parse_unipoly("p^4/4 - 4/9", Var::p));
}

TEST(RationalFunction, CanonicalAndRoundTrip) {
    UniPoly num = parse_unipoly("2*p^3 - 2*p", Var::p);
    UniPoly den = parse_unipoly("3*p^2 - 3", Var::p);
    RationalFunction r(num, den);
    EXPECT_EQ(to_string(r), "2/3*p");
    RationalFunction s = parse_ratfunc("(2*p)/(p^2 - 4/3)", Var::p);
    EXPECT_EQ(s.den().lead(), Rational(1));
    EXPECT_EQ(parse_ratfunc(to_string(s), Var::p), s);
    EXPECT_EQ(s - s, RationalFunction(UniPoly(Var::p)));
    EXPECT_EQ(s.degree(), 3);
    EXPECT_EQ(parse_ratfunc("(p/2)/(3*p^2/4)", Var::p).size(), mpz_class(5));
    EXPECT_NEAR(s.eval(1.0), 2.0 / (1.0 - 4.0 / 3.0), 1e-14);
}
