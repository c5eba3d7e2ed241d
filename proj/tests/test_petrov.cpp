#include <random>

#include <gtest/gtest.h>

#include "itergm/errors.hpp"
#include "itergm/parse.hpp"
#include "itergm/petrov.hpp"

using namespace itergm;

namespace {

const char* kCircle = "(x^2 + y^2)/2";
const char* kElliptic = "y^2/2 + x^3/3 - x";
const char* kCubic = "(x^2 + y^2)/2 + x^3/3 - x*y^2 + y^3/5";

BivarPoly random_poly(std::mt19937_64& rng, int deg) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 4), pct(0, 99);
    BivarPoly p;
    for (int d = 0; d <= deg; ++d)
        for (int i = 0; i <= d; ++i)
            if (pct(rng) < 50) p.add_term(i, d - i, Rational(num(rng), den(rng)));
    return p;
}

PolyOneForm random_form(std::mt19937_64& rng, int deg) { return {random_poly(rng, deg), random_poly(rng, deg)}; }

}  // namespace

TEST(Certify, Circle) {
    Hamiltonian H = certify(parse_bivar(kCircle));
    EXPECT_EQ(H.n, 1);
    EXPECT_EQ(H.N(), 1);
    EXPECT_EQ(to_string(H.basic_forms[0]), "(y)dx + (0)dy");
    EXPECT_EQ(H.m, UniPoly::variable(Var::h));
    EXPECT_TRUE(H.genericity.morse_distinct);
    EXPECT_TRUE(H.genericity.petrov_basis_ok);
    EXPECT_TRUE(H.genericity.transversal_ok);
    EXPECT_FALSE(H.genericity.smooth_level);  // level 0 is the centre
}

TEST(Certify, Elliptic) {
    Hamiltonian H = certify(parse_bivar(kElliptic));
    EXPECT_EQ(H.n, 2);
    ASSERT_EQ(H.N(), 4);
    EXPECT_EQ(to_string(H.basic_forms[0]), "(y)dx + (0)dy");
    EXPECT_EQ(to_string(H.basic_forms[1]), "(x*y)dx + (0)dy");
    EXPECT_EQ(to_string(H.basic_forms[2]), "(y^2)dx + (0)dy");
    EXPECT_EQ(to_string(H.basic_forms[3]), "(x*y^2)dx + (0)dy");
    // (h - 2/3)(h + 2/3)
    EXPECT_EQ(H.m, parse_unipoly("h^2 - 4/9", Var::h));
    ASSERT_EQ(H.genericity.critical_values.size(), 2u);
    EXPECT_NEAR(H.genericity.critical_values[0].value.real(), -2.0 / 3.0, 1e-14);
    EXPECT_NEAR(H.genericity.critical_values[1].value.real(), 2.0 / 3.0, 1e-14);
    EXPECT_TRUE(H.genericity.morse_distinct);
    EXPECT_TRUE(H.genericity.petrov_basis_ok);
    EXPECT_EQ(H.genericity.witness.milnor_number, 2);
    EXPECT_EQ(H.genericity.witness.petrov_rank, 2);
    EXPECT_FALSE(H.genericity.basis_independent);
    EXPECT_EQ(H.grading.wx, 2);
    EXPECT_EQ(H.grading.wy, 3);
}

TEST(Certify, CriticalValuesAreValuesAtCriticalPoints) {
    // exact oracle: critical points of the elliptic H are (+-1, 0)
    BivarPoly h = parse_bivar(kElliptic);
    Hamiltonian H = certify(h);
    for (int s : {-1, 1}) {
        Rational x(s), y(0);
        EXPECT_EQ(h.dx().eval(x, y), 0);
        EXPECT_EQ(h.dy().eval(x, y), 0);
        EXPECT_EQ(H.m.eval(h.eval(x, y)), 0);
    }
}

TEST(Certify, GenericCubic) {
    Hamiltonian H = certify(parse_bivar(kCubic));
    EXPECT_EQ(H.m.degree(), 4);
    EXPECT_TRUE(H.genericity.basis_independent);
    EXPECT_EQ(H.genericity.witness.petrov_rank, 4);
}

TEST(Certify, SingularLevelThroughOrigin) {
    Hamiltonian H = certify(parse_bivar("x*y"));
    EXPECT_FALSE(H.genericity.smooth_level);
    EXPECT_EQ(H.m, UniPoly::variable(Var::h));
}

TEST(Certify, RejectsDegenerate) {
    EXPECT_THROW(certify(parse_bivar("x^2")), DegenerateHamiltonian);
    EXPECT_THROW(certify(parse_bivar("x + y")), DegenerateHamiltonian);
    EXPECT_THROW(certify(parse_bivar("(x^2 + y^2)^2")), DegenerateHamiltonian);
}

TEST(Decompose, ExactForm) {
    Hamiltonian H = certify(parse_bivar(kElliptic));
    PetrovDecomposition d = petrov_decompose(PolyOneForm::exact(parse_bivar("x^3*y")), H);
    for (const auto& fi : d.f_coeffs) EXPECT_TRUE(fi.is_zero());
    EXPECT_TRUE(d.f.is_zero());
    EXPECT_EQ(d.g, parse_bivar("x^3*y"));
}

TEST(Decompose, BasicForm) {
    Hamiltonian H = certify(parse_bivar(kElliptic));
    PetrovDecomposition d = petrov_decompose(parse_one_form("(y)dx"), H);
    EXPECT_EQ(d.f_coeffs[0], UniPoly::constant(Var::h, 1));
    for (int l = 1; l < 4; ++l) EXPECT_TRUE(d.f_coeffs[l].is_zero());
    EXPECT_TRUE(d.f.is_zero());
    EXPECT_TRUE(d.g.is_zero());
}

TEST(Decompose, HTimesBasicForm) {
    Hamiltonian H = certify(parse_bivar(kCircle));
    PetrovDecomposition d = petrov_decompose(H.poly * H.basic_forms[0], H);
    EXPECT_EQ(d.f_coeffs[0], UniPoly::variable(Var::h));
    EXPECT_TRUE(d.f.is_zero());
    EXPECT_TRUE(d.g.is_zero());
}

TEST(Decompose, DependentBasicFormsVanish) {
    Hamiltonian H = certify(parse_bivar(kElliptic));
    PetrovDecomposition d = petrov_decompose(H.basic_forms[2], H);
    EXPECT_TRUE(d.f_coeffs[2].is_zero());
    EXPECT_EQ(d.rebuild(H), H.basic_forms[2]);
    EXPECT_EQ(d.f, parse_bivar("-2*x"));
}

TEST(Decompose, RandomResidualIsZero) {
    std::mt19937_64 rng(2024);
    for (const char* h : {kCircle, kElliptic, kCubic}) {
        Hamiltonian H = certify(parse_bivar(h));
        for (int k = 0; k < 40; ++k) {
            PolyOneForm th = random_form(rng, 1 + k % 8);
            PetrovDecomposition d = petrov_decompose(th, H);
            EXPECT_EQ(d.rebuild(H), th) << h << " " << to_string(th);
        }
    }
}

TEST(Decompose, Linearity) {
    std::mt19937_64 rng(99);
    for (const char* h : {kElliptic, kCubic}) {
        Hamiltonian H = certify(parse_bivar(h));
        for (int k = 0; k < 20; ++k) {
            PolyOneForm a = random_form(rng, 6), b = random_form(rng, 6);
            Rational s(3, 7), t(-5, 2);
            auto da = petrov_decompose(a, H), db = petrov_decompose(b, H);
            auto dc = petrov_decompose(s * a + t * b, H);
            for (int l = 0; l < H.N(); ++l) EXPECT_EQ(dc.f_coeffs[l], s * da.f_coeffs[l] + t * db.f_coeffs[l]);
            EXPECT_EQ(dc.f, s * da.f + t * db.f);
            EXPECT_EQ(dc.g, s * da.g + t * db.g);
        }
    }
}

TEST(Decompose, DegreeBoundsOnGenericCubic) {
    std::mt19937_64 rng(5);
    Hamiltonian H = certify(parse_bivar(kCubic));
    for (int k = 0; k < 40; ++k) {
        auto d = petrov_decompose(random_form(rng, 1 + k % 8), H);
        EXPECT_TRUE(d.within_bounds) << d.max_f_degree << " " << d.max_g_degree << " " << d.max_fi_degree;
    }
}

TEST(JacobianDivide, CircleExample) {
    Hamiltonian H = certify(parse_bivar(kCircle));
    PolyOneForm eta = jacobian_divide({BivarPoly(1)}, H);
    EXPECT_EQ(eta, parse_one_form("(y/2)dx + (-x/2)dy"));
    EXPECT_TRUE(jacobian_divide({}, H).is_zero());
}

TEST(JacobianDivide, WedgeIdentity) {
    std::mt19937_64 rng(17);
    for (const char* h : {kCircle, kElliptic, kCubic}) {
        Hamiltonian H = certify(parse_bivar(h));
        PolyOneForm dH{H.poly.dx(), H.poly.dy()};
        BivarPoly mH = compose_with_hamiltonian(H.m, H.poly);
        for (int k = 0; k < 25; ++k) {
            PolyTwoForm mu{random_poly(rng, 1 + k % 7)};
            PolyOneForm eta = jacobian_divide(mu, H);
            EXPECT_EQ(wedge(eta, dH).R, mH * mu.R);
        }
    }
}

TEST(GelfandLeray, CircleAndZero) {
    Hamiltonian H = certify(parse_bivar(kCircle));
    auto [eta, m] = gelfand_leray(parse_one_form("(y)dx"), H);
    EXPECT_EQ(eta, parse_one_form("(-y/2)dx + (x/2)dy"));
    EXPECT_EQ(m, H.m);
    auto [z, m2] = gelfand_leray(PolyOneForm(), H);
    EXPECT_TRUE(z.is_zero());
    EXPECT_EQ(m2, H.m);
    auto [e3, m3] = gelfand_leray(PolyOneForm::exact(parse_bivar("x^4*y + y^3")), H);
    EXPECT_TRUE(e3.is_zero());
}
