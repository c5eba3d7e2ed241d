#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "itergm/melnikov.hpp"
#include "itergm/parse.hpp"

using namespace itergm;

namespace {

constexpr double kPi = std::numbers::pi;

const Hamiltonian& circle() {
    static Hamiltonian H = certify(parse_bivar("(x^2 + y^2)/2"));
    return H;
}

const Hamiltonian& elliptic() {
    static Hamiltonian H = certify(parse_bivar("y^2/2 + x^3/3 - x"));
    return H;
}

PerturbationForm form(const char* s) { return {parse_one_form(s)}; }

double closed_value(const Hamiltonian& H, const PrimitiveSum& f, double p) {
    double s = 0;
    for (const auto& [c, letters] : f) {
        std::vector<int> tup;
        for (size_t k = 0; k < letters.size(); ++k) tup.push_back(static_cast<int>(k));
        s += c.eval(p) * integrate_tuples(H, p, letters, {tup}).values[0];
    }
    return s;
}

}  // namespace

TEST(Factor, FirstStepIsGelfandLerayPrimitive) {
    PolyOneForm w = parse_one_form("(x*y + y^2)dx");
    PrimitiveSum f2 = melnikov_factor(w, circle(), 2);
    ASSERT_EQ(f2.size(), 1u);
    EXPECT_EQ(f2[0].letters.size(), 1u);
    EXPECT_EQ(f2[0].letters[0], jacobian_divide(exterior_derivative(w), circle()));
    EXPECT_EQ(f2[0].coeff, parse_ratfunc("-2/p^2", Var::p));  // -1/m(t), t = p^2/2
}

// The level derivative of a closed iterated integral (omega, theta...) with
// general letters equals the closed value of the next factor plus the term
// from the moving base point.
TEST(Factor, TransverseDerivativeOfGeneralTuples) {
    const Hamiltonian& H = elliptic();
    PolyOneForm w = parse_one_form("(x^2 + y)dx + (x*y)dy");
    std::vector<PolyOneForm> th{parse_one_form("(y^2)dx + (x + y)dy"), parse_one_form("(x)dx + (x^2 - y)dy")};
    UniPoly t = restrict_to_transversal(H.poly);
    UniPoly qw = restrict_to_transversal(w.Q);
    for (size_t k = 1; k <= th.size(); ++k) {
        std::vector<PolyOneForm> theta(th.begin(), th.begin() + k);
        PrimitiveSum g = next_factor({{RationalFunction::constant(Var::p, 1), theta}}, w, H);
        std::vector<PolyOneForm> full{w};
        full.insert(full.end(), theta.begin(), theta.end());
        std::vector<int> all, tail;
        for (size_t q = 0; q < full.size(); ++q) all.push_back(static_cast<int>(q));
        for (size_t q = 1; q < full.size(); ++q) tail.push_back(static_cast<int>(q));
        for (double p : {0.45, 0.85}) {
            auto I = [&](double q) { return integrate_tuples(H, q, full, {all}).values[0]; };
            double h = 1e-3;
            double d1 = (I(p + h) - I(p - h)) / (2 * h), d2 = (I(p + h / 2) - I(p - h / 2)) / h;
            double dI_dt = (4 * d2 - d1) / 3 / t.derivative().eval(p);
            double base = qw.eval(p) / t.derivative().eval(p) * integrate_tuples(H, p, full, {tail}).values[0];
            double rhs = closed_value(H, g, p) + base;
            EXPECT_NEAR(dI_dt, rhs, 1e-6 * std::max(1.0, std::abs(rhs))) << "k=" << k << " p=" << p;
        }
    }
}

TEST(Sequence, CircleFirstOrder) {
    auto r = melnikov_sequence(circle(), form("(y)dx"), 3, {0.5, 2.0, 7});
    EXPECT_EQ(r.order, 1);
    for (const auto& s : r.samples) EXPECT_NEAR(s.value, -kPi * s.p * s.p, 1e-9 * s.p * s.p);
    ASSERT_TRUE(r.log[0].petrov_zero.has_value());
    EXPECT_FALSE(*r.log[0].petrov_zero);
}

TEST(Sequence, SymmetricPerturbationIsSecondOrder) {
    auto r = melnikov_sequence(circle(), form("(x*y + y^2)dx"), 3, {0.5, 1.5, 5});
    EXPECT_EQ(r.order, 2);
    EXPECT_TRUE(r.log[0].vanishing);
    EXPECT_TRUE(*r.log[0].petrov_zero);
    for (const auto& s : r.samples) EXPECT_NEAR(s.value, kPi * std::pow(s.p, 4) / 4, 1e-9);
}

TEST(Sequence, CentersAndExactFormsExceedOrder) {
    EXPECT_THROW(melnikov_sequence(circle(), form("(x*y)dx"), 3, {0.5, 1.5, 5}), OrderExceeded);
    EXPECT_THROW(melnikov_sequence(elliptic(), {PolyOneForm::exact(parse_bivar("x^2*y - y^3"))}, 3, {0.3, 1.0, 5}),
                 OrderExceeded);
}

TEST(Sequence, EllipticSecondOrderMatchesSymbolic) {
    PerturbationForm w = form("(x^3 - x + y)dx + (x*y + x)dy");  // x dH + d(xy)
    MelnikovOptions o;
    o.symbolic = true;
    auto r = melnikov_sequence(elliptic(), w, 3, {0.3, 1.0, 5}, o);
    ASSERT_EQ(r.order, 2);
    ASSERT_TRUE(r.symbolic.has_value());
    for (const auto& s : r.samples) {
        auto v = eval_iterated(elliptic(), s.p, r.symbolic->basis);
        std::vector<Complex> vc(v.values.begin(), v.values.end());
        EXPECT_NEAR(r.symbolic->evaluate(s.p, vc).real(), s.value, 1e-5 * std::abs(s.value));
    }
}

TEST(Symbolic, FirstOrderIsPetrov) {
    const Hamiltonian& H = elliptic();
    PolyOneForm w = parse_one_form("(x^2*y + y^3)dx + (x*y^2 - 1)dy");
    auto rc = reduce_melnikov_symbolic(H, {w}, 1);
    PetrovDecomposition dec = petrov_decompose(w, H);
    UniPoly t = restrict_to_transversal(H.poly);
    for (int l = 0; l < H.N(); ++l)
        EXPECT_EQ(rc.coeff(Word{{l + 1}}), -RationalFunction(dec.f_coeffs[l].compose(t)));
    auto basic = reduce_melnikov_symbolic(H, {H.basic_forms[1]}, 1);
    ASSERT_EQ(basic.coeffs.size(), 1u);
    EXPECT_EQ(basic.coeff(Word{{2}}), RationalFunction::constant(Var::p, -1));
    EXPECT_THROW(reduce_melnikov_symbolic(H, {w}, 4), CapacityExceeded);
}

TEST(Symbolic, CircleSecondOrder) {
    auto rc = reduce_melnikov_symbolic(circle(), form("(x*y)dx"), 2);
    for (const auto& [w, c] : rc.coeffs) EXPECT_LE(w.size(), 2);
    auto rc2 = reduce_melnikov_symbolic(circle(), form("(x*y + y^2)dx"), 2);
    EXPECT_EQ(rc2.coeff(Word{{1}}), parse_ratfunc("p^2/4", Var::p));
}

TEST(Poincare, UnperturbedAndIntegrable) {
    const Hamiltonian& H = elliptic();
    auto d0 = poincare_map(H, form("(y^2 + x)dx"), 0.0, 0.7);
    EXPECT_NEAR(d0.delta, 0.7, 1e-11);
    // H + eps G keeps its center for small eps
    auto de = poincare_map(H, {PolyOneForm::exact(parse_bivar("x*y^2 + y^2"))}, 1e-2, 0.7);
    EXPECT_NEAR(de.delta, 0.7, 1e-10);
}

TEST(Poincare, FirstOrderSlope) {
    auto fit = fit_order(circle(), form("(y)dx"), 1.0, 1);
    EXPECT_NEAR(fit.slope, 1.0, 0.1);
    EXPECT_NEAR(fit.leading, -kPi, 1e-3);
}

// Delta - p - eps^K M_K in the p-chart is of order K + 1
TEST(Poincare, OrderConsistency) {
    struct Case {
        const Hamiltonian* H;
        const char* w;
        double p;
    };
    for (Case c : {Case{&circle(), "(y)dx", 1.0}, Case{&elliptic(), "(y + x^2*y)dx", 0.7},
                   Case{&circle(), "(x*y + y^2)dx", 1.0}, Case{&elliptic(), "(x^3 - x + y)dx + (x*y + x)dy", 0.7}}) {
        PerturbationForm w = form(c.w);
        auto rep = melnikov_sequence(*c.H, w, 3, {c.p - 0.1, c.p + 0.1, 3});
        double m = (*rep.evaluator)(c.p).p_chart;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (double e : {1e-3, 2e-3, 4e-3, 8e-3, 1.6e-2}) {
            auto d = poincare_map(*c.H, w, e, c.p);
            double r = std::abs(d.delta - c.p - std::pow(e, rep.order) * m);
            ASSERT_GT(r, 100 * d.error) << c.w;
            sx += std::log(e);
            sy += std::log(r);
            sxx += std::log(e) * std::log(e);
            sxy += std::log(e) * std::log(r);
            ++n;
        }
        EXPECT_GE((n * sxy - sx * sy) / (n * sxx - sx * sx), rep.order + 0.8) << c.w;
    }
}

TEST(Zeros, SimpleZeroAtRootThree) {
    auto r = melnikov_sequence(circle(), form("(-3*y + x^2*y + y^3)dx"), 2, {0.5, 2.5, 9});
    ASSERT_EQ(r.order, 1);
    ZeroCount z = count_zeros(r, 0.5, 2.5);
    ASSERT_EQ(z.count, 1);
    EXPECT_LE(z.brackets[0].lo, std::sqrt(3.0));
    EXPECT_GE(z.brackets[0].hi, std::sqrt(3.0));
    EXPECT_LT(z.brackets[0].hi - z.brackets[0].lo, 1e-6);
}

TEST(Zeros, NoZerosAndDenseOracle) {
    auto r = melnikov_sequence(circle(), form("(y)dx"), 2, {0.5, 2.0, 7});
    EXPECT_EQ(count_zeros(r, 0.5, 2.0).count, 0);
    auto r2 = melnikov_sequence(elliptic(), form("(y + x^2*y - 3*y^3)dx"), 1, {0.2, 1.1, 5});
    ZeroCount z = count_zeros(r2, 0.2, 1.1);
    int oracle = 0;
    double prev = (*r2.evaluator)(0.2).value;
    for (int k = 1; k <= 400; ++k) {
        double v = (*r2.evaluator)(0.2 + 0.9 * k / 400).value;
        if ((v > 0) != (prev > 0)) ++oracle;
        prev = v;
    }
    EXPECT_EQ(z.count, oracle);
}

TEST(Zeros, DoubleZeroIsFlagged) {
    // M1 proportional to p^2 (p^2 - 2)^2 on the circle
    auto r = melnikov_sequence(circle(), form("(4*y - 4*x^2*y - 4*y^3 + x^4*y + 2*x^2*y^3 + y^5)dx"), 1, {1.0, 2.0, 11});
    ZeroOptions o;
    o.tangency_tol = 1e-2;
    ZeroCount z = count_zeros(r, 1.0, 2.0, o);
    EXPECT_EQ(z.count, 0);
    ASSERT_FALSE(z.near_tangencies.empty());
}

TEST(Export, MelnikovCsvJson) {
    auto r = melnikov_sequence(circle(), form("(y)dx"), 1, {0.5, 1.0, 3});
    EXPECT_EQ(samples_csv(r).substr(0, 15), "p,t,M_K,error\n0");
    auto j = to_json(r);
    EXPECT_EQ(j["order"], 1);
    EXPECT_EQ(j["samples"].size(), 3u);
}
