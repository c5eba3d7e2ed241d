#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "itergm/numeric.hpp"
#include "itergm/parse.hpp"

using namespace itergm;

namespace {

const char* kCircle = "(x^2 + y^2)/2";
const char* kElliptic = "y^2/2 + x^3/3 - x";
constexpr double kPi = std::numbers::pi;

Word W(std::initializer_list<int> l) { return Word{std::vector<int>(l)}; }

const Hamiltonian& elliptic() {
    static Hamiltonian H = certify(parse_bivar(kElliptic));
    return H;
}

}  // namespace

TEST(Trace, UnitCircle) {
    Hamiltonian H = certify(parse_bivar(kCircle));
    OvalTrace tr = trace_oval(H, 1.0);
    EXPECT_DOUBLE_EQ(tr.t, 0.5);
    EXPECT_NEAR(tr.arclength, 2 * kPi, 1e-8);
    EXPECT_LT(tr.closure_residual, 1e-9);
    EXPECT_EQ(tr.orientation, 1);
    for (const auto& s : tr.samples) EXPECT_NEAR(std::hypot(s[0], s[1]), 1.0, 1e-10);
    // clockwise: the first step moves to x > 0
    ASSERT_GT(tr.samples.size(), 2u);
    EXPECT_GT(tr.samples[1][0], 0);
}

TEST(Trace, EllipticOvalsClose) {
    const Hamiltonian& H = elliptic();
    for (double p : {0.2, 0.6, 1.0, 1.12}) {
        OvalTrace tr = trace_oval(H, p);
        EXPECT_LT(tr.closure_residual, 1e-8) << p;
        for (const auto& s : tr.samples) EXPECT_NEAR(H.poly.eval(s[0], s[1]), tr.t, 1e-10);
    }
}

TEST(Trace, UnboundedBranchIsNotClosed) {
    EXPECT_THROW(trace_oval(elliptic(), 2.0), NotClosed);
    EXPECT_THROW(trace_oval(elliptic(), 0.0), NotClosed);
}

TEST(Quadrature, CircleValues) {
    Hamiltonian H = certify(parse_bivar(kCircle));
    auto B = enumerate_words(1, 2);
    for (double p : {0.5, 1.0, 1.7}) {
        auto v = eval_iterated(H, p, B);
        EXPECT_EQ(v.at(W({})), 1.0);
        double i1 = kPi * p * p;
        EXPECT_NEAR(v.at(W({1})), i1, 1e-10 * i1);
        EXPECT_NEAR(v.at(W({1, 1})), i1 * i1 / 2, 1e-9 * i1 * i1);
        EXPECT_LT(v.error(W({1})), 1e-9 * i1);
    }
}

TEST(Quadrature, ShuffleRelations) {
    const Hamiltonian& H = elliptic();
    auto B = enumerate_words(H.n, 3);
    for (double p : {0.4, 0.9}) {
        auto v = eval_iterated(H, p, B);
        for (const auto& u : B->words())
            for (const auto& w : B->words()) {
                if (u.size() + w.size() > 3 || u.size() == 0 || w.size() == 0) continue;
                double lhs = v.at(u) * v.at(w), rhs = 0, err = v.error(u) + v.error(w);
                for (const auto& s : shuffle(u, w)) {
                    rhs += v.at(s);
                    err += v.error(s);
                }
                EXPECT_LT(std::abs(lhs - rhs), 10 * err) << to_string(u) << " " << to_string(w);
            }
    }
}

TEST(Quadrature, DoubledOvalIsSquare) {
    const Hamiltonian& H = elliptic();
    auto B = enumerate_words(H.n, 2);
    QuadratureOptions twice;
    twice.trace.traversals = 2;
    for (double p : {0.5, 1.0}) {
        auto one = eval_iterated(H, p, B), two = eval_iterated(H, p, B, twice);
        TruncatedSeries<double> s(B);
        for (size_t k = 0; k < B->size(); ++k) s[k] = one.values[k];
        auto sq = s * s;
        for (size_t k = 0; k < B->size(); ++k) EXPECT_NEAR(two.values[k], sq[k], 1e-7) << k;
    }
}

TEST(Quadrature, ReversedPathGivesInverse) {
    const Hamiltonian& H = elliptic();
    auto B = enumerate_words(H.n, 3);
    QuadratureOptions back;
    back.trace.orientation = -1;
    auto fw = eval_iterated(H, 0.8, B), bw = eval_iterated(H, 0.8, B, back);
    TruncatedSeries<double> s(B);
    for (size_t k = 0; k < B->size(); ++k) s[k] = fw.values[k];
    auto inv = s.inverse();
    for (size_t k = 0; k < B->size(); ++k) EXPECT_NEAR(bw.values[k], inv[k], 1e-8) << to_string(B->word(k));
}

TEST(Quadrature, GelfandLerayDerivative) {
    const Hamiltonian& H = elliptic();
    UniPoly t = restrict_to_transversal(H.poly);
    for (const auto& w : H.basic_forms) {
        PolyOneForm eta = jacobian_divide(exterior_derivative(w), H);
        for (double p : {0.5, 0.9}) {
            double h = 1e-3;
            auto at = [&](double q) { return integrate_tuples(H, q, {w}, {{0}}).values[0]; };
            double fd = (at(p + h) - at(p - h)) / (2 * h);
            fd = (4 * (at(p + h / 2) - at(p - h / 2)) / h - fd) / 3;
            double gl = integrate_tuples(H, p, {eta}, {{0}}).values[0];
            double tv = t.eval(p);
            double expect = -gl / H.m.eval(tv) * t.derivative().eval(p);
            EXPECT_NEAR(fd, expect, 1e-6 * std::max(1.0, std::abs(expect))) << to_string(w) << " p=" << p;
        }
    }
}

TEST(Quadrature, ExactFirstSlotMatchesReduction) {
    const Hamiltonian& H = elliptic();
    auto B = enumerate_words(H.n, 2);
    BivarPoly g = parse_bivar("x*y^2 + y^3 - 2*x^2");
    PolyOneForm dg = PolyOneForm::exact(g);
    auto rc = reduce_iterated({dg, H.basic_forms[0]}, H, B);
    for (double p : {0.3, 0.5, 0.7, 0.9, 1.1}) {
        auto v = eval_iterated(H, p, B);
        std::vector<Complex> vc(v.values.begin(), v.values.end());
        double direct = integrate_tuples(H, p, {dg, H.basic_forms[0]}, {{0, 1}}).values[0];
        EXPECT_NEAR(rc.evaluate(p, vc).real(), direct, 1e-7 * std::max(1.0, std::abs(direct))) << p;
    }
}

TEST(Quadrature, RandomTuplesMatchReduction) {
    const Hamiltonian& H = elliptic();
    auto B = enumerate_words(H.n, 2);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> c(-3, 3), e(0, 3);
    auto random_poly = [&] {
        BivarPoly r;
        for (int k = 0; k < 4; ++k) r.add_term(e(rng), e(rng) % 3, c(rng));
        return r;
    };
    for (int trial = 0; trial < 3; ++trial) {
        PolyOneForm a{random_poly(), random_poly()}, b{random_poly(), random_poly()};
        auto rc = reduce_iterated({a, b}, H, B);
        for (double p : {0.45, 0.95}) {
            auto v = eval_iterated(H, p, B);
            std::vector<Complex> vc(v.values.begin(), v.values.end());
            double direct = integrate_tuples(H, p, {a, b}, {{0, 1}}).values[0];
            EXPECT_NEAR(rc.evaluate(p, vc).real(), direct, 1e-7 * std::max(1.0, std::abs(direct)))
                << to_string(a) << " | " << to_string(b) << " p=" << p;
        }
    }
}

TEST(Continuation, CircleGrowth) {
    Hamiltonian H = certify(parse_bivar(kCircle));
    ConnectionMatrix om = build_connection(H, 1);
    auto v = continue_system(om, {1.0, 2.0}, {1.0, kPi});
    EXPECT_NEAR(std::abs(v[0] - 1.0), 0, 1e-12);
    EXPECT_NEAR(std::abs(v[1] - 4 * kPi), 0, 1e-10);
    auto same = continue_system(om, {Complex(1.5, 0.5)}, {1.0, 2.0});
    EXPECT_EQ(same[1], Complex(2.0));
    EXPECT_THROW(continue_system(om, {1.0, -1.0}, {1.0, kPi}), SingularityTooClose);
}

TEST(Continuation, TrivialLoop) {
    const Hamiltonian& H = elliptic();
    ConnectionMatrix om = build_connection(H, 1);
    std::vector<Complex> v0{1.0, 0.3, -0.2, 0.7, 1.1};
    std::vector<Complex> path;
    for (int k = 0; k <= 24; ++k) path.push_back(Complex(0.6, 0) + 0.2 * std::polar(1.0, 2 * kPi * k / 24));
    auto v = continue_system(om, path, v0);
    for (size_t k = 0; k < v0.size(); ++k) EXPECT_NEAR(std::abs(v[k] - v0[k]), 0, 1e-9);
    MonodromyResult m = monodromy(om, 0.6, 0.2);
    for (size_t r = 0; r < m.size; ++r)
        for (size_t c = 0; c < m.size; ++c) EXPECT_NEAR(std::abs(m.matrix[r * m.size + c] - (r == c ? 1.0 : 0.0)), 0, 1e-8);
}

TEST(Monodromy, UnipotentAroundSaddleValue) {
    const Hamiltonian& H = elliptic();
    ConnectionMatrix om = build_connection(H, 2);
    double pc = 2 / std::sqrt(3.0);
    MonodromyResult m = monodromy(om, pc, 0.3);
    const WordBasis& B = om.basis();
    auto m11 = block_of(m.matrix, m.size, B.block_begin(1), B.block_size(1));
    auto m22 = block_of(m.matrix, m.size, B.block_begin(2), B.block_size(2));
    auto e1 = clustered_eigenvalues(m11, B.block_size(1));
    for (const auto& z : e1) EXPECT_LT(std::abs(z - 1.0), 1e-6) << z;
    std::vector<Complex> prods;
    for (const auto& a : e1)
        for (const auto& b : e1) prods.push_back(a * b);
    EXPECT_LT(spectrum_distance(clustered_eigenvalues(m22, B.block_size(2)), prods), 1e-6);
    EXPECT_GT(std::abs(m.determinant), 0.5);
}

TEST(Monodromy, CriticalPreimages) {
    auto pre = critical_preimages(elliptic());
    ASSERT_EQ(pre.size(), 4u);
    for (const auto& z : pre) EXPECT_NEAR(std::abs(z), 2 / std::sqrt(3.0), 1e-12);
}

TEST(Monodromy, UnityDistance) {
    EXPECT_NEAR(unity_distance(std::polar(1.0, 2 * kPi / 7)), 0, 1e-15);
    EXPECT_GT(unity_distance(2.0), 0.9);
    EXPECT_GT(unity_distance(std::polar(1.0, 2 * kPi / 61), 60), 1e-4);
}

TEST(PF, EllipticK2) {
    const Hamiltonian& H = elliptic();
    ConnectionMatrix om = build_connection(H, 2);
    PFCheck chk = verify_pf(H, om, {0.35, 0.8});
    EXPECT_LT(chk.max_rel_error, 1e-6);
}

TEST(Export, CsvAndJson) {
    Hamiltonian H = certify(parse_bivar(kCircle));
    OvalTrace tr = trace_oval(H, 1.0);
    std::string csv = trace_csv(tr);
    EXPECT_EQ(csv.substr(0, 10), "index,x,y\n");
    auto v = eval_iterated(H, tr, enumerate_words(1, 1));
    EXPECT_NE(integrals_csv(v).find("\"[1]\","), std::string::npos);
    auto j = to_json(tr);
    EXPECT_EQ(j["orientation"], 1);
}
