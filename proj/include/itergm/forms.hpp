#pragma once

#include "itergm/poly.hpp"

namespace itergm {

// P dx + Q dy
struct PolyOneForm {
    BivarPoly P, Q;

    PolyOneForm() = default;
    PolyOneForm(BivarPoly p, BivarPoly q) : P(std::move(p)), Q(std::move(q)) {}
    static PolyOneForm exact(const BivarPoly& g) { return {g.dx(), g.dy()}; }

    bool is_zero() const { return P.is_zero() && Q.is_zero(); }
    int degree() const { return std::max(P.degree(), Q.degree()); }
    Rational norm() const { return P.norm() + Q.norm(); }

    PolyOneForm operator-() const { return {-P, -Q}; }
    PolyOneForm& operator+=(const PolyOneForm& o) { P += o.P; Q += o.Q; return *this; }
    PolyOneForm& operator-=(const PolyOneForm& o) { P -= o.P; Q -= o.Q; return *this; }
    friend PolyOneForm operator+(PolyOneForm a, const PolyOneForm& b) { return a += b; }
    friend PolyOneForm operator-(PolyOneForm a, const PolyOneForm& b) { return a -= b; }
    friend PolyOneForm operator*(const BivarPoly& f, const PolyOneForm& w) { return {f * w.P, f * w.Q}; }
    friend PolyOneForm operator*(const Rational& c, const PolyOneForm& w) { return {c * w.P, c * w.Q}; }
    bool operator==(const PolyOneForm& o) const { return P == o.P && Q == o.Q; }
};

// R dx^dy
struct PolyTwoForm {
    BivarPoly R;

    bool is_zero() const { return R.is_zero(); }
    PolyTwoForm operator-() const { return {-R}; }
    friend PolyTwoForm operator+(const PolyTwoForm& a, const PolyTwoForm& b) { return {a.R + b.R}; }
    friend PolyTwoForm operator-(const PolyTwoForm& a, const PolyTwoForm& b) { return {a.R - b.R}; }
    bool operator==(const PolyTwoForm& o) const { return R == o.R; }
};

PolyTwoForm exterior_derivative(const PolyOneForm& w);
PolyTwoForm wedge(const PolyOneForm& a, const PolyOneForm& b);
// Q(0, p): the dp coefficient after x = 0, dx = 0
UniPoly pullback_to_transversal(const PolyOneForm& w);

// total ordering, used to key caches on forms
struct FormLess {
    bool operator()(const PolyOneForm& a, const PolyOneForm& b) const;
};
bool poly_less(const BivarPoly& a, const BivarPoly& b);

}  // namespace itergm
