#include "itergm/forms.hpp"

#include <algorithm>

namespace itergm {

PolyTwoForm exterior_derivative(const PolyOneForm& w) { return {w.Q.dx() - w.P.dy()}; }

PolyTwoForm wedge(const PolyOneForm& a, const PolyOneForm& b) { return {a.P * b.Q - a.Q * b.P}; }

UniPoly pullback_to_transversal(const PolyOneForm& w) { return restrict_to_transversal(w.Q); }

bool poly_less(const BivarPoly& a, const BivarPoly& b) {
    const auto& ta = a.terms();
    const auto& tb = b.terms();
    auto ia = ta.begin();
    auto ib = tb.begin();
    GrlexLess less;
    for (; ia != ta.end() && ib != tb.end(); ++ia, ++ib) {
        if (less(ia->first, ib->first)) return true;
        if (less(ib->first, ia->first)) return false;
        if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == ta.end() && ib != tb.end();
}

bool FormLess::operator()(const PolyOneForm& a, const PolyOneForm& b) const {
    if (poly_less(a.P, b.P)) return true;
    if (poly_less(b.P, a.P)) return false;
    return poly_less(a.Q, b.Q);
}

}  // namespace itergm
