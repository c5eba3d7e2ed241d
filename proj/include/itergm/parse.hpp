#pragma once

#include <string>
#include <ostream>
#include <string_view>

#include "itergm/forms.hpp"
#include "itergm/poly.hpp"

namespace itergm {

Rational parse_rational(std::string_view s);
BivarPoly parse_bivar(std::string_view s);
UniPoly parse_unipoly(std::string_view s, Var v);
RationalFunction parse_ratfunc(std::string_view s, Var v);
PolyOneForm parse_one_form(std::string_view s);
PolyTwoForm parse_two_form(std::string_view s);

std::string to_string(const BivarPoly& p);
std::string to_string(const UniPoly& p);
std::string to_string(const RationalFunction& r);
std::string to_string(const PolyOneForm& w);
std::string to_string(const PolyTwoForm& m);

}  // namespace itergm

namespace itergm {
// gtest pretty-printing hooks
inline void PrintTo(const BivarPoly& p, std::ostream* os) { *os << to_string(p); }
inline void PrintTo(const UniPoly& p, std::ostream* os) { *os << to_string(p); }
inline void PrintTo(const RationalFunction& r, std::ostream* os) { *os << to_string(r); }
inline void PrintTo(const PolyOneForm& w, std::ostream* os) { *os << to_string(w); }
inline void PrintTo(const PolyTwoForm& m, std::ostream* os) { *os << to_string(m); }
}  // namespace itergm
