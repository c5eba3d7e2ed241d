#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace itergm {

using Rational = mpq_class;
using Complex = std::complex<double>;

std::string to_string(const Rational& q);
Rational rational_abs(const Rational& q);

// x^i y^j
struct Exponent {
    int i = 0;
    int j = 0;
    int total() const { return i + j; }
    bool operator==(const Exponent&) const = default;
};

// graded lex with x > y; ascending iteration runs 1, y, x, y^2, xy, x^2, ...
struct GrlexLess {
    bool operator()(const Exponent& a, const Exponent& b) const {
        if (a.total() != b.total()) return a.total() < b.total();
        return a.i < b.i;
    }
};

class BivarPoly {
public:
    using Terms = std::map<Exponent, Rational, GrlexLess>;

    BivarPoly() = default;
    BivarPoly(const Rational& c);  // NOLINT: constants convert implicitly
    BivarPoly(int c) : BivarPoly(Rational(c)) {}

    static BivarPoly monomial(int i, int j, const Rational& c = 1);
    static BivarPoly x() { return monomial(1, 0); }
    static BivarPoly y() { return monomial(0, 1); }

    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int degree() const;  // -1 for zero
    Rational coeff(int i, int j) const;
    void add_term(int i, int j, const Rational& c);

    BivarPoly operator-() const;
    BivarPoly& operator+=(const BivarPoly& o);
    BivarPoly& operator-=(const BivarPoly& o);
    BivarPoly& operator*=(const Rational& c);
    friend BivarPoly operator+(BivarPoly a, const BivarPoly& b) { return a += b; }
    friend BivarPoly operator-(BivarPoly a, const BivarPoly& b) { return a -= b; }
    friend BivarPoly operator*(const BivarPoly& a, const BivarPoly& b);
    friend BivarPoly operator*(BivarPoly a, const Rational& c) { return a *= c; }
    friend BivarPoly operator*(const Rational& c, BivarPoly a) { return a *= c; }
    bool operator==(const BivarPoly& o) const { return terms_ == o.terms_; }

    BivarPoly pow(int k) const;
    BivarPoly dx() const;
    BivarPoly dy() const;

    Rational eval(const Rational& x, const Rational& y) const;
    double eval(double x, double y) const;
    Complex eval(Complex x, Complex y) const;

    // sum of |coefficients|
    Rational norm() const;

    int weighted_degree(int wx, int wy) const;  // -1 for zero
    BivarPoly weighted_part(int wx, int wy, int w) const;

private:
    Terms terms_;
};

enum class Var { h, t, p };
char var_name(Var v);

// dense, c[k] is the coefficient of var^k
class UniPoly {
public:
    UniPoly() = default;
    explicit UniPoly(Var v) : var_(v) {}
    UniPoly(Var v, std::vector<Rational> coeffs);
    static UniPoly constant(Var v, const Rational& c);
    static UniPoly variable(Var v);

    Var var() const { return var_; }
    const std::vector<Rational>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    Rational coeff(int k) const;
    Rational lead() const;
    UniPoly with_var(Var v) const;

    UniPoly operator-() const;
    UniPoly& operator+=(const UniPoly& o);
    UniPoly& operator-=(const UniPoly& o);
    UniPoly& operator*=(const Rational& c);
    friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
    friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
    friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
    friend UniPoly operator*(UniPoly a, const Rational& c) { return a *= c; }
    friend UniPoly operator*(const Rational& c, UniPoly a) { return a *= c; }
    bool operator==(const UniPoly& o) const { return var_ == o.var_ && c_ == o.c_; }

    UniPoly derivative() const;
    UniPoly monic() const;
    // f(g(.)), result carries g's variable
    UniPoly compose(const UniPoly& g) const;

    Rational eval(const Rational& z) const;
    double eval(double z) const;
    Complex eval(Complex z) const;

    Rational norm() const;

private:
    void trim();
    Var var_ = Var::h;
    std::vector<Rational> c_;
};

void divmod(const UniPoly& a, const UniPoly& b, UniPoly& q, UniPoly& r);
UniPoly gcd(UniPoly a, UniPoly b);  // monic, zero if both zero

// f(H(x, y))
BivarPoly compose_with_hamiltonian(const UniPoly& f, const BivarPoly& H);
// H(0, p) as a polynomial in p
UniPoly restrict_to_transversal(const BivarPoly& H);

// reduced, denominator monic
class RationalFunction {
public:
    RationalFunction() : num_(Var::p), den_(UniPoly::constant(Var::p, 1)) {}
    RationalFunction(const UniPoly& num);  // NOLINT
    RationalFunction(UniPoly num, UniPoly den);
    static RationalFunction constant(Var v, const Rational& c);

    const UniPoly& num() const { return num_; }
    const UniPoly& den() const { return den_; }
    Var var() const { return num_.var(); }
    bool is_zero() const { return num_.is_zero(); }
    int degree() const;

    RationalFunction operator-() const;
    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
    RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
    bool operator==(const RationalFunction& o) const { return num_ == o.num_ && den_ == o.den_; }

    RationalFunction derivative() const;
    Complex eval(Complex z) const;
    double eval(double z) const;

    // min ||P|| + ||Q|| over integer representations P/Q
    mpz_class size() const;

private:
    UniPoly num_, den_;
};

}  // namespace itergm
