#include "itergm/parse.hpp"

#include <cctype>

#include "itergm/errors.hpp"

namespace itergm {

namespace {

// Recursive descent over + - * / ^ ( ) with rational literals.
// Ops maps variable letters and constants into the value type.
template <class T, class Ops>
class ExprParser {
public:
    ExprParser(std::string_view s, Ops ops) : s_(s), ops_(std::move(ops)) {}

    T parse_all() {
        T v = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

    T expr() {
        skip();
        T v = term();
        for (;;) {
            skip();
            if (eat('+')) v = v + term();
            else if (eat('-')) v = v - term();
            else return v;
        }
    }

    size_t pos() const { return pos_; }
    void set_pos(size_t p) { pos_ = p; }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool eat_word(std::string_view w) {
        skip();
        if (s_.substr(pos_, w.size()) == w) {
            pos_ += w.size();
            return true;
        }
        return false;
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at offset " + std::to_string(pos_) + " in \"" + std::string(s_) + "\"");
    }

private:
    T term() {
        T v = unary();
        for (;;) {
            skip();
            if (eat('*')) v = v * unary();
            else if (eat('/')) v = ops_.divide(v, unary(), *this);
            else return v;
        }
    }

    T unary() {
        skip();
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    T power() {
        T base = atom();
        skip();
        if (eat('^')) {
            skip();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected integer exponent");
            int k = std::stoi(std::string(s_.substr(start, pos_ - start)));
            T r = ops_.one();
            for (int i = 0; i < k; ++i) r = r * base;
            return r;
        }
        return base;
    }

    T atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            T v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return ops_.constant(number());
        if (std::isalpha(static_cast<unsigned char>(c))) {
            // do not swallow the d of dx/dy in form syntax
            if (c == 'd' && pos_ + 1 < s_.size() && (s_[pos_ + 1] == 'x' || s_[pos_ + 1] == 'y'))
                fail("unexpected differential");
            ++pos_;
            return ops_.variable(c, *this);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Rational number() {
        size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        mpz_class ip = 0, frac = 0, scale = 1;
        if (pos_ > start) ip = mpz_class(std::string(s_.substr(start, pos_ - start)));
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            size_t fs = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ > fs) {
                frac = mpz_class(std::string(s_.substr(fs, pos_ - fs)));
                mpz_ui_pow_ui(scale.get_mpz_t(), 10, pos_ - fs);
            }
        }
        if (pos_ == start) fail("malformed number");
        Rational q(ip * scale + frac, scale);
        q.canonicalize();
        return q;
    }

    std::string_view s_;
    size_t pos_ = 0;
    Ops ops_;
};

struct BivarOps {
    BivarPoly one() const { return BivarPoly(1); }
    BivarPoly constant(const Rational& q) const { return BivarPoly(q); }
    template <class P>
    BivarPoly variable(char c, P& parser) const {
        if (c == 'x') return BivarPoly::x();
        if (c == 'y') return BivarPoly::y();
        parser.fail(std::string("unknown variable '") + c + "'");
    }
    template <class P>
    BivarPoly divide(const BivarPoly& a, const BivarPoly& b, P& parser) const {
        if (b.degree() != 0) parser.fail("division by a non-constant polynomial");
        return a * Rational(1 / b.coeff(0, 0));
    }
};

struct UniOps {
    Var v;
    UniPoly one() const { return UniPoly::constant(v, 1); }
    UniPoly constant(const Rational& q) const { return UniPoly::constant(v, q); }
    template <class P>
    UniPoly variable(char c, P& parser) const {
        if (c == var_name(v)) return UniPoly::variable(v);
        parser.fail(std::string("unknown variable '") + c + "'");
    }
    template <class P>
    UniPoly divide(const UniPoly& a, const UniPoly& b, P& parser) const {
        if (b.degree() != 0) parser.fail("division by a non-constant polynomial");
        return a * Rational(1 / b.coeff(0));
    }
};

struct RatOps {
    Var v;
    RationalFunction one() const { return RationalFunction::constant(v, 1); }
    RationalFunction constant(const Rational& q) const { return RationalFunction::constant(v, q); }
    template <class P>
    RationalFunction variable(char c, P& parser) const {
        if (c == var_name(v)) return RationalFunction(UniPoly::variable(v));
        parser.fail(std::string("unknown variable '") + c + "'");
    }
    template <class P>
    RationalFunction divide(const RationalFunction& a, const RationalFunction& b, P& parser) const {
        if (b.is_zero()) parser.fail("division by zero");
        return a / b;
    }
};

std::string coeff_prefix(const Rational& c, bool first, bool has_monomial) {
    std::string out;
    Rational a = rational_abs(c);
    if (c < 0) out = first ? "-" : " - ";
    else if (!first) out = " + ";
    if (!has_monomial) return out + a.get_str();
    if (a != 1) out += a.get_str() + "*";
    return out;
}

std::string monomial_str(char v, int k) {
    if (k == 1) return std::string(1, v);
    return std::string(1, v) + "^" + std::to_string(k);
}

}  // namespace

Rational parse_rational(std::string_view s) {
    ExprParser<BivarPoly, BivarOps> p(s, BivarOps{});
    BivarPoly v = p.parse_all();
    if (v.degree() > 0) throw ParseError("expected a rational constant, got \"" + std::string(s) + "\"");
    return v.coeff(0, 0);
}

BivarPoly parse_bivar(std::string_view s) { return ExprParser<BivarPoly, BivarOps>(s, BivarOps{}).parse_all(); }

UniPoly parse_unipoly(std::string_view s, Var v) { return ExprParser<UniPoly, UniOps>(s, UniOps{v}).parse_all(); }

RationalFunction parse_ratfunc(std::string_view s, Var v) {
    return ExprParser<RationalFunction, RatOps>(s, RatOps{v}).parse_all();
}

PolyOneForm parse_one_form(std::string_view s) {
    ExprParser<BivarPoly, BivarOps> p(s, BivarOps{});
    PolyOneForm w;
    p.skip();
    if (p.eat_word("0")) {
        p.skip();
        if (p.pos() == s.size()) return w;
        p.fail("trailing input after 0");
    }
    bool first = true;
    for (;;) {
        int sign = 1;
        if (!first) {
            if (p.eat('+')) sign = 1;
            else if (p.eat('-')) sign = -1;
            else break;
        } else if (p.eat('-')) {
            sign = -1;
        }
        first = false;
        if (!p.eat('(')) p.fail("expected '(' opening a form coefficient");
        BivarPoly c = p.expr();
        if (!p.eat(')')) p.fail("expected ')'");
        if (sign < 0) c = -c;
        if (p.eat_word("dx")) w.P += c;
        else if (p.eat_word("dy")) w.Q += c;
        else p.fail("expected dx or dy");
    }
    p.skip();
    if (p.pos() != s.size()) p.fail("trailing input");
    return w;
}

PolyTwoForm parse_two_form(std::string_view s) {
    ExprParser<BivarPoly, BivarOps> p(s, BivarOps{});
    p.skip();
    if (p.eat_word("0")) {
        p.skip();
        if (p.pos() == s.size()) return {};
        p.fail("trailing input after 0");
    }
    int sign = p.eat('-') ? -1 : 1;
    if (!p.eat('(')) p.fail("expected '('");
    BivarPoly c = p.expr();
    if (!p.eat(')')) p.fail("expected ')'");
    if (!p.eat_word("dx^dy")) p.fail("expected dx^dy");
    p.skip();
    if (p.pos() != s.size()) p.fail("trailing input");
    return {sign < 0 ? -c : c};
}

std::string to_string(const BivarPoly& poly) {
    if (poly.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (auto it = poly.terms().rbegin(); it != poly.terms().rend(); ++it) {
        const auto& [e, c] = *it;
        bool mono = e.total() > 0;
        out += coeff_prefix(c, first, mono);
        if (e.i > 0) out += monomial_str('x', e.i);
        if (e.i > 0 && e.j > 0) out += "*";
        if (e.j > 0) out += monomial_str('y', e.j);
        first = false;
    }
    return out;
}

std::string to_string(const UniPoly& poly) {
    if (poly.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (int k = poly.degree(); k >= 0; --k) {
        const Rational& c = poly.coeffs()[k];
        if (c == 0) continue;
        out += coeff_prefix(c, first, k > 0);
        if (k > 0) out += monomial_str(var_name(poly.var()), k);
        first = false;
    }
    return out;
}

std::string to_string(const RationalFunction& r) {
    if (r.den().degree() == 0) return to_string(r.num());
    return "(" + to_string(r.num()) + ")/(" + to_string(r.den()) + ")";
}

std::string to_string(const PolyOneForm& w) { return "(" + to_string(w.P) + ")dx + (" + to_string(w.Q) + ")dy"; }

std::string to_string(const PolyTwoForm& m) { return "(" + to_string(m.R) + ")dx^dy"; }

}  // namespace itergm
