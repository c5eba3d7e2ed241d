#include "itergm/poly.hpp"

#include <algorithm>
#include <cmath>

namespace itergm {

std::string to_string(const Rational& q) { return q.get_str(); }

Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

// ---- BivarPoly ----

BivarPoly::BivarPoly(const Rational& c) { add_term(0, 0, c); }

BivarPoly BivarPoly::monomial(int i, int j, const Rational& c) {
    BivarPoly r;
    r.add_term(i, j, c);
    return r;
}

int BivarPoly::degree() const {
    return terms_.empty() ? -1 : terms_.rbegin()->first.total();
}

Rational BivarPoly::coeff(int i, int j) const {
    auto it = terms_.find({i, j});
    return it == terms_.end() ? Rational(0) : it->second;
}

void BivarPoly::add_term(int i, int j, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace({i, j}, c);
    if (fresh) {
        it->second.canonicalize();
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

BivarPoly BivarPoly::operator-() const {
    BivarPoly r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
}

BivarPoly& BivarPoly::operator+=(const BivarPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e.i, e.j, c);
    return *this;
}

BivarPoly& BivarPoly::operator-=(const BivarPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e.i, e.j, -c);
    return *this;
}

BivarPoly& BivarPoly::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_) v *= c;
    return *this;
}

BivarPoly operator*(const BivarPoly& a, const BivarPoly& b) {
    BivarPoly r;
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) r.add_term(ea.i + eb.i, ea.j + eb.j, ca * cb);
    return r;
}

BivarPoly BivarPoly::pow(int k) const {
    BivarPoly r(1), base = *this;
    while (k > 0) {
        if (k & 1) r = r * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return r;
}

BivarPoly BivarPoly::dx() const {
    BivarPoly r;
    for (const auto& [e, c] : terms_)
        if (e.i > 0) r.add_term(e.i - 1, e.j, c * e.i);
    return r;
}

BivarPoly BivarPoly::dy() const {
    BivarPoly r;
    for (const auto& [e, c] : terms_)
        if (e.j > 0) r.add_term(e.i, e.j - 1, c * e.j);
    return r;
}

namespace {

template <class T>
T ipow(T base, int k) {
    T r(1);
    while (k > 0) {
        if (k & 1) r *= base;
        k >>= 1;
        if (k) base *= base;
    }
    return r;
}

}  // namespace

Rational BivarPoly::eval(const Rational& x, const Rational& y) const {
    Rational s = 0;
    for (const auto& [e, c] : terms_) s += c * ipow(x, e.i) * ipow(y, e.j);
    return s;
}

double BivarPoly::eval(double x, double y) const {
    double s = 0;
    for (const auto& [e, c] : terms_) s += c.get_d() * ipow(x, e.i) * ipow(y, e.j);
    return s;
}

Complex BivarPoly::eval(Complex x, Complex y) const {
    Complex s = 0;
    for (const auto& [e, c] : terms_) s += c.get_d() * ipow(x, e.i) * ipow(y, e.j);
    return s;
}

Rational BivarPoly::norm() const {
    Rational s = 0;
    for (const auto& [e, c] : terms_) s += rational_abs(c);
    return s;
}

int BivarPoly::weighted_degree(int wx, int wy) const {
    int w = -1;
    for (const auto& [e, c] : terms_) w = std::max(w, e.i * wx + e.j * wy);
    return w;
}

BivarPoly BivarPoly::weighted_part(int wx, int wy, int w) const {
    BivarPoly r;
    for (const auto& [e, c] : terms_)
        if (e.i * wx + e.j * wy == w) r.terms_.emplace(e, c);
    return r;
}

// ---- UniPoly ----

char var_name(Var v) {
    switch (v) {
        case Var::h: return 'h';
        case Var::t: return 't';
        case Var::p: return 'p';
    }
    return '?';
}

UniPoly::UniPoly(Var v, std::vector<Rational> coeffs) : var_(v), c_(std::move(coeffs)) {
    for (auto& c : c_) c.canonicalize();
    trim();
}

UniPoly UniPoly::constant(Var v, const Rational& c) { return UniPoly(v, {c}); }

UniPoly UniPoly::variable(Var v) { return UniPoly(v, {0, 1}); }

void UniPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational UniPoly::coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : Rational(0);
}

Rational UniPoly::lead() const { return c_.empty() ? Rational(0) : c_.back(); }

UniPoly UniPoly::with_var(Var v) const {
    UniPoly r = *this;
    r.var_ = v;
    return r;
}

UniPoly UniPoly::operator-() const {
    UniPoly r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
}

UniPoly& UniPoly::operator+=(const UniPoly& o) {
    if (c_.size() < o.c_.size()) c_.resize(o.c_.size());
    for (size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
}

UniPoly& UniPoly::operator-=(const UniPoly& o) {
    if (c_.size() < o.c_.size()) c_.resize(o.c_.size());
    for (size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
}

UniPoly& UniPoly::operator*=(const Rational& c) {
    for (auto& v : c_) v *= c;
    trim();
    return *this;
}

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return UniPoly(a.var_);
    std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
    for (size_t i = 0; i < a.c_.size(); ++i) {
        if (a.c_[i] == 0) continue;
        for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    return UniPoly(a.var_, std::move(c));
}

UniPoly UniPoly::derivative() const {
    std::vector<Rational> c;
    for (size_t k = 1; k < c_.size(); ++k) c.push_back(c_[k] * static_cast<long>(k));
    return UniPoly(var_, std::move(c));
}

UniPoly UniPoly::monic() const {
    if (is_zero()) return *this;
    UniPoly r = *this;
    Rational l = lead();
    for (auto& v : r.c_) v /= l;
    return r;
}

UniPoly UniPoly::compose(const UniPoly& g) const {
    UniPoly r(g.var());
    for (int k = degree(); k >= 0; --k) r = r * g + UniPoly::constant(g.var(), c_[k]);
    return r;
}

Rational UniPoly::eval(const Rational& z) const {
    Rational s = 0;
    for (int k = degree(); k >= 0; --k) s = s * z + c_[k];
    return s;
}

double UniPoly::eval(double z) const {
    double s = 0;
    for (int k = degree(); k >= 0; --k) s = s * z + c_[k].get_d();
    return s;
}

Complex UniPoly::eval(Complex z) const {
    Complex s = 0;
    for (int k = degree(); k >= 0; --k) s = s * z + c_[k].get_d();
    return s;
}

Rational UniPoly::norm() const {
    Rational s = 0;
    for (const auto& c : c_) s += rational_abs(c);
    return s;
}

void divmod(const UniPoly& a, const UniPoly& b, UniPoly& q, UniPoly& r) {
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Rational> rem = a.coeffs();
    int db = b.degree();
    std::vector<Rational> quo(std::max(0, a.degree() - db + 1));
    Rational lb = b.lead();
    for (int k = a.degree(); k >= db; --k) {
        if (rem[k] == 0) continue;
        Rational f = rem[k] / lb;
        quo[k - db] = f;
        for (int m = 0; m <= db; ++m) rem[k - db + m] -= f * b.coeffs()[m];
    }
    q = UniPoly(a.var(), std::move(quo));
    r = UniPoly(a.var(), std::move(rem));
}

UniPoly gcd(UniPoly a, UniPoly b) {
    while (!b.is_zero()) {
        UniPoly q, r;
        divmod(a, b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

BivarPoly compose_with_hamiltonian(const UniPoly& f, const BivarPoly& H) {
    BivarPoly r;
    for (int k = f.degree(); k >= 0; --k) r = r * H + BivarPoly(f.coeffs()[k]);
    return r;
}

UniPoly restrict_to_transversal(const BivarPoly& H) {
    std::vector<Rational> c;
    for (const auto& [e, v] : H.terms()) {
        if (e.i != 0) continue;
        if (static_cast<int>(c.size()) <= e.j) c.resize(e.j + 1);
        c[e.j] += v;
    }
    return UniPoly(Var::p, std::move(c));
}

// ---- RationalFunction ----

RationalFunction::RationalFunction(const UniPoly& num)
    : num_(num), den_(UniPoly::constant(num.var(), 1)) {}

RationalFunction::RationalFunction(UniPoly num, UniPoly den) {
    if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
    num = num.with_var(den.var());
    if (num.is_zero()) {
        num_ = UniPoly(den.var());
        den_ = UniPoly::constant(den.var(), 1);
        return;
    }
    UniPoly g = gcd(num, den);
    UniPoly q, r;
    if (g.degree() > 0) {
        divmod(num, g, q, r);
        num = q;
        divmod(den, g, q, r);
        den = q;
    }
    Rational l = den.lead();
    num_ = num * (1 / l);
    den_ = den.monic();
}

RationalFunction RationalFunction::constant(Var v, const Rational& c) {
    return RationalFunction(UniPoly::constant(v, c));
}

int RationalFunction::degree() const {
    return std::max(0, num_.degree()) + den_.degree();
}

RationalFunction RationalFunction::operator-() const {
    RationalFunction r = *this;
    r.num_ = -r.num_;
    return r;
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    if (a.is_zero() || b.is_zero()) return RationalFunction(UniPoly(a.var()));
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw std::domain_error("rational function division by zero");
    return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

RationalFunction RationalFunction::derivative() const {
    return RationalFunction(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
}

Complex RationalFunction::eval(Complex z) const { return num_.eval(z) / den_.eval(z); }

double RationalFunction::eval(double z) const { return num_.eval(z) / den_.eval(z); }

mpz_class RationalFunction::size() const {
    mpz_class l = 1, g = 0;
    for (const auto* p : {&num_, &den_})
        for (const auto& c : p->coeffs()) l = lcm(l, mpz_class(c.get_den()));
    for (const auto* p : {&num_, &den_})
        for (const auto& c : p->coeffs()) {
            mpz_class v = mpz_class(c.get_num()) * (l / c.get_den());
            g = gcd(g, v);
        }
    if (g == 0) return 0;
    mpz_class s = 0;
    for (const auto* p : {&num_, &den_})
        for (const auto& c : p->coeffs()) s += abs(mpz_class(c.get_num()) * (l / c.get_den()) / g);
    return s;
}

}  // namespace itergm
