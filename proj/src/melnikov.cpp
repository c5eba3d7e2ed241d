#include "itergm/melnikov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "itergm/parse.hpp"
#include "return_flow.hpp"

namespace itergm {

namespace {

class FactorBuilder {
public:
    FactorBuilder(const Hamiltonian& H, const PolyOneForm& omega)
        : H_(H), omega_(omega), level_(restrict_to_transversal(H.poly)) {
        inv_m_ = RationalFunction(UniPoly::constant(Var::p, 1), H.m.compose(level_));
        dp_dt_ = RationalFunction(UniPoly::constant(Var::p, 1), level_.derivative());
        hy0_ = restrict_to_transversal(H.poly.dy());
        eta_omega_ = eta(exterior_derivative(omega));
    }

    PrimitiveSum next(const PrimitiveSum& f) {
        acc_.clear();
        order_.clear();
        for (const auto& [R, th] : f) {
            size_t k = th.size();
            RationalFunction gl = -(R * inv_m_);  // coefficient carried by every Gelfand-Leray letter
            add(R.derivative() * dp_dt_, cat({omega_}, th));
            add(gl, cat({eta_omega_}, th));
            if (k == 0) continue;
            std::vector<PolyOneForm> tail(th.begin() + 1, th.end());
            add(gl, cat({eta(wedge(th[0], omega_))}, tail));
            // transverse derivative of F_theta, integrated against omega
            for (size_t i = 0; i < k; ++i) {
                auto w = th;
                w[i] = eta(exterior_derivative(th[i]));
                add(gl, cat({omega_}, w));
            }
            for (size_t i = 0; i + 1 < k; ++i) {
                std::vector<PolyOneForm> w(th.begin(), th.begin() + i);
                w.push_back(eta(wedge(th[i], th[i + 1])));
                w.insert(w.end(), th.begin() + i + 2, th.end());
                add(-gl, cat({omega_}, w));
            }
            UniPoly q0 = restrict_to_transversal(th[k - 1].Q);
            if (!q0.is_zero()) {
                RationalFunction c(q0, hy0_);
                add(-(R * c), cat({omega_}, std::vector<PolyOneForm>(th.begin(), th.end() - 1)));
            }
        }
        PrimitiveSum out;
        for (const auto& key : order_) {
            const auto& t = acc_.at(key);
            if (!t.coeff.is_zero()) out.push_back(t);
        }
        return out;
    }

private:
    static std::vector<PolyOneForm> cat(std::vector<PolyOneForm> a, const std::vector<PolyOneForm>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    }

    PolyOneForm eta(const PolyTwoForm& mu) {
        std::string k = to_string(mu);
        auto it = eta_cache_.find(k);
        if (it != eta_cache_.end()) return it->second;
        return eta_cache_[k] = mu.R.is_zero() ? PolyOneForm{} : jacobian_divide(mu, H_);
    }

    void add(const RationalFunction& c, const std::vector<PolyOneForm>& letters) {
        if (c.is_zero()) return;
        for (const auto& l : letters)
            if (l.is_zero()) return;
        std::string key;
        for (const auto& l : letters) key += to_string(l) + "|";
        auto it = acc_.find(key);
        if (it == acc_.end()) {
            acc_.emplace(key, PrimitiveTerm{c, letters});
            order_.push_back(key);
        } else {
            it->second.coeff = it->second.coeff + c;
        }
    }

    const Hamiltonian& H_;
    PolyOneForm omega_, eta_omega_;
    UniPoly level_, hy0_{Var::p};
    RationalFunction inv_m_, dp_dt_;
    std::map<std::string, PolyOneForm> eta_cache_;
    std::map<std::string, PrimitiveTerm> acc_;
    std::vector<std::string> order_;
};

}  // namespace

PrimitiveSum next_factor(const PrimitiveSum& f, const PolyOneForm& omega, const Hamiltonian& H) {
    return FactorBuilder(H, omega).next(f);
}

PrimitiveSum melnikov_factor(const PolyOneForm& omega, const Hamiltonian& H, int k) {
    PrimitiveSum f{{RationalFunction::constant(Var::p, 1), {}}};
    FactorBuilder b(H, omega);
    for (int j = 1; j < k; ++j) f = b.next(f);
    return f;
}

MelnikovEvaluator::MelnikovEvaluator(const Hamiltonian& H, const PolyOneForm& omega, const PrimitiveSum& f,
                                     QuadratureOptions opts)
    : H_(H), level_(restrict_to_transversal(H.poly)), opts_(std::move(opts)) {
    opts_.trace.keep_samples = false;
    std::map<std::string, int> index;
    auto letter = [&](const PolyOneForm& w) {
        auto [it, fresh] = index.try_emplace(to_string(w), static_cast<int>(letters_.size()));
        if (fresh) letters_.push_back(w);
        return it->second;
    };
    int om = letter(omega);
    for (const auto& [c, th] : f) {
        std::vector<int> tup{om};
        for (const auto& l : th) tup.push_back(letter(l));
        tuples_.push_back(std::move(tup));
        coeffs_.push_back(c);
    }
}

MelnikovEvaluator::Value MelnikovEvaluator::operator()(double p) const {
    Value v;
    v.p = p;
    v.t = level_.eval(p);
    if (tuples_.empty()) return v;
    TupleIntegrals ti = integrate_tuples(H_, p, letters_, tuples_, opts_);
    double sum = 0, err = 0;
    for (size_t k = 0; k < tuples_.size(); ++k) {
        double c = coeffs_[k].eval(p);
        sum += c * ti.values[k];
        err += std::abs(c) * ti.errors[k];
    }
    v.value = -sum;
    v.error = err;
    v.arclength = ti.trace.arclength;
    v.p_chart = v.value / level_.derivative().eval(p);
    return v;
}

std::vector<double> NestInterval::points() const {
    std::vector<double> out;
    if (samples <= 1) return {0.5 * (lo + hi)};
    for (int k = 0; k < samples; ++k) out.push_back(lo + (hi - lo) * k / (samples - 1));
    return out;
}

MelnikovReport melnikov_sequence(const Hamiltonian& H, const PerturbationForm& omega, int K_max,
                                 const NestInterval& nest, const MelnikovOptions& opts) {
    if (!H.engine || !H.genericity.petrov_basis_ok) throw GenericityViolation("Hamiltonian is not certified");
    if (omega.omega.is_zero()) throw std::invalid_argument("perturbation form is zero");
    MelnikovReport rep;
    std::vector<double> pts = nest.points();
    PrimitiveSum f{{RationalFunction::constant(Var::p, 1), {}}};
    FactorBuilder builder(H, omega.omega);
    std::string trail;
    for (int j = 1; j <= K_max; ++j) {
        if (j > 1) f = builder.next(f);
        auto ev = std::make_shared<const MelnikovEvaluator>(H, omega.omega, f, opts.quadrature);
        ExactnessLog lg;
        lg.j = j;
        lg.vanishing = true;
        std::vector<MelnikovEvaluator::Value> vals;
        for (double p : pts) {
            auto v = (*ev)(p);
            double tol = opts.vanishing_tol * v.arclength;
            lg.max_abs = std::max(lg.max_abs, std::abs(v.value));
            lg.tolerance = std::max(lg.tolerance, tol);
            if (!(std::abs(v.value) <= tol)) lg.vanishing = false;
            vals.push_back(v);
        }
        if (j == 1) {
            PetrovDecomposition dec = petrov_decompose(omega.omega, H);
            lg.petrov_zero = std::all_of(dec.f_coeffs.begin(), dec.f_coeffs.end(),
                                         [](const UniPoly& u) { return u.is_zero(); });
        }
        rep.log.push_back(lg);
        char buf[96];
        std::snprintf(buf, sizeof buf, " j=%d max=%.3g", j, lg.max_abs);
        trail += buf;
        if (!lg.vanishing) {
            rep.order = j;
            rep.samples = std::move(vals);
            rep.terms = f.size();
            rep.evaluator = ev;
            rep.vanishing_tol = opts.vanishing_tol;
            if (opts.symbolic && j <= 3) rep.symbolic = reduce_melnikov_symbolic(H, omega, j);
            return rep;
        }
    }
    throw OrderExceeded("all of omega_1..omega_" + std::to_string(K_max) +
                        " vanish on the nest (possible center or integrable perturbation):" + trail);
}

ReducedCombination reduce_melnikov_symbolic(const Hamiltonian& H, const PerturbationForm& omega, int K) {
    if (K < 1 || K > 3) throw CapacityExceeded("symbolic Melnikov reduction is limited to 1 <= K <= 3");
    PrimitiveSum f = melnikov_factor(omega.omega, H, K);
    IteratedReducer red(H, enumerate_words(H.n, K));
    std::map<Word, RationalFunction> acc;
    for (const auto& [c, th] : f) {
        std::vector<PolyOneForm> forms{omega.omega};
        forms.insert(forms.end(), th.begin(), th.end());
        for (const auto& [w, h] : red.reduce(forms).coeffs) acc[w] = acc[w] - c * h;
    }
    ReducedCombination rc;
    rc.basis = red.basis();
    for (auto& [w, c] : acc)
        if (!c.is_zero()) rc.coeffs.emplace(w, std::move(c));
    return rc;
}

ZeroCount count_zeros(const MelnikovReport& report, double p_lo, double p_hi, const ZeroOptions& opts) {
    if (!report.evaluator) throw std::invalid_argument("report carries no evaluator");
    if (!(p_lo < p_hi)) throw std::invalid_argument("empty zero-search interval");
    const MelnikovEvaluator& M = *report.evaluator;
    ZeroCount out;
    std::map<double, MelnikovEvaluator::Value> probes;
    for (const auto& s : report.samples)
        if (s.p >= p_lo && s.p <= p_hi) probes[s.p] = s;
    for (int k = 0; k < opts.grid; ++k) {
        double p = opts.grid > 1 ? p_lo + (p_hi - p_lo) * k / (opts.grid - 1) : 0.5 * (p_lo + p_hi);
        if (!probes.count(p)) {
            probes[p] = M(p);
            ++out.evaluations;
        }
    }
    auto sign = [](const MelnikovEvaluator::Value& v) { return std::abs(v.value) <= v.error ? 0 : (v.value > 0 ? 1 : -1); };
    auto tol_of = [&](const MelnikovEvaluator::Value& v) {
        return opts.tangency_tol >= 0 ? opts.tangency_tol : std::max(report.vanishing_tol * v.arclength, 10 * v.error);
    };

    std::vector<MelnikovEvaluator::Value> v;
    for (const auto& [p, val] : probes) v.push_back(val);
    for (size_t k = 0; k < v.size(); ++k) {
        int s = sign(v[k]);
        if (s == 0) {
            // undecided sign at a probe: look just around it
            double a = std::max(p_lo, v[k].p - opts.width / 2), b = std::min(p_hi, v[k].p + opts.width / 2);
            auto va = M(a), vb = M(b);
            out.evaluations += 2;
            if (sign(va) * sign(vb) < 0) {
                out.brackets.push_back({a, b, 1});
            } else {
                out.near_tangencies.push_back(v[k].p);
            }
            continue;
        }
        if (k + 1 < v.size() && sign(v[k + 1]) == -s) {
            double a = v[k].p, b = v[k + 1].p;
            int sa = s;
            while (b - a > opts.width) {
                double mid = 0.5 * (a + b);
                auto vm = M(mid);
                ++out.evaluations;
                int sm = sign(vm);
                if (sm == 0) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf, "sign of M undecided at p = %.12g (|M| = %.3g <= error %.3g), bracket [%.12g, %.12g]",
                                  mid, std::abs(vm.value), vm.error, a, b);
                    throw InconclusiveZero(buf);
                }
                if (sm == sa) a = mid;
                else b = mid;
            }
            out.brackets.push_back({a, b, 1});
        }
        // interior local minimum of |M| with no sign change on either side
        if (k > 0 && k + 1 < v.size() && sign(v[k - 1]) == s && sign(v[k + 1]) == s &&
            std::abs(v[k].value) < std::abs(v[k - 1].value) && std::abs(v[k].value) < std::abs(v[k + 1].value) &&
            std::abs(v[k].value) < tol_of(v[k]))
            out.near_tangencies.push_back(v[k].p);
    }
    out.count = static_cast<int>(out.brackets.size());
    return out;
}

namespace {

struct PerturbedField {
    NumPoly Hx, Hy, P, Q;
    double eps = 0;
    void operator()(const detail::State& u, detail::State& du, double) const {
        double x = u[0], y = u[1];
        double vx = Hy(x, y) + eps * Q(x, y), vy = -Hx(x, y) - eps * P(x, y);
        double g = std::hypot(vx, vy);
        du[0] = vx / g;
        du[1] = vy / g;
    }
};

}  // namespace

PoincareValue poincare_map(const Hamiltonian& H, const PerturbationForm& omega, double eps, double p,
                           const PoincareOptions& opts) {
    PerturbedField f{NumPoly(H.poly.dx()), NumPoly(H.poly.dy()), NumPoly(omega.omega.P), NumPoly(omega.omega.Q), eps};
    double vx0 = f.Hy(0.0, p) + eps * f.Q(0.0, p);
    double scale = std::max(1.0, std::abs(p));
    if (std::abs(vx0) < 1e-12 * scale) throw NoReturn("perturbed field is tangent to x = 0 at p = " + std::to_string(p));
    double sigma = vx0 > 0 ? 1.0 : -1.0;
    auto run = [&](double tol, double max_step, double& len) {
        detail::State u{0.0, p};
        detail::ReturnLimits lim;
        lim.max_step = max_step * scale;
        lim.budget = opts.arclength_budget * scale;
        lim.escape = opts.escape_radius * scale;
        lim.min_step = 1e-14 * scale;
        lim.scale = scale;
        int steps = 0;
        len = detail::integrate_to_return(f, u, sigma, tol, lim, [](detail::State&, bool) {},
                                          [](const std::string& m) { throw NoReturn(m); }, steps);
        return u[1];
    };
    double l1 = 0, l2 = 0;
    double coarse = run(opts.tol, opts.max_step, l1);
    double fine = run(opts.tol * opts.refine, opts.max_step * 0.5, l2);
    return {fine, std::abs(fine - coarse) + 1e-16 * scale, l2};
}

EpsFit fit_order(const Hamiltonian& H, const PerturbationForm& omega, double p, int order, double first_term,
                 double eps_lo, double eps_hi, int count, const PoincareOptions& opts) {
    EpsFit fit;
    fit.order = order;
    for (int k = 0; k < count; ++k) {
        double e = count > 1 ? std::exp(std::log(eps_lo) + (std::log(eps_hi) - std::log(eps_lo)) * k / (count - 1)) : eps_lo;
        PoincareValue d = poincare_map(H, omega, e, p, opts);
        double r = d.delta - p - e * first_term;
        fit.eps.push_back(e);
        fit.residual.push_back(r);
        fit.error.push_back(d.error);
        fit.used.push_back(std::abs(r) > 100 * d.error);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    // normal equations for r ~ a e^K + b e^(K+1)
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (size_t k = 0; k < fit.eps.size(); ++k) {
        if (!fit.used[k]) continue;
        double lx = std::log(fit.eps[k]), ly = std::log(std::abs(fit.residual[k]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
        double u = std::pow(fit.eps[k], order), w = u * fit.eps[k];
        double wt = 1 / (u * u);  // relative weighting
        a11 += wt * u * u;
        a12 += wt * u * w;
        a22 += wt * w * w;
        b1 += wt * u * fit.residual[k];
        b2 += wt * w * fit.residual[k];
    }
    fit.slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : NAN;
    double det = a11 * a22 - a12 * a12;
    fit.leading = n >= 2 && det != 0 ? (b1 * a22 - b2 * a12) / det : (n == 1 ? b1 / a11 : NAN);
    return fit;
}

nlohmann::json to_json(const MelnikovReport& r) {
    nlohmann::json j;
    j["order"] = r.order;
    j["terms"] = r.terms;
    nlohmann::json s = nlohmann::json::array();
    for (const auto& v : r.samples)
        s.push_back({{"p", v.p}, {"t", v.t}, {"M", v.value}, {"error", v.error}, {"p_chart", v.p_chart},
                     {"arclength", v.arclength}});
    j["samples"] = s;
    nlohmann::json lg = nlohmann::json::array();
    for (const auto& l : r.log) {
        nlohmann::json e = {{"j", l.j}, {"max_abs", l.max_abs}, {"tolerance", l.tolerance}, {"vanishing", l.vanishing}};
        if (l.petrov_zero) e["petrov_relatively_exact"] = *l.petrov_zero;
        lg.push_back(e);
    }
    j["relative_exactness"] = lg;
    if (r.symbolic) j["symbolic"] = to_json(*r.symbolic);
    return j;
}

nlohmann::json to_json(const ZeroCount& z) {
    nlohmann::json b = nlohmann::json::array();
    for (const auto& x : z.brackets) b.push_back({{"lo", x.lo}, {"hi", x.hi}, {"multiplicity", x.multiplicity}});
    return {{"count", z.count}, {"brackets", b}, {"near_tangencies", z.near_tangencies}, {"evaluations", z.evaluations}};
}

nlohmann::json to_json(const EpsFit& f) {
    nlohmann::json pts = nlohmann::json::array();
    for (size_t k = 0; k < f.eps.size(); ++k)
        pts.push_back({{"eps", f.eps[k]}, {"residual", f.residual[k]}, {"error", f.error[k]}, {"used", bool(f.used[k])}});
    nlohmann::json j = {{"order", f.order}, {"points", pts}};
    j["slope"] = std::isfinite(f.slope) ? nlohmann::json(f.slope) : nlohmann::json(nullptr);
    j["leading"] = std::isfinite(f.leading) ? nlohmann::json(f.leading) : nlohmann::json(nullptr);
    return j;
}

std::string samples_csv(const MelnikovReport& r) {
    std::string s = "p,t,M_K,error\n";
    char buf[128];
    for (const auto& v : r.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", v.p, v.t, v.value, v.error);
        s += buf;
    }
    return s;
}

}  // namespace itergm
