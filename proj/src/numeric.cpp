#include "itergm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "itergm/roots.hpp"
#include "return_flow.hpp"

namespace itergm {

namespace ode = boost::numeric::odeint;
using detail::State;
using detail::SysRef;

NumPoly::NumPoly(const BivarPoly& p) : deg_(p.degree()) {
    if (deg_ < 0) return;
    c_.assign((deg_ + 1) * (deg_ + 1), 0.0);
    for (const auto& [e, c] : p.terms()) c_[e.i * (deg_ + 1) + e.j] = c.get_d();
}

namespace {

template <class T>
T horner(const std::vector<double>& c, int deg, T x, T y) {
    T acc = 0;
    for (int i = deg; i >= 0; --i) {
        T row = 0;
        const double* ci = c.data() + i * (deg + 1);
        for (int j = deg - i; j >= 0; --j) row = row * y + ci[j];
        acc = acc * x + row;
    }
    return acc;
}

}  // namespace

double NumPoly::operator()(double x, double y) const { return deg_ < 0 ? 0.0 : horner(c_, deg_, x, y); }
Complex NumPoly::operator()(Complex x, Complex y) const { return deg_ < 0 ? Complex(0) : horner(c_, deg_, x, y); }

// ---- level-curve flow with iterated-integral accumulators ----

namespace {

struct Flow {
    NumPoly H, Hx, Hy;
    double level = 0;
    int orient = 1;
    std::vector<NumForm> letters;
    std::vector<int> node_letter, node_parent;  // parent -1 is the empty word
    mutable std::vector<double> vals;

    explicit Flow(const Hamiltonian& h) : H(h.poly), Hx(h.poly.dx()), Hy(h.poly.dy()) {}

    void operator()(const State& u, State& du, double) const {
        double x = u[0], y = u[1];
        double gx = Hx(x, y), gy = Hy(x, y);
        double g = std::hypot(gx, gy);
        double vx = orient * gy / g, vy = -orient * gx / g;
        du[0] = vx;
        du[1] = vy;
        vals.resize(letters.size());
        for (size_t l = 0; l < letters.size(); ++l) vals[l] = letters[l](x, y, vx, vy);
        for (size_t k = 0; k < node_letter.size(); ++k) {
            int par = node_parent[k];
            du[2 + k] = vals[node_letter[k]] * (par < 0 ? 1.0 : u[2 + par]);
        }
    }
};

struct RunResult {
    State end;
    double arclength = 0;
    double closure = 0;
    int steps = 0;
};

void project(const Flow& f, double& x, double& y, const TraceOptions& opts) {
    double scale = std::max(1.0, std::abs(f.level));
    for (int it = 0; it < 4; ++it) {
        double r = f.H(x, y) - f.level;
        if (std::abs(r) <= 1e-16 * scale) break;
        double gx = f.Hx(x, y), gy = f.Hy(x, y), g2 = gx * gx + gy * gy;
        if (g2 == 0) break;
        x -= r * gx / g2;
        y -= r * gy / g2;
    }
    // far from the origin H itself cannot be evaluated to better than its size
    double r = std::abs(f.H(x, y) - f.level);
    scale = std::max(scale, std::hypot(f.Hx(x, y), f.Hy(x, y)) * std::hypot(x, y));
    if (!(r <= opts.level_tol * scale))
        throw LevelDrift("|H - t| = " + std::to_string(r) + " at (" + std::to_string(x) + ", " + std::to_string(y) + ")");
}

RunResult run_loop(Flow& f, double p, const TraceOptions& opts, double tol,
                   std::vector<std::array<double, 2>>* samples) {
    f.level = f.H(0.0, p);
    f.orient = opts.orientation >= 0 ? 1 : -1;
    double gy0 = f.Hy(0.0, p);
    double scale = std::max(1.0, std::abs(p));
    if (std::abs(gy0) < 1e-12 * std::max(1.0, std::abs(f.Hx(0.0, p))))
        throw NotClosed("level curve is tangent to x = 0 at p = " + std::to_string(p));
    double sigma = f.orient * gy0 > 0 ? 1.0 : -1.0;

    State u(2 + f.node_letter.size(), 0.0);
    u[1] = p;
    detail::ReturnLimits lim;
    lim.max_step = opts.max_step * scale;
    lim.budget = opts.arclength_budget * scale;
    lim.escape = opts.escape_radius * scale;
    lim.min_step = 1e-14 * scale;
    lim.scale = scale;
    lim.crossings = opts.traversals;
    if (samples) samples->push_back({0.0, p});
    auto after = [&](State& v, bool last) {
        if (last) {
            // back onto the level along x = 0
            v[0] = 0;
            for (int it = 0; it < 4; ++it) {
                double gy = f.Hy(0.0, v[1]);
                if (gy == 0) break;
                v[1] -= (f.H(0.0, v[1]) - f.level) / gy;
            }
        } else {
            project(f, v[0], v[1], opts);
        }
        if (samples) samples->push_back({v[0], v[1]});
    };
    int steps = 0;
    double s = detail::integrate_to_return(f, u, sigma, tol, lim, after,
                                           [](const std::string& m) { throw NotClosed(m); }, steps);
    RunResult r;
    r.closure = std::hypot(u[0], u[1] - p);
    r.end = std::move(u);
    r.arclength = s;
    r.steps = steps;
    if (r.closure > opts.closure_tol)
        throw NotClosed("return point misses the base point by " + std::to_string(r.closure));
    return r;
}

}  // namespace

OvalTrace trace_oval(const Hamiltonian& H, double p_seed, const TraceOptions& opts) {
    Flow f(H);
    OvalTrace tr;
    RunResult r = run_loop(f, p_seed, opts, opts.local_tol, opts.keep_samples ? &tr.samples : nullptr);
    tr.t = f.level;
    tr.p = p_seed;
    tr.closure_residual = r.closure;
    tr.orientation = f.orient;
    tr.traversals = opts.traversals;
    tr.arclength = r.arclength;
    tr.steps = r.steps;
    return tr;
}

TupleIntegrals integrate_tuples(const Hamiltonian& H, double p, const std::vector<PolyOneForm>& letters,
                                const std::vector<std::vector<int>>& tuples, const QuadratureOptions& opts) {
    Flow f(H);
    for (const auto& w : letters) f.letters.emplace_back(w);
    std::map<std::pair<int, int>, int> nodes;
    std::vector<int> leaf(tuples.size(), -1);
    for (size_t k = 0; k < tuples.size(); ++k) {
        int par = -1;
        for (int q = static_cast<int>(tuples[k].size()) - 1; q >= 0; --q) {
            int l = tuples[k][q];
            if (l < 0 || l >= static_cast<int>(letters.size())) throw std::out_of_range("letter index out of range");
            auto [it, fresh] = nodes.try_emplace({l, par}, static_cast<int>(f.node_letter.size()));
            if (fresh) {
                f.node_letter.push_back(l);
                f.node_parent.push_back(par);
            }
            par = it->second;
        }
        leaf[k] = par;
    }

    TupleIntegrals out;
    RunResult coarse = run_loop(f, p, opts.trace, opts.trace.local_tol, nullptr);
    // tighter tolerance and half the step cap, so the two runs never share a step sequence
    TraceOptions half = opts.trace;
    half.max_step *= 0.5;
    RunResult fine = run_loop(f, p, half, opts.trace.local_tol * opts.refine,
                              opts.trace.keep_samples ? &out.trace.samples : nullptr);
    out.trace.t = f.level;
    out.trace.p = p;
    out.trace.closure_residual = fine.closure;
    out.trace.orientation = f.orient;
    out.trace.traversals = opts.trace.traversals;
    out.trace.arclength = fine.arclength;
    out.trace.steps = fine.steps;
    for (size_t k = 0; k < tuples.size(); ++k) {
        if (leaf[k] < 0) {
            out.values.push_back(1.0);
            out.errors.push_back(0.0);
            continue;
        }
        double v = fine.end[2 + leaf[k]], w = coarse.end[2 + leaf[k]];
        out.values.push_back(v);
        out.errors.push_back(std::abs(v - w) + opts.error_floor * std::max(1.0, std::abs(v)));
    }
    return out;
}

IINumericVector eval_iterated(const Hamiltonian& H, const OvalTrace& trace, std::shared_ptr<const WordBasis> basis,
                              const QuadratureOptions& opts) {
    QuadratureOptions o = opts;
    o.trace.orientation = trace.orientation;
    o.trace.traversals = trace.traversals;
    o.trace.keep_samples = false;
    std::vector<std::vector<int>> tuples;
    tuples.reserve(basis->size());
    for (const auto& w : basis->words()) {
        std::vector<int> t;
        for (int l : w.letters) t.push_back(l - 1);
        tuples.push_back(std::move(t));
    }
    TupleIntegrals ti = integrate_tuples(H, trace.p, H.basic_forms, tuples, o);
    return IINumericVector{std::move(basis), std::move(ti.values), std::move(ti.errors)};
}

IINumericVector eval_iterated(const Hamiltonian& H, double p, std::shared_ptr<const WordBasis> basis,
                              const QuadratureOptions& opts) {
    OvalTrace tr;
    tr.p = p;
    tr.orientation = opts.trace.orientation;
    tr.traversals = opts.trace.traversals;
    return eval_iterated(H, tr, std::move(basis), opts);
}

// ---- complex continuation ----

namespace {

struct LinearFlow {
    const ConnectionMatrix* omega;
    std::function<void(double, Complex&, Complex&)> path;  // tau -> (p, dp/dtau)
    size_t n = 0, m = 0;
    mutable std::vector<Complex> A;

    void operator()(const State& u, State& du, double tau) const {
        Complex p, dp;
        path(tau, p, dp);
        omega->evaluate(p, A);
        for (size_t r = 0; r < n; ++r)
            for (size_t c = 0; c < m; ++c) {
                Complex acc = 0;
                for (size_t k = 0; k < n; ++k) {
                    const Complex a = A[r * n + k];
                    if (a == Complex(0)) continue;
                    acc += a * Complex(u[2 * (k * m + c)], u[2 * (k * m + c) + 1]);
                }
                acc *= dp;
                du[2 * (r * m + c)] = acc.real();
                du[2 * (r * m + c) + 1] = acc.imag();
            }
    }
};

// V is n x m row-major, continued over tau in [0, 1]
void continue_frame(const ConnectionMatrix& omega, std::function<void(double, Complex&, Complex&)> path,
                    std::vector<Complex>& V, size_t m, const ContinuationOptions& opts) {
    LinearFlow f{&omega, std::move(path), omega.size(), m, {}};
    State u(2 * V.size());
    for (size_t k = 0; k < V.size(); ++k) {
        u[2 * k] = V[k].real();
        u[2 * k + 1] = V[k].imag();
    }
    SysRef<LinearFlow> sys{&f};
    auto stepper = ode::make_controlled(opts.tol, opts.tol, ode::runge_kutta_fehlberg78<State>());
    double tau = 0, dtau = 1e-3;
    long steps = 0;
    while (tau < 1.0) {
        if (++steps > opts.max_steps) throw StiffnessFailure("continuation exceeded the step budget");
        dtau = std::min(dtau, 1.0 - tau);
        if (stepper.try_step(sys, u, tau, dtau) == ode::fail && dtau < opts.min_step)
            throw StiffnessFailure("step size collapsed at tau = " + std::to_string(tau));
        if (1.0 - tau < 1e-15) tau = 1.0;
    }
    for (size_t k = 0; k < V.size(); ++k) V[k] = Complex(u[2 * k], u[2 * k + 1]);
}

double segment_distance(Complex a, Complex b, Complex z) {
    Complex d = b - a;
    double len2 = std::norm(d);
    double s = len2 > 0 ? std::clamp(((z - a) * std::conj(d)).real() / len2, 0.0, 1.0) : 0.0;
    return std::abs(a + s * d - z);
}

}  // namespace

std::vector<Complex> continue_system(const ConnectionMatrix& omega, const std::vector<Complex>& path,
                                     const std::vector<Complex>& v0, const ContinuationOptions& opts) {
    if (v0.size() != omega.size()) throw BasisMismatch("initial vector does not match the connection size");
    for (size_t k = 0; k + 1 < path.size(); ++k)
        for (const auto& s : omega.singular_locus())
            if (segment_distance(path[k], path[k + 1], s.p) < opts.margin)
                throw SingularityTooClose("path passes within " + std::to_string(opts.margin) + " of p = (" +
                                          std::to_string(s.p.real()) + ", " + std::to_string(s.p.imag()) + ")");
    std::vector<Complex> v = v0;
    for (size_t k = 0; k + 1 < path.size(); ++k) {
        Complex a = path[k], d = path[k + 1] - path[k];
        if (d == Complex(0)) continue;
        continue_frame(
            omega, [a, d](double tau, Complex& p, Complex& dp) { p = a + tau * d, dp = d; }, v, 1, opts);
    }
    return v;
}

double unity_distance(Complex z, int max_order) {
    double best = std::abs(z - 1.0);
    double arg = std::arg(z);
    for (int q = 1; q <= max_order; ++q) {
        double k = std::round(q * arg / (2 * std::numbers::pi));
        best = std::min(best, std::abs(z - std::polar(1.0, 2 * std::numbers::pi * k / q)));
    }
    return best;
}

std::vector<Complex> clustered_eigenvalues(const std::vector<Complex>& a, size_t n, double cluster_tol) {
    if (n == 0) return {};
    Eigen::MatrixXcd M(n, n);
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c) M(r, c) = a[r * n + c];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    std::vector<Complex> ev(n);
    for (size_t k = 0; k < n; ++k) ev[k] = es.eigenvalues()[k];
    // single-linkage clusters
    std::vector<int> label(n, -1);
    int nl = 0;
    for (size_t k = 0; k < n; ++k) {
        if (label[k] >= 0) continue;
        label[k] = nl;
        std::vector<size_t> stack{k};
        while (!stack.empty()) {
            size_t i = stack.back();
            stack.pop_back();
            for (size_t j = 0; j < n; ++j)
                if (label[j] < 0 && std::abs(ev[i] - ev[j]) < cluster_tol) {
                    label[j] = nl;
                    stack.push_back(j);
                }
        }
        ++nl;
    }
    std::vector<Complex> sum(nl, 0);
    std::vector<int> cnt(nl, 0);
    for (size_t k = 0; k < n; ++k) {
        sum[label[k]] += ev[k];
        ++cnt[label[k]];
    }
    for (size_t k = 0; k < n; ++k) ev[k] = sum[label[k]] / double(cnt[label[k]]);
    std::sort(ev.begin(), ev.end(), [](Complex x, Complex y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return ev;
}

std::vector<Complex> block_of(const std::vector<Complex>& a, size_t n, size_t begin, size_t size) {
    std::vector<Complex> b(size * size);
    for (size_t r = 0; r < size; ++r)
        for (size_t c = 0; c < size; ++c) b[r * size + c] = a[(begin + r) * n + begin + c];
    return b;
}

double spectrum_distance(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) return INFINITY;
    double worst = 0;
    for (const Complex& z : a) {
        size_t best = 0;
        for (size_t k = 1; k < b.size(); ++k)
            if (std::abs(b[k] - z) < std::abs(b[best] - z)) best = k;
        worst = std::max(worst, std::abs(b[best] - z));
        b.erase(b.begin() + best);
    }
    return worst;
}

MonodromyResult monodromy(const ConnectionMatrix& omega, Complex center, double radius,
                          const ContinuationOptions& opts, int max_order) {
    for (const auto& s : omega.singular_locus())
        if (std::abs(std::abs(s.p - center) - radius) < opts.margin)
            throw SingularityTooClose("loop passes within " + std::to_string(opts.margin) + " of p = (" +
                                      std::to_string(s.p.real()) + ", " + std::to_string(s.p.imag()) + ")");
    MonodromyResult res;
    res.center = center;
    res.radius = radius;
    res.base = center + radius;
    res.max_order = max_order;
    size_t n = res.size = omega.size();
    std::vector<Complex> V(n * n, 0);
    for (size_t k = 0; k < n; ++k) V[k * n + k] = 1;
    const double two_pi = 2 * std::numbers::pi;
    continue_frame(
        omega,
        [center, radius, two_pi](double tau, Complex& p, Complex& dp) {
            Complex e = std::polar(1.0, two_pi * tau);
            p = center + radius * e;
            dp = Complex(0, two_pi) * radius * e;
        },
        V, n, opts);
    res.matrix = V;
    Eigen::MatrixXcd M(n, n);
    for (size_t r = 0; r < n; ++r)
        for (size_t c = 0; c < n; ++c) M(r, c) = V[r * n + c];
    res.determinant = M.determinant();
    res.eigenvalues = clustered_eigenvalues(V, n);
    for (const auto& z : res.eigenvalues) res.unity_distance.push_back(unity_distance(z, max_order));
    return res;
}

std::vector<Complex> critical_preimages(const Hamiltonian& H) {
    std::vector<Complex> out;
    for (const auto& r : poly_roots(H.m.compose(restrict_to_transversal(H.poly)))) out.push_back(r.z);
    return out;
}

PFCheck verify_pf(const Hamiltonian& H, const ConnectionMatrix& omega, const std::vector<double>& ps, double h_max,
                  const QuadratureOptions& opts) {
    PFCheck out;
    auto basis = omega.basis_ptr();
    size_t n = omega.size();
    std::vector<Complex> A;
    for (double p : ps) {
        double h = h_max;
        for (const auto& s : omega.singular_locus()) h = std::min(h, 0.05 * std::abs(Complex(p, 0) - s.p));
        auto val = [&](double q) { return eval_iterated(H, q, basis, opts).values; };
        auto v = val(p), a1 = val(p + h), b1 = val(p - h), a2 = val(p + h / 2), b2 = val(p - h / 2);
        omega.evaluate(Complex(p, 0), A);
        double num = 0, den = 0;
        for (size_t r = 0; r < n; ++r) {
            double d1 = (a1[r] - b1[r]) / (2 * h), d2 = (a2[r] - b2[r]) / h;
            double rich = (4 * d2 - d1) / 3;
            double ov = 0;
            for (size_t c = 0; c < n; ++c) ov += A[r * n + c].real() * v[c];
            num = std::max(num, std::abs(rich - ov));
            den = std::max(den, std::abs(ov));
        }
        double rel = den > 0 ? num / den : num;
        out.points.push_back({p, rel, h});
        out.max_rel_error = std::max(out.max_rel_error, rel);
    }
    return out;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

nlohmann::json cjson(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

std::string trace_csv(const OvalTrace& trace) {
    std::string s = "index,x,y\n";
    for (size_t k = 0; k < trace.samples.size(); ++k)
        s += std::to_string(k) + "," + num(trace.samples[k][0]) + "," + num(trace.samples[k][1]) + "\n";
    return s;
}

std::string integrals_csv(const IINumericVector& v) {
    std::string s = "word,value,error\n";
    for (size_t k = 0; k < v.values.size(); ++k)
        s += "\"" + to_string(v.basis->word(k)) + "\"," + num(v.values[k]) + "," + num(v.errors[k]) + "\n";
    return s;
}

nlohmann::json to_json(const MonodromyResult& m) {
    nlohmann::json j;
    j["center"] = cjson(m.center);
    j["radius"] = m.radius;
    j["base"] = cjson(m.base);
    j["size"] = m.size;
    nlohmann::json rows = nlohmann::json::array();
    for (size_t r = 0; r < m.size; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (size_t c = 0; c < m.size; ++c) row.push_back({m.matrix[r * m.size + c].real(), m.matrix[r * m.size + c].imag()});
        rows.push_back(row);
    }
    j["matrix"] = rows;
    nlohmann::json ev = nlohmann::json::array();
    for (size_t k = 0; k < m.eigenvalues.size(); ++k) {
        nlohmann::json e = cjson(m.eigenvalues[k]);
        e["unity_distance"] = m.unity_distance[k];
        ev.push_back(e);
    }
    j["eigenvalues"] = ev;
    j["determinant"] = cjson(m.determinant);
    j["max_order"] = m.max_order;
    return j;
}

nlohmann::json to_json(const OvalTrace& t, bool with_samples) {
    nlohmann::json j = {{"t", t.t},
                        {"p", t.p},
                        {"closure_residual", t.closure_residual},
                        {"orientation", t.orientation},
                        {"traversals", t.traversals},
                        {"arclength", t.arclength},
                        {"steps", t.steps}};
    if (with_samples) {
        nlohmann::json s = nlohmann::json::array();
        for (const auto& q : t.samples) s.push_back({q[0], q[1]});
        j["samples"] = s;
    }
    return j;
}

}  // namespace itergm
