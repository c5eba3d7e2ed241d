#include "itergm/petrov.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

#include "itergm/errors.hpp"
#include "itergm/linalg.hpp"
#include "itergm/parse.hpp"
#include "itergm/roots.hpp"

namespace itergm {

int Grading::weight(const PolyOneForm& w) const {
    int a = w.P.is_zero() ? -1 : w.P.weighted_degree(wx, wy) + wx;
    int b = w.Q.is_zero() ? -1 : w.Q.weighted_degree(wx, wy) + wy;
    return std::max(a, b);
}

namespace detail {

using ExpIndex = std::map<Exponent, int, GrlexLess>;

std::vector<Exponent> monomials_of_weight(const Grading& gr, int w) {
    std::vector<Exponent> out;
    if (w < 0) return out;
    for (int i = 0; i * gr.wx <= w; ++i) {
        int rest = w - i * gr.wx;
        if (rest % gr.wy == 0) out.push_back({i, rest / gr.wy});
    }
    std::sort(out.begin(), out.end(), GrlexLess{});
    return out;
}

ExpIndex index_of(const std::vector<Exponent>& v) {
    ExpIndex m;
    for (size_t k = 0; k < v.size(); ++k) m[v[k]] = static_cast<int>(k);
    return m;
}

// Petrov system of one weight piece:
//   theta_D = d g_D + f dH_top + sum_l c_{l,k} H_top^k omega_l
struct PetrovPiece {
    std::vector<Exponent> p_rows, q_rows;
    ExpIndex p_index, q_index;
    std::vector<Exponent> g_cols, f_cols;
    std::vector<std::pair<int, int>> c_cols;  // (basic index, power of H)
    SolveOperator op;
};

// P_D = a H_top_x + b H_top_y + r with r on standard monomials
struct JacobianPiece {
    std::vector<Exponent> rows;
    ExpIndex index;
    std::vector<Exponent> a_cols, b_cols;
    SolveOperator op;

    int remainder_col(int row) const { return static_cast<int>(a_cols.size() + b_cols.size()) + row; }
};

class PetrovEngine {
public:
    PetrovEngine(const BivarPoly& H, Grading gr, std::vector<PolyOneForm> basis)
        : H_(H), gr_(gr), basis_(std::move(basis)) {
        Hx_ = H.dx();
        Hy_ = H.dy();
        Htop_ = H.weighted_part(gr.wx, gr.wy, gr.top);
        Htop_x_ = Htop_.dx();
        Htop_y_ = Htop_.dy();
        for (const auto& w : basis_) basis_weight_.push_back(gr.weight(w));
    }

    const Grading& grading() const { return gr_; }
    const BivarPoly& H() const { return H_; }
    const BivarPoly& Hx() const { return Hx_; }
    const BivarPoly& Hy() const { return Hy_; }
    int basis_weight(int l) const { return basis_weight_[l]; }

    const PetrovPiece& petrov_piece(int D) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = petrov_.find(D);
        if (it != petrov_.end()) return *it->second;
        auto piece = std::make_unique<PetrovPiece>();
        build_petrov(D, *piece);
        return *(petrov_[D] = std::move(piece));
    }

    const JacobianPiece& jacobian_piece(int D) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = jac_.find(D);
        if (it != jac_.end()) return *it->second;
        auto piece = std::make_unique<JacobianPiece>();
        build_jacobian(D, *piece);
        return *(jac_[D] = std::move(piece));
    }

    BivarPoly H_power(int k) {
        std::lock_guard<std::mutex> lock(mu_);
        while (static_cast<int>(hpow_.size()) <= k)
            hpow_.push_back(hpow_.empty() ? BivarPoly(1) : hpow_.back() * H_);
        return hpow_[k];
    }

private:
    BivarPoly Htop_power(int k) {
        while (static_cast<int>(htop_pow_.size()) <= k)
            htop_pow_.push_back(htop_pow_.empty() ? BivarPoly(1) : htop_pow_.back() * Htop_);
        return htop_pow_[k];
    }

    void build_petrov(int D, PetrovPiece& pc) {
        pc.p_rows = monomials_of_weight(gr_, D - gr_.wx);
        pc.q_rows = monomials_of_weight(gr_, D - gr_.wy);
        pc.p_index = index_of(pc.p_rows);
        pc.q_index = index_of(pc.q_rows);
        pc.g_cols = monomials_of_weight(gr_, D);
        pc.f_cols = monomials_of_weight(gr_, D - gr_.top);
        for (int l = 0; l < static_cast<int>(basis_.size()); ++l) {
            int rest = D - basis_weight_[l];
            if (rest >= 0 && rest % gr_.top == 0) pc.c_cols.push_back({l, rest / gr_.top});
        }
        int rows = static_cast<int>(pc.p_rows.size() + pc.q_rows.size());
        int cols = static_cast<int>(pc.g_cols.size() + pc.f_cols.size() + pc.c_cols.size());
        QMatrix a(rows, QVector(cols));
        auto put = [&](int col, const PolyOneForm& w) {
            for (const auto& [e, c] : w.P.terms()) {
                auto it = pc.p_index.find(e);
                if (it != pc.p_index.end()) a[it->second][col] += c;
            }
            for (const auto& [e, c] : w.Q.terms()) {
                auto it = pc.q_index.find(e);
                if (it != pc.q_index.end()) a[pc.p_rows.size() + it->second][col] += c;
            }
        };
        int col = 0;
        for (const auto& e : pc.g_cols) put(col++, PolyOneForm::exact(BivarPoly::monomial(e.i, e.j)));
        PolyOneForm dHtop{Htop_x_, Htop_y_};
        for (const auto& e : pc.f_cols) put(col++, BivarPoly::monomial(e.i, e.j) * dHtop);
        for (const auto& [l, k] : pc.c_cols) put(col++, Htop_power(k) * basis_[l]);
        pc.op = SolveOperator(a, cols);
    }

    void build_jacobian(int D, JacobianPiece& pc) {
        pc.rows = monomials_of_weight(gr_, D);
        pc.index = index_of(pc.rows);
        pc.a_cols = monomials_of_weight(gr_, D - (gr_.top - gr_.wx));
        pc.b_cols = monomials_of_weight(gr_, D - (gr_.top - gr_.wy));
        int rows = static_cast<int>(pc.rows.size());
        int cols = static_cast<int>(pc.a_cols.size() + pc.b_cols.size()) + rows;
        QMatrix a(rows, QVector(cols));
        auto put = [&](int col, const BivarPoly& p) {
            for (const auto& [e, c] : p.terms()) {
                auto it = pc.index.find(e);
                if (it != pc.index.end()) a[it->second][col] += c;
            }
        };
        int col = 0;
        for (const auto& e : pc.a_cols) put(col++, BivarPoly::monomial(e.i, e.j) * Htop_x_);
        for (const auto& e : pc.b_cols) put(col++, BivarPoly::monomial(e.i, e.j) * Htop_y_);
        for (int r = 0; r < rows; ++r) a[r][col++] = 1;
        pc.op = SolveOperator(a, cols);
    }

    BivarPoly H_, Hx_, Hy_, Htop_, Htop_x_, Htop_y_;
    Grading gr_;
    std::vector<PolyOneForm> basis_;
    std::vector<int> basis_weight_;
    std::mutex mu_;
    std::map<int, std::unique_ptr<PetrovPiece>> petrov_;
    std::map<int, std::unique_ptr<JacobianPiece>> jac_;
    std::vector<BivarPoly> hpow_, htop_pow_;
};

}  // namespace detail

namespace {

using detail::PetrovEngine;

JacobianNormalForm normal_form(const BivarPoly& P, PetrovEngine& eng) {
    JacobianNormalForm out;
    const Grading& gr = eng.grading();
    BivarPoly rem = P;
    while (!rem.is_zero()) {
        int D = gr.weight(rem);
        const auto& pc = eng.jacobian_piece(D);
        QVector b(pc.rows.size());
        for (const auto& [e, c] : rem.terms())
            if (gr.weight(e.i, e.j) == D) b[pc.index.at(e)] = c;
        QVector x;
        pc.op.solve(b, x);
        BivarPoly aD, bD, rD;
        size_t col = 0;
        for (const auto& e : pc.a_cols) aD.add_term(e.i, e.j, x[col++]);
        for (const auto& e : pc.b_cols) bD.add_term(e.i, e.j, x[col++]);
        for (const auto& e : pc.rows) rD.add_term(e.i, e.j, x[col++]);
        rem -= aD * eng.Hx() + bD * eng.Hy() + rD;
        if (!rem.is_zero() && gr.weight(rem) >= D)
            throw DecompositionFailed("Jacobian reduction did not lower the weight");
        out.a += aD;
        out.b += bD;
        out.remainder += rD;
    }
    return out;
}

// top part quasi-homogeneous with isolated critical point: the graded quotient
// must vanish on max(wx, wy) consecutive weights
bool isolated_top(const BivarPoly& H, const Grading& gr, int& milnor) {
    PetrovEngine probe(H, gr, {});
    int need = std::max(gr.wx, gr.wy);
    int run = 0, dim = 0;
    int limit = 4 * gr.top + 4 * need + 8;
    for (int D = 0; D <= limit; ++D) {
        const auto& pc = probe.jacobian_piece(D);
        int q = 0;
        for (size_t r = 0; r < pc.rows.size(); ++r)
            if (pc.op.is_pivot(pc.remainder_col(static_cast<int>(r)))) ++q;
        dim += q;
        run = q == 0 ? run + 1 : 0;
        if (run >= need && D > 0) {
            milnor = dim;
            return true;
        }
    }
    return false;
}

std::vector<Grading> candidate_gradings(const BivarPoly& H) {
    std::vector<Exponent> supp;
    for (const auto& [e, c] : H.terms())
        if (e.total() > 0) supp.push_back(e);
    std::set<std::pair<int, int>> seen;
    std::vector<std::pair<int, int>> cands = {{1, 1}};
    seen.insert({1, 1});
    for (const auto& a : supp)
        for (const auto& b : supp) {
            if (!(a.i > b.i && a.j < b.j)) continue;
            int wx = b.j - a.j, wy = a.i - b.i;
            int g = std::gcd(wx, wy);
            wx /= g;
            wy /= g;
            int w = a.i * wx + a.j * wy;
            bool top = true;
            for (const auto& e : supp)
                if (e.i * wx + e.j * wy > w) top = false;
            if (top && seen.insert({wx, wy}).second) cands.push_back({wx, wy});
        }
    std::sort(cands.begin() + 1, cands.end(), [](auto a, auto b) {
        if (a.first + a.second != b.first + b.second) return a.first + a.second < b.first + b.second;
        return a.first < b.first;
    });
    std::vector<Grading> out;
    for (auto [wx, wy] : cands) out.push_back({wx, wy, H.weighted_degree(wx, wy)});
    return out;
}

}  // namespace

Hamiltonian certify(const BivarPoly& Hpoly, const CertifyOptions& opts) {
    if (Hpoly.degree() < 2) throw DegenerateHamiltonian("degree of H must be at least 2");
    Hamiltonian H;
    H.poly = Hpoly;
    H.n = Hpoly.degree() - 1;
    H.level_offset = Hpoly.coeff(0, 0);
    for (int j = 1; j <= H.n; ++j)
        for (int i = 1; i <= H.n; ++i) H.basic_forms.push_back({BivarPoly::monomial(i - 1, j), BivarPoly()});

    GenericityReport& rep = H.genericity;
    int milnor = -1;
    bool found = false;
    for (const Grading& gr : candidate_gradings(Hpoly)) {
        if (gr.top <= std::max(gr.wx, gr.wy)) continue;
        if (isolated_top(Hpoly, gr, milnor)) {
            H.grading = gr;
            found = true;
            break;
        }
    }
    if (!found)
        throw DegenerateHamiltonian("no weighting makes the top part of " + to_string(Hpoly) +
                                    " quasi-homogeneous with an isolated critical point");
    H.engine = std::make_shared<PetrovEngine>(Hpoly, H.grading, H.basic_forms);
    PetrovEngine& eng = *H.engine;
    const Grading& gr = H.grading;
    rep.witness.wx = gr.wx;
    rep.witness.wy = gr.wy;
    rep.witness.milnor_number = milnor;

    // Jacobian algebra on standard monomials
    std::vector<Exponent> std_mono;
    for (int D = 0, run = 0; run < std::max(gr.wx, gr.wy) || D <= 2 * gr.top; ++D) {
        const auto& pc = eng.jacobian_piece(D);
        int q = 0;
        for (size_t r = 0; r < pc.rows.size(); ++r)
            if (pc.op.is_pivot(pc.remainder_col(static_cast<int>(r)))) {
                std_mono.push_back(pc.rows[r]);
                ++q;
            }
        run = q == 0 ? run + 1 : 0;
    }
    detail::ExpIndex std_index = detail::index_of(std_mono);
    auto mult_matrix = [&](const BivarPoly& f) {
        size_t mu = std_mono.size();
        QMatrix M(mu, QVector(mu));
        for (size_t k = 0; k < mu; ++k) {
            BivarPoly r = normal_form(f * BivarPoly::monomial(std_mono[k].i, std_mono[k].j), eng).remainder;
            for (const auto& [e, c] : r.terms()) M[std_index.at(e)][k] = c;
        }
        return M;
    };
    H.m = characteristic_polynomial(mult_matrix(Hpoly), Var::h);
    BivarPoly hess = Hpoly.dx().dx() * Hpoly.dy().dy() - Hpoly.dx().dy() * Hpoly.dx().dy();
    rep.nondegenerate_points = std_mono.empty() || determinant(mult_matrix(hess)) != 0;

    bool squarefree = gcd(H.m, H.m.derivative()).degree() <= 0;
    for (const PolyRoot& r : poly_roots(H.m)) rep.critical_values.push_back({r.z, r.radius, r.multiplicity});
    bool collision = false;
    for (size_t a = 0; a < rep.critical_values.size(); ++a)
        for (size_t b = a + 1; b < rep.critical_values.size(); ++b) {
            Complex ca = rep.critical_values[a].value, cb = rep.critical_values[b].value;
            if (std::abs(ca - cb) < opts.collision_tol * std::max(1.0, std::abs(ca))) collision = true;
        }
    rep.morse_distinct = squarefree && rep.nondegenerate_points && !collision;
    if (!rep.morse_distinct) rep.warnings.push_back("NonMorse: critical values collide or are degenerate");

    // probe every weight piece up to two periods beyond the basic forms
    int top_basic = 0;
    for (int l = 0; l < H.N(); ++l) top_basic = std::max(top_basic, eng.basis_weight(l));
    rep.witness.probe_weight = top_basic + 2 * gr.top;
    for (int D = 1; D <= rep.witness.probe_weight; ++D) {
        const auto& pc = eng.petrov_piece(D);
        rep.witness.rows += pc.op.rows();
        rep.witness.cols += pc.op.cols();
        rep.witness.rank += pc.op.rank();
        if (!pc.op.surjective()) ++rep.witness.deficient_pieces;
    }
    for (int l = 0; l < H.N(); ++l) {
        const auto& pc = eng.petrov_piece(eng.basis_weight(l));
        int col = static_cast<int>(pc.g_cols.size() + pc.f_cols.size());
        for (const auto& c : pc.c_cols) {
            if (c.first == l && c.second == 0 && pc.op.is_pivot(col)) ++rep.witness.petrov_rank;
            ++col;
        }
    }
    rep.petrov_basis_ok = rep.witness.deficient_pieces == 0;
    rep.basis_independent = rep.witness.petrov_rank == H.N();
    if (!rep.basis_independent)
        rep.warnings.push_back("basic forms are dependent modulo relatively exact forms: rank " +
                               std::to_string(rep.witness.petrov_rank) + " of " + std::to_string(H.N()));

    UniPoly tp = restrict_to_transversal(Hpoly);
    rep.transversal_degree = tp.degree();
    rep.transversal_ok = tp.degree() >= 1;
    for (const PolyRoot& r : poly_roots(tp.derivative())) rep.tangency_levels.push_back(tp.eval(r.z));
    rep.smooth_level = H.m.eval(Rational(0)) != 0;

    if (!rep.petrov_basis_ok)
        throw DegenerateHamiltonian("decomposition system is rank-deficient in " +
                                    std::to_string(rep.witness.deficient_pieces) + " weight pieces");
    return H;
}

PolyOneForm PetrovDecomposition::rebuild(const Hamiltonian& H) const {
    PolyOneForm out = PolyOneForm::exact(g) + f * PolyOneForm{H.poly.dx(), H.poly.dy()};
    for (size_t l = 0; l < f_coeffs.size(); ++l)
        out += compose_with_hamiltonian(f_coeffs[l], H.poly) * H.basic_forms[l];
    return out;
}

PetrovDecomposition petrov_decompose(const PolyOneForm& theta, const Hamiltonian& H) {
    if (!H.engine || !H.genericity.petrov_basis_ok)
        throw GenericityViolation("Hamiltonian is not certified for decomposition");
    PetrovEngine& eng = *H.engine;
    const Grading& gr = eng.grading();
    PetrovDecomposition out;
    out.source = theta;
    out.f_coeffs.assign(H.N(), UniPoly(Var::h));
    PolyOneForm dH{eng.Hx(), eng.Hy()};

    PolyOneForm rem = theta;
    while (!rem.is_zero()) {
        int D = gr.weight(rem);
        const auto& pc = eng.petrov_piece(D);
        QVector b(pc.p_rows.size() + pc.q_rows.size());
        for (const auto& [e, c] : rem.P.terms())
            if (gr.weight(e.i, e.j) + gr.wx == D) b[pc.p_index.at(e)] = c;
        for (const auto& [e, c] : rem.Q.terms())
            if (gr.weight(e.i, e.j) + gr.wy == D) b[pc.p_rows.size() + pc.q_index.at(e)] = c;
        QVector x;
        if (!pc.op.solve(b, x))
            throw DecompositionFailed("inconsistent system at weight " + std::to_string(D) + " for " +
                                      to_string(theta));
        BivarPoly gD, fD;
        PolyOneForm corr;
        size_t col = 0;
        for (const auto& e : pc.g_cols) gD.add_term(e.i, e.j, x[col++]);
        for (const auto& e : pc.f_cols) fD.add_term(e.i, e.j, x[col++]);
        for (const auto& [l, k] : pc.c_cols) {
            const Rational& c = x[col++];
            if (c == 0) continue;
            std::vector<Rational> mono(k + 1);
            mono[k] = c;
            out.f_coeffs[l] += UniPoly(Var::h, mono);
            corr += (c * eng.H_power(k)) * H.basic_forms[l];
        }
        corr += PolyOneForm::exact(gD) + fD * dH;
        rem -= corr;
        if (!rem.is_zero() && gr.weight(rem) >= D)
            throw DecompositionFailed("reduction did not lower the weight");
        out.g += gD;
        out.f += fD;
    }

    out.source_degree = theta.is_zero() ? 0 : theta.degree() + 1;
    out.max_f_degree = out.f.degree();
    out.max_g_degree = out.g.degree();
    for (const auto& fi : out.f_coeffs) out.max_fi_degree = std::max(out.max_fi_degree, fi.degree());
    int d = out.source_degree;
    out.within_bounds = out.max_f_degree <= d && out.max_g_degree <= d && out.max_fi_degree * (H.n + 1) <= d;
    return out;
}

JacobianNormalForm jacobian_normal_form(const BivarPoly& P, const Hamiltonian& H) {
    if (!H.engine) throw GenericityViolation("Hamiltonian is not certified");
    return normal_form(P, *H.engine);
}

PolyOneForm jacobian_divide(const PolyTwoForm& mu, const Hamiltonian& H) {
    if (mu.is_zero()) return {};
    BivarPoly target = compose_with_hamiltonian(H.m, H.poly) * mu.R;
    JacobianNormalForm nf = jacobian_normal_form(target, H);
    if (!nf.remainder.is_zero())
        throw MembershipFailed("m(H)*R is not in the Jacobian ideal: remainder " + to_string(nf.remainder));
    return {nf.b, -nf.a};
}

std::pair<PolyOneForm, UniPoly> gelfand_leray(const PolyOneForm& theta, const Hamiltonian& H) {
    return {jacobian_divide(exterior_derivative(theta), H), H.m};
}

}  // namespace itergm
