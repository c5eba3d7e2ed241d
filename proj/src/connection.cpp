#include "itergm/connection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "itergm/parse.hpp"
#include "itergm/roots.hpp"

namespace itergm {

int ReducedCombination::max_degree() const {
    int d = 0;
    for (const auto& [w, c] : coeffs) d = std::max(d, c.degree());
    return d;
}

RationalFunction ReducedCombination::coeff(const Word& w) const {
    auto it = coeffs.find(w);
    return it == coeffs.end() ? RationalFunction() : it->second;
}

Complex ReducedCombination::evaluate(Complex p, const std::vector<Complex>& values) const {
    Complex s = 0;
    for (const auto& [w, c] : coeffs) s += c.eval(p) * values[basis->index(w)];
    return s;
}

IteratedReducer::IteratedReducer(const Hamiltonian& H, std::shared_ptr<const WordBasis> basis)
    : H_(H), basis_(std::move(basis)), level_(restrict_to_transversal(H.poly)) {}

const PetrovDecomposition& IteratedReducer::decompose(const PolyOneForm& w) {
    std::string k = to_string(w);
    auto it = decomp_.find(k);
    if (it != decomp_.end()) return it->second;
    return decomp_.emplace(k, petrov_decompose(w, H_)).first->second;
}

std::string IteratedReducer::key(const std::vector<Slot>& slots) const {
    std::string k;
    for (const auto& s : slots) {
        if (s.basic >= 0) k += "#" + std::to_string(s.basic);
        else k += to_string(s.form);
        k += ";";
    }
    return k;
}

namespace {

void add_into(std::map<Word, UniPoly>& acc, const std::map<Word, UniPoly>& part, const UniPoly& factor) {
    if (factor.is_zero()) return;
    for (const auto& [w, c] : part) {
        auto [it, fresh] = acc.try_emplace(w, UniPoly(Var::p));
        it->second += c * factor;
        if (it->second.is_zero()) acc.erase(it);
    }
}

}  // namespace

// Leftmost general slot first: its basic part becomes basic letters (f_i(H) is
// constant on the level), f dH drops, and dg is moved out by the exact-form
// rules, which shorten the word.
const IteratedReducer::Combination& IteratedReducer::reduce_slots(const std::vector<Slot>& slots) {
    std::string k = key(slots);
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;

    Combination out;
    size_t pos = 0;
    while (pos < slots.size() && slots[pos].basic >= 0) ++pos;
    if (pos == slots.size()) {
        Word w;
        for (const auto& s : slots) w.letters.push_back(s.basic + 1);
        if (w.size() > basis_->K()) throw CapacityExceeded("iterated integral longer than K");
        out[w] = UniPoly::constant(Var::p, 1);
        return memo_[k] = out;
    }

    const PetrovDecomposition dec = decompose(slots[pos].form);
    for (int l = 0; l < H_.N(); ++l) {
        if (dec.f_coeffs[l].is_zero()) continue;
        std::vector<Slot> next = slots;
        next[pos] = Slot{l, {}};
        add_into(out, reduce_slots(next), dec.f_coeffs[l].compose(level_));
    }

    const BivarPoly& g = dec.g;
    if (!g.is_zero() && slots.size() > 1) {
        UniPoly g_base = restrict_to_transversal(g);
        auto form_of = [&](const Slot& s) { return s.basic >= 0 ? H_.basic_forms[s.basic] : s.form; };
        auto times_g = [&](const Slot& s) { return Slot{-1, g * form_of(s)}; };
        std::vector<Slot> a, b;
        UniPoly one = UniPoly::constant(Var::p, 1);
        if (pos == 0) {
            // g(p) * (tail) - (g theta_2, rest)
            a.assign(slots.begin() + 1, slots.end());
            add_into(out, reduce_slots(a), g_base);
            b = a;
            b[0] = times_g(b[0]);
            add_into(out, reduce_slots(b), -one);
        } else if (pos + 1 == slots.size()) {
            // (.., theta_{k-1} g) - g(p) (.., theta_{k-1})
            a.assign(slots.begin(), slots.end() - 1);
            b = a;
            a.back() = times_g(a.back());
            add_into(out, reduce_slots(a), one);
            add_into(out, reduce_slots(b), -g_base);
        } else {
            // (.., theta g, phi, ..) - (.., theta, g phi, ..)
            a = slots;
            a.erase(a.begin() + pos);
            b = a;
            a[pos - 1] = times_g(a[pos - 1]);
            b[pos] = times_g(b[pos]);
            add_into(out, reduce_slots(a), one);
            add_into(out, reduce_slots(b), -one);
        }
    }
    return memo_[k] = out;
}

ReducedCombination IteratedReducer::reduce(const std::vector<PolyOneForm>& forms) {
    if (static_cast<int>(forms.size()) > basis_->K())
        throw CapacityExceeded("tuple of " + std::to_string(forms.size()) + " forms exceeds K");
    std::vector<Slot> slots;
    for (const auto& f : forms) slots.push_back({-1, f});
    return reduce(slots);
}

ReducedCombination IteratedReducer::reduce(const std::vector<Slot>& slots) {
    if (static_cast<int>(slots.size()) > basis_->K())
        throw CapacityExceeded("tuple of " + std::to_string(slots.size()) + " forms exceeds K");
    ReducedCombination rc;
    rc.basis = basis_;
    for (const auto& [w, c] : reduce_slots(slots)) rc.coeffs.emplace(w, RationalFunction(c));
    return rc;
}

ReducedCombination reduce_iterated(const std::vector<PolyOneForm>& forms, const Hamiltonian& H,
                                   std::shared_ptr<const WordBasis> basis) {
    IteratedReducer red(H, std::move(basis));
    return red.reduce(forms);
}

// ---- ConnectionMatrix ----

ConnectionMatrix::ConnectionMatrix(std::shared_ptr<const WordBasis> basis,
                                   std::vector<std::vector<RationalFunction>> entries)
    : basis_(std::move(basis)), entries_(std::move(entries)) {
    if (entries_.size() != basis_->size()) throw BasisMismatch("connection size does not match its basis");
    cache_rows();
}

void ConnectionMatrix::cache_rows() {
    rows_.assign(entries_.size(), Row{});
    for (size_t r = 0; r < entries_.size(); ++r) {
        UniPoly den = UniPoly::constant(Var::p, 1);
        for (const auto& e : entries_[r]) {
            if (e.is_zero()) continue;
            UniPoly g = gcd(den, e.den()), q, rem;
            divmod(den * e.den(), g, q, rem);
            den = q.monic();
        }
        rows_[r].den = den;
        for (size_t c = 0; c < entries_[r].size(); ++c) {
            const auto& e = entries_[r][c];
            if (e.is_zero()) continue;
            UniPoly q, rem;
            divmod(den, e.den(), q, rem);
            rows_[r].nums.push_back({c, e.num() * q});
        }
    }
}

void ConnectionMatrix::evaluate(Complex p, std::vector<Complex>& out) const {
    size_t n = entries_.size();
    out.assign(n * n, 0);
    for (size_t r = 0; r < n; ++r) {
        if (rows_[r].nums.empty()) continue;
        Complex inv = 1.0 / rows_[r].den.eval(p);
        for (const auto& [c, num] : rows_[r].nums) out[r * n + c] = num.eval(p) * inv;
    }
}

ConnectionDiagnostics ConnectionMatrix::diagnostics() const {
    ConnectionDiagnostics d = build_info;
    d.max_degree = 0;
    d.size = 0;
    d.nonzero_entries = 0;
    for (const auto& row : entries_)
        for (const auto& e : row) {
            if (e.is_zero()) continue;
            ++d.nonzero_entries;
            d.max_degree = std::max(d.max_degree, e.degree());
            d.size += e.size();
        }
    d.log10_size = d.size > 0 ? std::log10(d.size.get_d()) : 0.0;
    return d;
}

ConnectionMatrix build_connection(const Hamiltonian& H, int K, size_t capacity) {
    if (!H.engine || !H.genericity.petrov_basis_ok) throw GenericityViolation("Hamiltonian is not certified");
    auto basis = enumerate_words(H.n, K, capacity);
    size_t NK = basis->size();
    std::vector<std::vector<RationalFunction>> entries(NK, std::vector<RationalFunction>(NK));
    if (K == 0) return ConnectionMatrix(basis, std::move(entries));

    IteratedReducer red(H, basis);
    const UniPoly& t = red.level();
    // dt/dp * (-1/m(t)); the Gelfand-Leray letter of omega_l is -eta_l/m
    RationalFunction scale(-t.derivative(), H.m.compose(t));
    std::vector<PolyOneForm> eta;
    for (const auto& w : H.basic_forms) eta.push_back(jacobian_divide(exterior_derivative(w), H));

    for (size_t r = 1; r < NK; ++r) {
        const Word& w = basis->word(r);
        std::map<Word, UniPoly> acc;
        for (int j = 0; j < w.size(); ++j) {
            std::vector<IteratedReducer::Slot> slots;
            for (int q = 0; q < w.size(); ++q)
                slots.push_back(q == j ? IteratedReducer::Slot{-1, eta[w.letters[q] - 1]}
                                       : IteratedReducer::Slot{w.letters[q] - 1, {}});
            ReducedCombination rc = red.reduce(slots);
            for (const auto& [u, c] : rc.coeffs) {
                auto [it, fresh] = acc.try_emplace(u, UniPoly(Var::p));
                it->second += c.num();
            }
        }
        for (const auto& [u, c] : acc)
            if (!c.is_zero()) entries[r][basis->index(u)] = scale * RationalFunction(c);
    }
    ConnectionMatrix omega(basis, std::move(entries));

    std::map<std::pair<double, double>, SingularPoint> poles;
    for (size_t r = 0; r < NK; ++r)
        for (const PolyRoot& z : poly_roots(omega.row_denominator(r))) {
            auto key = std::make_pair(std::round(z.z.real() * 1e9) / 1e9, std::round(z.z.imag() * 1e9) / 1e9);
            auto [it, fresh] = poles.try_emplace(key, SingularPoint{z.z, z.multiplicity});
            if (!fresh) it->second.multiplicity = std::max(it->second.multiplicity, z.multiplicity);
        }
    std::vector<SingularPoint> sing;
    for (const auto& [k, v] : poles) sing.push_back(v);
    omega.set_singular_locus(std::move(sing));
    omega.build_info.decompositions = red.decompositions();
    omega.build_info = omega.diagnostics();
    omega.build_info.decompositions = red.decompositions();
    return omega;
}

std::vector<RFMatrix> block_structure(const ConnectionMatrix& omega) {
    const WordBasis& B = omega.basis();
    for (size_t r = 0; r < omega.size(); ++r)
        for (size_t c = 0; c < omega.size(); ++c)
            if (B.word(c).size() > B.word(r).size() && !omega.entry(r, c).is_zero())
                throw StructureViolation("nonzero entry above the diagonal blocks at (" + to_string(B.word(r)) + ", " +
                                         to_string(B.word(c)) + ")");
    std::vector<RFMatrix> blocks;
    for (int k = 1; k <= B.K(); ++k) {
        size_t b0 = B.block_begin(k), sz = B.block_size(k);
        RFMatrix blk(sz, std::vector<RationalFunction>(sz));
        for (size_t r = 0; r < sz; ++r)
            for (size_t c = 0; c < sz; ++c) blk[r][c] = omega.entry(b0 + r, b0 + c);
        blocks.push_back(std::move(blk));
    }
    return blocks;
}

RFMatrix kronecker_sum(const RFMatrix& theta11, int k) {
    size_t N = theta11.size(), M = 1;
    for (int i = 0; i < k; ++i) M *= N;
    RFMatrix out(M, std::vector<RationalFunction>(M));
    std::vector<size_t> a(k), b(k);
    auto digits = [&](size_t idx, std::vector<size_t>& d) {
        for (int q = k - 1; q >= 0; --q) {
            d[q] = idx % N;
            idx /= N;
        }
    };
    for (size_t r = 0; r < M; ++r) {
        digits(r, a);
        for (size_t c = 0; c < M; ++c) {
            digits(c, b);
            int diff = 0, at = -1;
            for (int q = 0; q < k; ++q)
                if (a[q] != b[q]) {
                    ++diff;
                    at = q;
                }
            if (diff == 0) {
                RationalFunction s;
                for (int q = 0; q < k; ++q) s = s + theta11[a[q]][a[q]];
                out[r][c] = s;
            } else if (diff == 1) {
                out[r][c] = theta11[a[at]][b[at]];
            }
        }
    }
    return out;
}

KroneckerReport kronecker_check(const RFMatrix& theta11, const RFMatrix& theta_kk, int k) {
    KroneckerReport rep;
    size_t N = theta11.size();
    if (N == 0) {
        rep.mismatch = "empty first block";
        return rep;
    }
    if (k < 0) {
        k = 1;
        for (size_t M = N; M < theta_kk.size(); M *= N) {
            if (N == 1) break;
            ++k;
        }
    }
    size_t M = 1;
    for (int q = 0; q < k; ++q) M *= N;
    if (k < 1 || M != theta_kk.size()) {
        rep.mismatch = "block size is not N^k";
        return rep;
    }
    RFMatrix sum = kronecker_sum(theta11, k);
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::string first_mismatch;
    do {
        // position of word (a_0..a_{k-1}) after permuting tensor factors
        std::vector<size_t> perm(M);
        for (size_t idx = 0; idx < M; ++idx) {
            std::vector<size_t> d(k);
            size_t v = idx;
            for (int q = k - 1; q >= 0; --q) {
                d[q] = v % N;
                v /= N;
            }
            size_t out = 0;
            for (int q = 0; q < k; ++q) out = out * N + d[order[q]];
            perm[idx] = out;
        }
        bool ok = true;
        for (size_t r = 0; r < M && ok; ++r)
            for (size_t c = 0; c < M && ok; ++c)
                if (!(theta_kk[r][c] == sum[perm[r]][perm[c]])) {
                    ok = false;
                    if (first_mismatch.empty())
                        first_mismatch = "entry (" + std::to_string(r) + "," + std::to_string(c) + "): " +
                                         to_string(theta_kk[r][c]) + " vs " + to_string(sum[perm[r]][perm[c]]);
                }
        if (ok) {
            rep.ok = true;
            rep.permutation = perm;
            rep.factor_order = order;
            return rep;
        }
    } while (std::next_permutation(order.begin(), order.end()));
    rep.mismatch = first_mismatch;
    return rep;
}

nlohmann::json to_json(const ConnectionMatrix& omega) {
    const WordBasis& B = omega.basis();
    nlohmann::json j;
    j["format"] = "itergm-connection";
    j["version"] = 1;
    j["n"] = B.n();
    j["K"] = B.K();
    j["N"] = B.N();
    j["variable"] = "p";
    nlohmann::json words = nlohmann::json::array();
    for (const auto& w : B.words()) words.push_back(to_string(w));
    j["basis"] = words;
    nlohmann::json entries = nlohmann::json::array();
    for (size_t r = 0; r < omega.size(); ++r)
        for (size_t c = 0; c < omega.size(); ++c)
            if (!omega.entry(r, c).is_zero()) entries.push_back({r, c, to_string(omega.entry(r, c))});
    j["entries"] = entries;
    nlohmann::json sing = nlohmann::json::array();
    for (const auto& s : omega.singular_locus())
        sing.push_back({{"re", s.p.real()}, {"im", s.p.imag()}, {"multiplicity", s.multiplicity}});
    j["singular_locus"] = sing;
    return j;
}

ConnectionMatrix connection_from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "itergm-connection") throw ParseError("not a connection document");
    auto basis = enumerate_words(j.at("n").get<int>(), j.at("K").get<int>());
    size_t NK = basis->size();
    const auto& words = j.at("basis");
    if (words.size() != NK) throw BasisMismatch("basis listing does not match n and K");
    for (size_t i = 0; i < NK; ++i)
        if (parse_word(words[i].get<std::string>()) != basis->word(i)) throw BasisMismatch("basis ordering differs");
    std::vector<std::vector<RationalFunction>> entries(NK, std::vector<RationalFunction>(NK));
    for (const auto& e : j.at("entries")) {
        size_t r = e.at(0).get<size_t>(), c = e.at(1).get<size_t>();
        if (r >= NK || c >= NK) throw ParseError("entry index out of range");
        entries[r][c] = parse_ratfunc(e.at(2).get<std::string>(), Var::p);
    }
    ConnectionMatrix omega(basis, std::move(entries));
    std::vector<SingularPoint> sing;
    for (const auto& s : j.at("singular_locus"))
        sing.push_back({Complex(s.at("re").get<double>(), s.at("im").get<double>()), s.at("multiplicity").get<int>()});
    omega.set_singular_locus(std::move(sing));
    omega.build_info = omega.diagnostics();
    return omega;
}

nlohmann::json to_json(const ReducedCombination& rc) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [w, c] : rc.coeffs) j[to_string(w)] = to_string(c);
    return j;
}

}  // namespace itergm
