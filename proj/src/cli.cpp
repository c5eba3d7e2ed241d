#include "itergm/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "itergm/connection.hpp"
#include "itergm/errors.hpp"
#include "itergm/melnikov.hpp"
#include "itergm/numeric.hpp"
#include "itergm/parse.hpp"
#include "itergm/petrov.hpp"

namespace itergm {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

double to_real(const std::string& v, int line, const std::string& key) {
    const char* s = v.c_str();
    char* end = nullptr;
    double x = std::strtod(s, &end);
    if (v.empty() || end == s || trim(end) != "" || !std::isfinite(x))
        throw ConfigError("'" + v + "' is not a real number", line, key);
    return x;
}

long to_int(const std::string& v, int line, const std::string& key) {
    const char* s = v.c_str();
    char* end = nullptr;
    long x = std::strtol(s, &end, 10);
    if (v.empty() || end == s || trim(end) != "") throw ConfigError("'" + v + "' is not an integer", line, key);
    return x;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

json JobConfig::to_json() const {
    json j;
    j["hamiltonian"] = hamiltonian;
    j["perturbation"] = {{"P", perturbation_P}, {"Q", perturbation_Q}};
    j["K"] = K;
    j["K_max"] = K_max;
    j["p_interval"] = has_interval ? json::array({p_lo, p_hi}) : json(nullptr);
    j["p_seed"] = has_seed_point ? json(p_seed) : json(nullptr);
    j["seed"] = seed;
    j["samples"] = samples;
    j["pf_points"] = pf_points;
    j["monodromy_radius"] = monodromy_radius;
    j["max_order"] = max_order;
    j["eps"] = {{"lo", eps_lo}, {"hi", eps_hi}, {"count", eps_count}};
    j["zero_grid"] = zero_grid;
    j["symbolic"] = symbolic;
    j["tolerances"] = {{"local", tol.local},     {"level", tol.level},
                       {"closure", tol.closure}, {"refine", tol.refine},
                       {"vanishing", tol.vanishing}, {"pf_step", tol.pf_step},
                       {"continuation", tol.continuation}, {"margin", tol.margin},
                       {"zero_width", tol.zero_width}, {"tangency", tol.tangency},
                       {"poincare", tol.poincare}};
    j["commands"] = commands;
    return j;
}

JobConfig parse_config(const std::string& text) {
    JobConfig cfg;
    std::set<std::string> seen;
    std::map<std::string, double*> tols{{"tol.local", &cfg.tol.local},       {"tol.level", &cfg.tol.level},
                                        {"tol.closure", &cfg.tol.closure},   {"tol.refine", &cfg.tol.refine},
                                        {"tol.vanishing", &cfg.tol.vanishing}, {"tol.pf_step", &cfg.tol.pf_step},
                                        {"tol.continuation", &cfg.tol.continuation},
                                        {"tol.margin", &cfg.tol.margin},     {"tol.zero_width", &cfg.tol.zero_width},
                                        {"tol.tangency", &cfg.tol.tangency}, {"tol.poincare", &cfg.tol.poincare}};
    std::map<std::string, int> lines;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty()) continue;
        size_t eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line, "");
        std::string key = trim(s.substr(0, eq)), v = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key", line, "");
        if (!seen.insert(key).second) throw ConfigError("duplicate key", line, key);
        lines[key] = line;
        auto positive_int = [&](int& dst, long lo) {
            long x = to_int(v, line, key);
            if (x < lo) throw ConfigError("must be at least " + std::to_string(lo), line, key);
            dst = static_cast<int>(x);
        };
        if (key == "hamiltonian") {
            cfg.hamiltonian = v;
        } else if (key == "perturbation.P") {
            cfg.perturbation_P = v;
        } else if (key == "perturbation.Q") {
            cfg.perturbation_Q = v;
        } else if (key == "K") {
            positive_int(cfg.K, 1);
        } else if (key == "K_max") {
            positive_int(cfg.K_max, 1);
        } else if (key == "p_interval") {
            if (v.size() < 2 || v.front() != '[' || v.back() != ']')
                throw ConfigError("expected [lo, hi]", line, key);
            auto parts = split_list(v.substr(1, v.size() - 2));
            if (parts.size() != 2) throw ConfigError("expected [lo, hi]", line, key);
            cfg.p_lo = to_real(parts[0], line, key);
            cfg.p_hi = to_real(parts[1], line, key);
            if (!(cfg.p_lo < cfg.p_hi)) throw ConfigError("lo must be below hi", line, key);
            cfg.has_interval = true;
        } else if (key == "p_seed") {
            cfg.p_seed = to_real(v, line, key);
            cfg.has_seed_point = true;
        } else if (key == "seed") {
            long x = to_int(v, line, key);
            if (x < 0) throw ConfigError("must be nonnegative", line, key);
            cfg.seed = static_cast<std::uint64_t>(x);
        } else if (key == "samples") {
            positive_int(cfg.samples, 2);
        } else if (key == "pf_points") {
            positive_int(cfg.pf_points, 1);
        } else if (key == "monodromy_radius") {
            cfg.monodromy_radius = to_real(v, line, key);
            if (!(cfg.monodromy_radius > 0)) throw ConfigError("must be positive", line, key);
        } else if (key == "max_order") {
            positive_int(cfg.max_order, 1);
        } else if (key == "eps_lo" || key == "eps_hi") {
            double x = to_real(v, line, key);
            if (!(x > 0)) throw ConfigError("must be positive", line, key);
            (key == "eps_lo" ? cfg.eps_lo : cfg.eps_hi) = x;
        } else if (key == "eps_count") {
            positive_int(cfg.eps_count, 3);
        } else if (key == "zero_grid") {
            positive_int(cfg.zero_grid, 0);
        } else if (key == "symbolic") {
            if (v != "true" && v != "false") throw ConfigError("expected true or false", line, key);
            cfg.symbolic = v == "true";
        } else if (key == "commands") {
            for (const auto& c : split_list(v)) {
                if (std::find(command_order().begin(), command_order().end(), c) == command_order().end())
                    throw ConfigError("unknown command '" + c + "'", line, key);
                if (std::find(cfg.commands.begin(), cfg.commands.end(), c) != cfg.commands.end())
                    throw ConfigError("command listed twice: " + c, line, key);
                cfg.commands.push_back(c);
            }
        } else if (auto it = tols.find(key); it != tols.end()) {
            double x = to_real(v, line, key);
            if (!(x > 0)) throw ConfigError("tolerances must be positive", line, key);
            *it->second = x;
        } else {
            throw ConfigError("unknown key", line, key);
        }
    }

    auto at = [&](const std::string& k) { return lines.count(k) ? lines[k] : 0; };
    if (cfg.hamiltonian.empty()) throw ConfigError("missing", 0, "hamiltonian");
    if (cfg.commands.empty()) throw ConfigError("missing", 0, "commands");
    for (auto [key, src] : {std::pair<const char*, const std::string*>{"hamiltonian", &cfg.hamiltonian},
                            {"perturbation.P", &cfg.perturbation_P},
                            {"perturbation.Q", &cfg.perturbation_Q}}) {
        try {
            parse_bivar(*src);
        } catch (const ParseError& e) {
            throw ConfigError(std::string("malformed polynomial in ") + key + " (" + e.what() + ")", at(key), key);
        }
    }
    if (!(cfg.eps_lo < cfg.eps_hi)) throw ConfigError("eps_lo must be below eps_hi", at("eps_lo"), "eps_lo");

    auto needs = [&](const char* cmd) {
        return std::find(cfg.commands.begin(), cfg.commands.end(), cmd) != cfg.commands.end();
    };
    for (const char* c : {"verify-pf", "melnikov", "zeros"})
        if (needs(c) && !cfg.has_interval) throw ConfigError(std::string("required by ") + c, 0, "p_interval");
    if (needs("poincare-fit") && !cfg.has_seed_point) throw ConfigError("required by poincare-fit", 0, "p_seed");
    return cfg;
}

JobConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path, 0, "");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const JobConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(cfg.to_json().dump())));
    return buf;
}

json RunReport::full() const {
    json j = document;
    j["timings"] = timings;
    return j;
}

namespace {

// Lazily computed shared state; a failed stage remembers its error so that
// dependent commands report it instead of recomputing.
class Job {
public:
    explicit Job(const JobConfig& cfg) : cfg_(cfg) {
        quad_.trace.local_tol = cfg.tol.local;
        quad_.trace.level_tol = cfg.tol.level;
        quad_.trace.closure_tol = cfg.tol.closure;
        quad_.refine = cfg.tol.refine;
        cont_.tol = cfg.tol.continuation;
        cont_.margin = cfg.tol.margin;
    }

    const Hamiltonian& H() {
        return stage(H_, "certify", [&] { return certify(parse_bivar(cfg_.hamiltonian)); });
    }
    const ConnectionMatrix& omega() {
        return stage(omega_, "connection", [&] { return build_connection(H(), cfg_.K); });
    }
    PerturbationForm form() const {
        return {PolyOneForm(parse_bivar(cfg_.perturbation_P), parse_bivar(cfg_.perturbation_Q))};
    }
    const MelnikovReport& melnikov() {
        return stage(mel_, "melnikov", [&] {
            MelnikovOptions o;
            o.quadrature = quad_;
            o.vanishing_tol = cfg_.tol.vanishing;
            o.symbolic = cfg_.symbolic && cfg_.K_max <= 3;
            return melnikov_sequence(H(), form(), cfg_.K_max, {cfg_.p_lo, cfg_.p_hi, cfg_.samples}, o);
        });
    }

    json cmd_certify(json& diag) {
        const Hamiltonian& h = H();
        const GenericityReport& g = h.genericity;
        json cv = json::array();
        for (const auto& c : g.critical_values)
            cv.push_back({{"value", complex_json(c.value)}, {"radius", c.radius}, {"multiplicity", c.multiplicity}});
        json basic = json::array();
        for (const auto& w : h.basic_forms) basic.push_back(to_string(w));
        diag["hamiltonian_degree"] = h.poly.degree();
        diag["petrov_rank"] = h.N();
        return {{"n", h.n},
                {"N", h.N()},
                {"m", to_string(h.m)},
                {"grading", {{"wx", h.grading.wx}, {"wy", h.grading.wy}, {"top", h.grading.top}}},
                {"basic_forms", basic},
                {"critical_values", cv},
                {"genericity",
                 {{"morse_distinct", g.morse_distinct},
                  {"nondegenerate_points", g.nondegenerate_points},
                  {"petrov_basis_ok", g.petrov_basis_ok},
                  {"basis_independent", g.basis_independent},
                  {"transversal_ok", g.transversal_ok},
                  {"smooth_level", g.smooth_level},
                  {"milnor_number", g.witness.milnor_number},
                  {"warnings", g.warnings}}}};
    }

    json cmd_decompose(json& diag) {
        PerturbationForm w = form();
        PetrovDecomposition d = petrov_decompose(w.omega, H());
        json fs = json::array();
        for (const auto& f : d.f_coeffs) fs.push_back(to_string(f));
        bool exact = d.rebuild(H()) == w.omega;
        diag["perturbation_degree"] = w.degree();
        diag["decomposition_degrees"] = {{"f", d.max_f_degree}, {"g", d.max_g_degree}, {"f_i", d.max_fi_degree}};
        return {{"form", to_string(w.omega)}, {"f_coeffs", fs},      {"f", to_string(d.f)},
                {"g", to_string(d.g)},        {"residual_zero", exact}, {"within_bounds", d.within_bounds}};
    }

    json cmd_connection(json& diag) {
        const ConnectionMatrix& om = omega();
        ConnectionDiagnostics cd = om.diagnostics();
        diag["connection"] = {{"size", om.size()},
                              {"max_degree", cd.max_degree},
                              {"log10_size", cd.log10_size},
                              {"nonzero_entries", cd.nonzero_entries},
                              {"decompositions", om.build_info.decompositions}};
        json structure = {{"lower_block_triangular", true}};
        std::vector<RFMatrix> blocks;
        try {
            blocks = block_structure(om);
        } catch (const StructureViolation& e) {
            structure["lower_block_triangular"] = false;
            structure["violation"] = e.what();
        }
        json kron = json::array();
        for (size_t k = 2; k <= blocks.size(); ++k) {
            KroneckerReport kr = kronecker_check(blocks[0], blocks[k - 1], static_cast<int>(k));
            json e = {{"k", k}, {"ok", kr.ok}, {"permutation", kr.permutation}};
            if (!kr.ok) e["mismatch"] = kr.mismatch;
            kron.push_back(e);
        }
        structure["kronecker"] = kron;
        return {{"K", cfg_.K}, {"structure", structure}, {"matrix", to_json(om)}};
    }

    // interior points of the nest interval, one per equal cell, jittered from the seed
    std::vector<double> pf_points() {
        std::mt19937_64 rng(cfg_.seed);
        std::vector<double> ps;
        int n = cfg_.pf_points;
        double w = (cfg_.p_hi - cfg_.p_lo) / n;
        for (int k = 0; k < n; ++k) {
            double u = 0.25 + 0.5 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
            ps.push_back(cfg_.p_lo + w * (k + u));
        }
        return ps;
    }

    json cmd_verify_pf(std::map<std::string, std::string>& csv) {
        PFCheck chk = verify_pf(H(), omega(), pf_points(), cfg_.tol.pf_step, quad_);
        json pts = json::array();
        std::string table = "p,rel_error,step\n";
        char buf[96];
        for (const auto& q : chk.points) {
            pts.push_back({{"p", q.p}, {"rel_error", q.rel_error}, {"step", q.step}});
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", q.p, q.rel_error, q.step);
            table += buf;
        }
        csv["pf_points.csv"] = table;
        double mid = 0.5 * (cfg_.p_lo + cfg_.p_hi);
        csv["basic_integrals.csv"] = integrals_csv(eval_iterated(H(), mid, omega().basis_ptr(), quad_));
        return {{"points", pts}, {"max_rel_error", chk.max_rel_error}, {"max_step", cfg_.tol.pf_step}};
    }

    json cmd_monodromy() {
        const ConnectionMatrix& om = omega();
        std::vector<Complex> centers = critical_preimages(H());
        std::sort(centers.begin(), centers.end(), [](Complex a, Complex b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        std::vector<Complex> sing;
        for (const auto& s : om.singular_locus()) sing.push_back(s.p);
        const WordBasis& B = om.basis();
        json loops = json::array();
        double worst_unity = 0, worst_products = 0;
        for (Complex c : centers) {
            double r = cfg_.monodromy_radius;
            if (r <= 0) {
                double d = 1e300;
                for (Complex s : sing)
                    if (std::abs(s - c) > 1e-8) d = std::min(d, std::abs(s - c));
                r = std::min(0.3, 0.4 * d);
            }
            MonodromyResult m = monodromy(om, c, r, cont_, cfg_.max_order);
            json e = to_json(m);
            auto m11 = block_of(m.matrix, m.size, B.block_begin(1), B.block_size(1));
            auto e1 = clustered_eigenvalues(m11, B.block_size(1));
            double u1 = 0;
            for (Complex z : e1) u1 = std::max(u1, unity_distance(z, cfg_.max_order));
            e["theta11_max_unity_distance"] = u1;
            worst_unity = std::max(worst_unity, u1);
            if (B.K() >= 2) {
                auto m22 = block_of(m.matrix, m.size, B.block_begin(2), B.block_size(2));
                std::vector<Complex> prods;
                for (Complex a : e1)
                    for (Complex b : e1) prods.push_back(a * b);
                double d = spectrum_distance(clustered_eigenvalues(m22, B.block_size(2)), prods);
                e["theta22_product_distance"] = d;
                worst_products = std::max(worst_products, d);
            }
            loops.push_back(e);
        }
        json out = {{"loops", loops}, {"max_unity_distance", worst_unity}};
        if (B.K() >= 2) out["max_product_distance"] = worst_products;
        return out;
    }

    json cmd_melnikov(json& diag, std::map<std::string, std::string>& csv) {
        const MelnikovReport& r = melnikov();
        diag["melnikov_terms"] = r.terms;
        csv["melnikov_samples.csv"] = samples_csv(r);
        return to_json(r);
    }

    json cmd_poincare_fit() {
        int order = melnikov().order;
        PoincareOptions po;
        po.tol = cfg_.tol.poincare;
        po.refine = cfg_.tol.refine;
        EpsFit fit = fit_order(H(), form(), cfg_.p_seed, order, 0.0, cfg_.eps_lo, cfg_.eps_hi, cfg_.eps_count, po);
        json j = to_json(fit);
        j["p"] = cfg_.p_seed;
        auto v = (*melnikov().evaluator)(cfg_.p_seed);
        j["melnikov_p_chart"] = v.p_chart;
        return j;
    }

    json cmd_zeros() {
        ZeroOptions zo;
        zo.grid = cfg_.zero_grid;
        zo.width = cfg_.tol.zero_width;
        zo.tangency_tol = cfg_.tol.tangency;
        ZeroCount z = count_zeros(melnikov(), cfg_.p_lo, cfg_.p_hi, zo);
        json j = to_json(z);
        j["order"] = melnikov().order;
        return j;
    }

private:
    template <class T, class F>
    const T& stage(std::optional<T>& slot, const char* name, F make) {
        if (slot) return *slot;
        if (auto it = failed_.find(name); it != failed_.end()) throw Error("DependencyFailed", it->second);
        try {
            slot.emplace(make());
        } catch (const std::exception& e) {
            failed_[name] = std::string(name) + " failed: " + e.what();
            throw;
        }
        return *slot;
    }

    const JobConfig& cfg_;
    QuadratureOptions quad_;
    ContinuationOptions cont_;
    std::optional<Hamiltonian> H_;
    std::optional<ConnectionMatrix> omega_;
    std::optional<MelnikovReport> mel_;
    std::map<std::string, std::string> failed_;
};

}  // namespace

RunReport run(const JobConfig& cfg) {
    RunReport rep;
    Job job(cfg);
    json results = json::object(), diag = json::object();
    for (const auto& name : command_order()) {
        if (std::find(cfg.commands.begin(), cfg.commands.end(), name) == cfg.commands.end()) continue;
        auto t0 = std::chrono::steady_clock::now();
        json entry;
        try {
            json res;
            if (name == "certify") res = job.cmd_certify(diag);
            else if (name == "decompose") res = job.cmd_decompose(diag);
            else if (name == "connection") res = job.cmd_connection(diag);
            else if (name == "verify-pf") res = job.cmd_verify_pf(rep.csv);
            else if (name == "monodromy") res = job.cmd_monodromy();
            else if (name == "melnikov") res = job.cmd_melnikov(diag, rep.csv);
            else if (name == "poincare-fit") res = job.cmd_poincare_fit();
            else res = job.cmd_zeros();
            entry = {{"status", "ok"}, {"result", res}};
        } catch (const Error& e) {
            entry = {{"status", "error"}, {"error", {{"kind", e.kind()}, {"message", e.what()}}}};
            rep.ok = false;
        } catch (const std::exception& e) {
            entry = {{"status", "error"}, {"error", {{"kind", "Exception"}, {"message", e.what()}}}};
            rep.ok = false;
        }
        results[name] = entry;
        rep.timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    rep.document = {{"schema_version", kSchemaVersion},
                    {"config_hash", config_hash(cfg)},
                    {"config", cfg.to_json()},
                    {"results", results},
                    {"diagnostics", diag},
                    {"ok", rep.ok}};
    return rep;
}

}  // namespace itergm
