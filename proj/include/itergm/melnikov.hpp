#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "itergm/connection.hpp"
#include "itergm/numeric.hpp"
#include "json.hpp"

namespace itergm {

struct PerturbationForm {
    PolyOneForm omega;
    int degree() const { return omega.degree(); }
};

// coeff(p) * F_letters, where F_(a1..ak)(z) is the iterated integral along the
// level curve from the base point (0, p) to z, first letter outermost
struct PrimitiveTerm {
    RationalFunction coeff;
    std::vector<PolyOneForm> letters;
};
using PrimitiveSum = std::vector<PrimitiveTerm>;

// Next factor of the inductive sequence: given f with omega_j = f * omega
// relatively exact, returns the leafwise primitive of the Gelfand-Leray form
// of d(omega_j) vanishing at the base point, i.e. f_{j+1} with omega_{j+1} = f_{j+1} * omega.
PrimitiveSum next_factor(const PrimitiveSum& f, const PolyOneForm& omega, const Hamiltonian& H);

// factor of omega_k, starting from f_1 = 1
PrimitiveSum melnikov_factor(const PolyOneForm& omega, const Hamiltonian& H, int k);

// Numerically evaluates -(closed integral of f * omega) at points of the nest.
class MelnikovEvaluator {
public:
    MelnikovEvaluator(const Hamiltonian& H, const PolyOneForm& omega, const PrimitiveSum& f,
                      QuadratureOptions opts = {});

    struct Value {
        double p = 0, t = 0;
        double value = 0;  // -(closed integral), level chart
        double error = 0;
        double arclength = 0;
        double p_chart = 0;  // value / H_y(0, p)
    };
    Value operator()(double p) const;
    size_t tuples() const { return tuples_.size(); }

private:
    Hamiltonian H_;
    std::vector<PolyOneForm> letters_;
    std::vector<std::vector<int>> tuples_;
    std::vector<RationalFunction> coeffs_;
    UniPoly level_;
    QuadratureOptions opts_;
};

struct NestInterval {
    double lo = 0, hi = 0;
    int samples = 9;
    std::vector<double> points() const;  // evenly spaced, ends included
};

struct MelnikovOptions {
    QuadratureOptions quadrature;
    double vanishing_tol = 1e-7;  // times the oval arclength
    bool symbolic = false;        // also run reduce_melnikov_symbolic when K <= 3
};

struct ExactnessLog {
    int j = 0;
    double max_abs = 0;    // over the samples
    double tolerance = 0;  // largest per-sample threshold
    bool vanishing = false;
    std::optional<bool> petrov_zero;  // j = 1 only: every f_i vanishes identically
};

struct MelnikovReport {
    int order = 0;
    std::vector<MelnikovEvaluator::Value> samples;
    std::vector<ExactnessLog> log;
    size_t terms = 0;
    std::shared_ptr<const MelnikovEvaluator> evaluator;
    double vanishing_tol = 1e-7;
    std::optional<ReducedCombination> symbolic;
};

MelnikovReport melnikov_sequence(const Hamiltonian& H, const PerturbationForm& omega, int K_max,
                                 const NestInterval& nest, const MelnikovOptions& opts = {});

// M_K as a combination of basic iterated integrals with coefficients rational in p
ReducedCombination reduce_melnikov_symbolic(const Hamiltonian& H, const PerturbationForm& omega, int K);

struct ZeroOptions {
    int grid = 33;             // extra evenly spaced probes besides the report samples
    double width = 5e-7;       // bracket width target
    double tangency_tol = -1;  // |M| threshold for near-tangency flags; < 0 uses the vanishing rule
};

struct ZeroBracket {
    double lo = 0, hi = 0;
    int multiplicity = 1;
};

struct ZeroCount {
    int count = 0;
    std::vector<ZeroBracket> brackets;
    std::vector<double> near_tangencies;  // local minima of |M| below tolerance without sign change
    int evaluations = 0;
};

ZeroCount count_zeros(const MelnikovReport& report, double p_lo, double p_hi, const ZeroOptions& opts = {});

struct PoincareOptions {
    double tol = 1e-13;
    double refine = 1e-2;
    double max_step = 0.05;  // scaled by max(1, |p|)
    double arclength_budget = 1e3;
    double escape_radius = 1e3;
};

struct PoincareValue {
    double delta = 0;  // return coordinate on x = 0
    double error = 0;
    double arclength = 0;
};

// First return to x = 0 of x' = H_y + eps Q, y' = -H_x - eps P from (0, p).
PoincareValue poincare_map(const Hamiltonian& H, const PerturbationForm& omega, double eps, double p,
                           const PoincareOptions& opts = {});

struct EpsFit {
    std::vector<double> eps, residual, error;
    std::vector<bool> used;
    double slope = 0;
    double leading = 0;  // a in residual ~ a eps^order + b eps^(order+1)
    int order = 1;
};

// Residual Delta - p - eps * first_term over log-spaced eps; points below
// 100 x error are dropped before the least-squares slope.
EpsFit fit_order(const Hamiltonian& H, const PerturbationForm& omega, double p, int order, double first_term = 0,
                 double eps_lo = 1e-4, double eps_hi = 1e-2, int count = 8, const PoincareOptions& opts = {});

nlohmann::json to_json(const MelnikovReport& r);
nlohmann::json to_json(const ZeroCount& z);
nlohmann::json to_json(const EpsFit& f);
std::string samples_csv(const MelnikovReport& r);

}  // namespace itergm
