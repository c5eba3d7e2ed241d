#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "itergm/chen.hpp"
#include "itergm/connection.hpp"
#include "itergm/forms.hpp"
#include "itergm/petrov.hpp"
#include "json.hpp"

namespace itergm {

// Dense double-precision copy of a polynomial for fast evaluation.
class NumPoly {
public:
    NumPoly() = default;
    explicit NumPoly(const BivarPoly& p);

    double operator()(double x, double y) const;
    Complex operator()(Complex x, Complex y) const;
    bool is_zero() const { return deg_ < 0; }

private:
    int deg_ = -1;
    std::vector<double> c_;  // c_[i * (deg_ + 1) + j] for x^i y^j
};

struct NumForm {
    NumPoly P, Q;
    NumForm() = default;
    explicit NumForm(const PolyOneForm& w) : P(w.P), Q(w.Q) {}
    // w(z) applied to the velocity (vx, vy)
    double operator()(double x, double y, double vx, double vy) const { return P(x, y) * vx + Q(x, y) * vy; }
};

struct TraceOptions {
    double local_tol = 1e-9;     // Runge-Kutta local error, absolute and relative
    double level_tol = 1e-10;    // |H - t| after projection, relative to max(1, |t|, |grad H| |z|)
    double closure_tol = 1e-7;   // distance between start and return point
    double arclength_budget = 1e3;
    double escape_radius = 1e3;  // scaled by max(1, |p|)
    double max_step = 0.1;       // scaled by max(1, |p|)
    int orientation = 1;         // +1 follows x' = H_y, y' = -H_x
    int traversals = 1;
    bool keep_samples = true;
};

struct OvalTrace {
    double t = 0, p = 0;
    std::vector<std::array<double, 2>> samples;
    double closure_residual = 0;
    int orientation = 1;
    int traversals = 1;
    double arclength = 0;
    int steps = 0;
};

// Closed level curve through (0, p_seed), first return to {x = 0} crossing the same way.
OvalTrace trace_oval(const Hamiltonian& H, double p_seed, const TraceOptions& opts = {});

// Iterated integrals over the oval of words in an arbitrary list of letters;
// the first letter of a tuple is the outermost integration.
struct TupleIntegrals {
    std::vector<double> values, errors;
    OvalTrace trace;
};

struct QuadratureOptions {
    TraceOptions trace;
    double refine = 1e-2;        // second run uses local_tol * refine
    double error_floor = 1e-13;  // relative floor added to each estimate
};

TupleIntegrals integrate_tuples(const Hamiltonian& H, double p, const std::vector<PolyOneForm>& letters,
                                const std::vector<std::vector<int>>& tuples, const QuadratureOptions& opts = {});

struct IINumericVector {
    std::shared_ptr<const WordBasis> basis;
    std::vector<double> values, errors;
    double at(const Word& w) const { return values[basis->index(w)]; }
    double error(const Word& w) const { return errors[basis->index(w)]; }
};

// Re-integrates along the trace (same base point, orientation and traversal count).
IINumericVector eval_iterated(const Hamiltonian& H, const OvalTrace& trace, std::shared_ptr<const WordBasis> basis,
                              const QuadratureOptions& opts = {});
IINumericVector eval_iterated(const Hamiltonian& H, double p, std::shared_ptr<const WordBasis> basis,
                              const QuadratureOptions& opts = {});

struct ContinuationOptions {
    double tol = 1e-12;
    double margin = 1e-4;     // minimum distance from the singular locus
    double min_step = 1e-12;  // in the path parameter
    long max_steps = 2000000;
};

// dv/dp = Omega(p) v along a polyline in the complex p-plane
std::vector<Complex> continue_system(const ConnectionMatrix& omega, const std::vector<Complex>& path,
                                     const std::vector<Complex>& v0, const ContinuationOptions& opts = {});

struct MonodromyResult {
    Complex center;
    double radius = 0;
    Complex base;                       // center + radius, loop runs counterclockwise
    size_t size = 0;
    std::vector<Complex> matrix;        // row-major, maps the starting frame to its continuation
    std::vector<Complex> eigenvalues;   // cluster centroids, see below
    std::vector<double> unity_distance; // to the nearest root of unity of order <= max_order
    Complex determinant;
    int max_order = 60;
};

MonodromyResult monodromy(const ConnectionMatrix& omega, Complex center, double radius,
                          const ContinuationOptions& opts = {}, int max_order = 60);

// Eigenvalues of a dense row-major matrix; eigenvalues closer than cluster_tol
// are replaced by their common mean (stable under Jordan-block splitting).
std::vector<Complex> clustered_eigenvalues(const std::vector<Complex>& a, size_t n, double cluster_tol = 1e-3);
std::vector<Complex> block_of(const std::vector<Complex>& a, size_t n, size_t begin, size_t size);
double unity_distance(Complex z, int max_order = 60);
// worst distance of a greedy nearest matching between two multisets
double spectrum_distance(std::vector<Complex> a, std::vector<Complex> b);

// p with H(0, p) a critical value of H
std::vector<Complex> critical_preimages(const Hamiltonian& H);

struct PFPoint {
    double p = 0;
    double rel_error = 0;
    double step = 0;
};
struct PFCheck {
    std::vector<PFPoint> points;
    double max_rel_error = 0;
};

// Richardson-extrapolated central differences of the basic integrals vs Omega v.
// The step is h_max or 1/20 of the distance to the singular locus, whichever is smaller.
PFCheck verify_pf(const Hamiltonian& H, const ConnectionMatrix& omega, const std::vector<double>& ps, double h_max = 2e-2,
                  const QuadratureOptions& opts = {});

std::string trace_csv(const OvalTrace& trace);
std::string integrals_csv(const IINumericVector& v);
nlohmann::json to_json(const MonodromyResult& m);
nlohmann::json to_json(const OvalTrace& t, bool with_samples = false);

}  // namespace itergm
