#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "itergm/forms.hpp"
#include "itergm/poly.hpp"

namespace itergm {

// Weights making the top part of H quasi-homogeneous with an isolated
// critical point; all exact solves run weight piece by weight piece.
struct Grading {
    int wx = 1, wy = 1;
    int top = 0;  // weighted degree of H

    int weight(int i, int j) const { return i * wx + j * wy; }
    int weight(const BivarPoly& p) const { return p.weighted_degree(wx, wy); }
    int weight(const PolyOneForm& w) const;  // d preserves this weight
};

struct CriticalValue {
    Complex value;
    double radius = 0;  // a posteriori error bound
    int multiplicity = 1;
};

struct RankWitness {
    int wx = 1, wy = 1;
    int probe_weight = 0;       // systems checked for every weight 1..probe_weight
    int rows = 0, cols = 0, rank = 0;  // summed over the probed weight pieces
    int deficient_pieces = 0;   // pieces whose system is not surjective
    int petrov_rank = 0;        // independent basic forms
    int milnor_number = 0;      // dimension of the Jacobian algebra
};

struct GenericityReport {
    bool morse_distinct = false;
    bool nondegenerate_points = false;
    std::vector<CriticalValue> critical_values;
    bool petrov_basis_ok = false;
    bool basis_independent = false;
    RankWitness witness;
    bool transversal_ok = false;
    int transversal_degree = 0;                 // deg_p H(0, p)
    std::vector<Complex> tangency_levels;       // H(0, p) where H_y(0, p) = 0
    bool smooth_level = false;                  // level 0 avoids critical values
    std::vector<std::string> warnings;
};

namespace detail {
class PetrovEngine;
}

struct Hamiltonian {
    BivarPoly poly;
    int n = 0;
    std::vector<PolyOneForm> basic_forms;
    UniPoly m{Var::h};
    GenericityReport genericity;
    Rational level_offset;  // constant term of H
    Grading grading;
    std::shared_ptr<detail::PetrovEngine> engine;

    int N() const { return static_cast<int>(basic_forms.size()); }
    // (i, j) with basic form x^(i-1) y^j dx
    std::pair<int, int> basic_index(int l) const { return {l % n + 1, l / n + 1}; }
};

struct CertifyOptions {
    double collision_tol = 1e-10;
};

Hamiltonian certify(const BivarPoly& H, const CertifyOptions& opts = {});

struct PetrovDecomposition {
    std::vector<UniPoly> f_coeffs;  // in h
    BivarPoly f, g;
    PolyOneForm source;

    int source_degree = 0;  // coefficient degree + 1, so that deg dg = deg g
    int max_f_degree = -1, max_g_degree = -1, max_fi_degree = -1;
    bool within_bounds = true;

    PolyOneForm rebuild(const Hamiltonian& H) const;
};

PetrovDecomposition petrov_decompose(const PolyOneForm& theta, const Hamiltonian& H);

// eta = B dx - A dy with m(H) R = A H_x + B H_y
PolyOneForm jacobian_divide(const PolyTwoForm& mu, const Hamiltonian& H);

// (eta, m) with eta = jacobian_divide(d theta)
std::pair<PolyOneForm, UniPoly> gelfand_leray(const PolyOneForm& theta, const Hamiltonian& H);

struct JacobianNormalForm {
    BivarPoly a, b, remainder;  // P = a H_x + b H_y + remainder
};
JacobianNormalForm jacobian_normal_form(const BivarPoly& P, const Hamiltonian& H);

}  // namespace itergm
