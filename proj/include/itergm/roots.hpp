#pragma once

#include <vector>

#include "itergm/poly.hpp"

namespace itergm {

struct PolyRoot {
    Complex z;
    int multiplicity = 1;
    double radius = 0;
};

// Yun square-free split, then companion eigenvalues polished by Newton.
std::vector<PolyRoot> poly_roots(const UniPoly& f);

// m = prod a_k^k with a_k square-free and pairwise coprime
std::vector<UniPoly> squarefree_factors(const UniPoly& f);

}  // namespace itergm
