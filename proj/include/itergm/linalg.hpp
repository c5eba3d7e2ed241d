#pragma once

#include <vector>

#include "itergm/poly.hpp"

namespace itergm {

using QVector = std::vector<Rational>;
using QMatrix = std::vector<QVector>;  // row-major

// Reduced row echelon factorisation T*A = R of an exact matrix. Pivots are
// taken in column order, so earlier columns are preferred as basic variables;
// solve() returns the solution with every free variable set to zero.
class SolveOperator {
public:
    SolveOperator() = default;
    SolveOperator(const QMatrix& a, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int rank() const { return static_cast<int>(pivots_.size()); }
    bool surjective() const { return rank() == rows_; }
    const std::vector<int>& pivots() const { return pivots_; }
    bool is_pivot(int col) const { return col_is_pivot_[col]; }

    // false when b is outside the column space
    bool solve(const QVector& b, QVector& x) const;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<int> pivots_;
    std::vector<char> col_is_pivot_;
    QMatrix transform_;  // rows_ x rows_
};

QVector mat_vec(const QMatrix& a, const QVector& v);
QMatrix mat_mul(const QMatrix& a, const QMatrix& b);
Rational determinant(QMatrix a);
// det(h*I - A), monic
UniPoly characteristic_polynomial(const QMatrix& a, Var v);

}  // namespace itergm
