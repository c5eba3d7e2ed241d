#include "itergm/linalg.hpp"

#include <stdexcept>

namespace itergm {

SolveOperator::SolveOperator(const QMatrix& a, int cols) : rows_(static_cast<int>(a.size())), cols_(cols) {
    QMatrix m = a;
    transform_.assign(rows_, QVector(rows_));
    for (int i = 0; i < rows_; ++i) transform_[i][i] = 1;
    col_is_pivot_.assign(cols_, 0);

    int r = 0;
    for (int c = 0; c < cols_ && r < rows_; ++c) {
        int piv = -1;
        for (int i = r; i < rows_; ++i)
            if (m[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[piv], m[r]);
        std::swap(transform_[piv], transform_[r]);
        Rational inv = 1 / m[r][c];
        for (int k = c; k < cols_; ++k)
            if (m[r][k] != 0) m[r][k] *= inv;
        for (auto& v : transform_[r])
            if (v != 0) v *= inv;
        for (int i = 0; i < rows_; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rational f = m[i][c];
            for (int k = c; k < cols_; ++k)
                if (m[r][k] != 0) m[i][k] -= f * m[r][k];
            for (int k = 0; k < rows_; ++k)
                if (transform_[r][k] != 0) transform_[i][k] -= f * transform_[r][k];
        }
        pivots_.push_back(c);
        col_is_pivot_[c] = 1;
        ++r;
    }
}

bool SolveOperator::solve(const QVector& b, QVector& x) const {
    QVector c = mat_vec(transform_, b);
    for (int i = rank(); i < rows_; ++i)
        if (c[i] != 0) return false;
    x.assign(cols_, 0);
    for (int k = 0; k < rank(); ++k) x[pivots_[k]] = c[k];
    return true;
}

QVector mat_vec(const QMatrix& a, const QVector& v) {
    QVector out(a.size());
    for (size_t i = 0; i < a.size(); ++i) {
        Rational s = 0;
        for (size_t k = 0; k < v.size(); ++k)
            if (a[i][k] != 0 && v[k] != 0) s += a[i][k] * v[k];
        out[i] = s;
    }
    return out;
}

QMatrix mat_mul(const QMatrix& a, const QMatrix& b) {
    size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), l = b.size();
    QMatrix out(n, QVector(m));
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < l; ++k) {
            if (a[i][k] == 0) continue;
            for (size_t j = 0; j < m; ++j) out[i][j] += a[i][k] * b[k][j];
        }
    return out;
}

Rational determinant(QMatrix a) {
    size_t n = a.size();
    Rational det = 1;
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (piv < n && a[piv][c] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            Rational f = a[i][c] / a[c][c];
            for (size_t k = c; k < n; ++k) a[i][k] -= f * a[c][k];
        }
    }
    return det;
}

// Faddeev-LeVerrier
UniPoly characteristic_polynomial(const QMatrix& a, Var v) {
    size_t n = a.size();
    std::vector<Rational> coef(n + 1);
    coef[n] = 1;
    QMatrix m(n, QVector(n));
    for (size_t k = 1; k <= n; ++k) {
        QMatrix am = mat_mul(a, m);
        for (size_t i = 0; i < n; ++i) am[i][i] += coef[n - k + 1];
        m = am;
        QMatrix prod = mat_mul(a, m);
        Rational tr = 0;
        for (size_t i = 0; i < n; ++i) tr += prod[i][i];
        coef[n - k] = -tr / static_cast<long>(k);
    }
    return UniPoly(v, std::move(coef));
}

}  // namespace itergm
