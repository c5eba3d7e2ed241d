#include "itergm/roots.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace itergm {

std::vector<UniPoly> squarefree_factors(const UniPoly& f) {
    std::vector<UniPoly> out;
    if (f.degree() <= 0) return out;
    UniPoly q, r;
    UniPoly fp = f.derivative();
    UniPoly b = gcd(f, fp);
    UniPoly c, d;
    divmod(f, b, c, r);
    divmod(fp, b, d, r);
    d = d - c.derivative();
    while (c.degree() > 0) {
        UniPoly a = gcd(c, d);
        out.push_back(a);
        divmod(c, a, q, r);
        c = q;
        divmod(d, a, q, r);
        d = q - c.derivative();
    }
    return out;
}

namespace {

std::vector<Complex> simple_roots(const UniPoly& f) {
    int n = f.degree();
    std::vector<Complex> out;
    if (n <= 0) return out;
    double lead = f.lead().get_d();
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -f.coeffs()[i].get_d() / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    UniPoly fp = f.derivative();
    for (int i = 0; i < n; ++i) {
        Complex z = es.eigenvalues()[i];
        for (int it = 0; it < 50; ++it) {
            Complex d = fp.eval(z);
            if (std::abs(d) == 0) break;
            Complex step = f.eval(z) / d;
            z -= step;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
        }
        if (std::abs(z.imag()) < 1e-14 * std::max(1.0, std::abs(z))) z = Complex(z.real(), 0);
        out.push_back(z);
    }
    return out;
}

}  // namespace

std::vector<PolyRoot> poly_roots(const UniPoly& f) {
    std::vector<PolyRoot> out;
    auto factors = squarefree_factors(f);
    for (size_t k = 0; k < factors.size(); ++k) {
        UniPoly fp = factors[k].derivative();
        for (Complex z : simple_roots(factors[k])) {
            double d = std::abs(fp.eval(z));
            double rad = d > 0 ? factors[k].degree() * std::abs(factors[k].eval(z)) / d : INFINITY;
            rad = std::max(rad, 4e-16 * std::max(1.0, std::abs(z)));
            out.push_back({z, static_cast<int>(k) + 1, rad});
        }
    }
    std::sort(out.begin(), out.end(), [](const PolyRoot& a, const PolyRoot& b) {
        if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
        return a.z.imag() < b.z.imag();
    });
    return out;
}

}  // namespace itergm
