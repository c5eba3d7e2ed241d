#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "itergm/chen.hpp"
#include "itergm/forms.hpp"
#include "itergm/petrov.hpp"
#include "json.hpp"

namespace itergm {

struct ReducedCombination {
    std::shared_ptr<const WordBasis> basis;
    std::map<Word, RationalFunction> coeffs;  // in p; absent words are zero

    int max_degree() const;
    RationalFunction coeff(const Word& w) const;
    // sum coeffs(w)(p) * values[index(w)]
    Complex evaluate(Complex p, const std::vector<Complex>& values) const;
};

// Rewrites closed iterated integrals of polynomial forms over the oval based
// at (0, p) into basic ones. Decompositions and partial results are memoised.
class IteratedReducer {
public:
    IteratedReducer(const Hamiltonian& H, std::shared_ptr<const WordBasis> basis);

    struct Slot {
        int basic = -1;  // basic form index, or -1 for a general form
        PolyOneForm form;
    };

    ReducedCombination reduce(const std::vector<PolyOneForm>& forms);
    // slots already known to be basic are kept as letters
    ReducedCombination reduce(const std::vector<Slot>& slots);

    const Hamiltonian& hamiltonian() const { return H_; }
    const std::shared_ptr<const WordBasis>& basis() const { return basis_; }
    const UniPoly& level() const { return level_; }  // t = H(0, p)
    const PetrovDecomposition& decompose(const PolyOneForm& w);
    size_t decompositions() const { return decomp_.size(); }

private:
    using Combination = std::map<Word, UniPoly>;
    const Combination& reduce_slots(const std::vector<Slot>& slots);
    std::string key(const std::vector<Slot>& slots) const;

    const Hamiltonian& H_;
    std::shared_ptr<const WordBasis> basis_;
    UniPoly level_;
    std::map<std::string, PetrovDecomposition> decomp_;
    std::map<std::string, Combination> memo_;
};

ReducedCombination reduce_iterated(const std::vector<PolyOneForm>& forms, const Hamiltonian& H,
                                   std::shared_ptr<const WordBasis> basis);

struct SingularPoint {
    Complex p;
    int multiplicity = 1;
};

struct ConnectionDiagnostics {
    int max_degree = 0;          // max over entries of deg num + deg den
    mpz_class size;              // sum of entry sizes
    double log10_size = 0;
    int nonzero_entries = 0;
    size_t decompositions = 0;
};

class ConnectionMatrix {
public:
    ConnectionMatrix() = default;
    ConnectionMatrix(std::shared_ptr<const WordBasis> basis, std::vector<std::vector<RationalFunction>> entries);

    const WordBasis& basis() const { return *basis_; }
    const std::shared_ptr<const WordBasis>& basis_ptr() const { return basis_; }
    size_t size() const { return entries_.size(); }
    const RationalFunction& entry(size_t r, size_t c) const { return entries_[r][c]; }
    const std::vector<std::vector<RationalFunction>>& entries() const { return entries_; }
    const std::vector<SingularPoint>& singular_locus() const { return singular_; }
    void set_singular_locus(std::vector<SingularPoint> s) { singular_ = std::move(s); }
    const UniPoly& row_denominator(size_t r) const { return rows_[r].den; }

    // dense row-major values at a complex point
    void evaluate(Complex p, std::vector<Complex>& out) const;
    ConnectionDiagnostics diagnostics() const;

    ConnectionDiagnostics build_info;

private:
    struct Row {
        UniPoly den{Var::p};
        std::vector<std::pair<size_t, UniPoly>> nums;
    };
    void cache_rows();

    std::shared_ptr<const WordBasis> basis_;
    std::vector<std::vector<RationalFunction>> entries_;
    std::vector<SingularPoint> singular_;
    std::vector<Row> rows_;
};

ConnectionMatrix build_connection(const Hamiltonian& H, int K, size_t capacity = WordBasis::kDefaultCapacity);

using RFMatrix = std::vector<std::vector<RationalFunction>>;

std::vector<RFMatrix> block_structure(const ConnectionMatrix& omega);

struct KroneckerReport {
    bool ok = false;
    std::vector<size_t> permutation;  // block index -> word position in the Kronecker sum
    std::vector<int> factor_order;    // tensor-factor permutation that matched
    std::string mismatch;
};

// k-fold Kronecker sum of theta11 in natural lexicographic order
RFMatrix kronecker_sum(const RFMatrix& theta11, int k);
// k < 0 infers k from the block size (ambiguous only when N = 1)
KroneckerReport kronecker_check(const RFMatrix& theta11, const RFMatrix& theta_kk, int k = -1);

nlohmann::json to_json(const ConnectionMatrix& omega);
ConnectionMatrix connection_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ReducedCombination& rc);

}  // namespace itergm
