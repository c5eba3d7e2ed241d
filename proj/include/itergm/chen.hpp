#pragma once

#include <memory>
#include <string>
#include <vector>

#include "itergm/errors.hpp"
#include "itergm/poly.hpp"

namespace itergm {

// letters are 1-based basic-form indices; the first letter is the outermost
// integration
struct Word {
    std::vector<int> letters;

    int size() const { return static_cast<int>(letters.size()); }
    bool empty() const { return letters.empty(); }
    bool operator==(const Word&) const = default;
    bool operator<(const Word& o) const {
        if (size() != o.size()) return size() < o.size();
        return letters < o.letters;
    }
};

std::string to_string(const Word& w);  // "[1,3,2]", "[]" for the unit
Word parse_word(const std::string& s);
Word concat(const Word& a, const Word& b);

class WordBasis {
public:
    static constexpr size_t kDefaultCapacity = 100000;

    WordBasis(int n, int K, size_t capacity = kDefaultCapacity);

    int n() const { return n_; }
    int K() const { return K_; }
    int N() const { return N_; }
    size_t size() const { return words_.size(); }
    const Word& word(size_t i) const { return words_[i]; }
    const std::vector<Word>& words() const { return words_; }
    size_t index(const Word& w) const;
    size_t block_begin(int k) const { return offsets_[k]; }
    size_t block_size(int k) const { return offsets_[k + 1] - offsets_[k]; }
    bool operator==(const WordBasis& o) const { return n_ == o.n_ && K_ == o.K_; }

private:
    int n_, K_, N_;
    std::vector<size_t> offsets_;
    std::vector<Word> words_;
};

std::shared_ptr<const WordBasis> enumerate_words(int n, int K, size_t capacity = WordBasis::kDefaultCapacity);

// multiset of all interleavings; K < 0 means no length limit
std::vector<Word> shuffle(const Word& u, const Word& v, int K = -1);

template <class S>
S scalar_one();
template <>
inline double scalar_one<double>() { return 1.0; }
template <>
inline Complex scalar_one<Complex>() { return 1.0; }
template <>
inline RationalFunction scalar_one<RationalFunction>() { return RationalFunction::constant(Var::p, 1); }

template <class S>
class TruncatedSeries {
public:
    explicit TruncatedSeries(std::shared_ptr<const WordBasis> basis)
        : basis_(std::move(basis)), c_(basis_->size()) {}
    TruncatedSeries(std::shared_ptr<const WordBasis> basis, std::vector<S> coeffs)
        : basis_(std::move(basis)), c_(std::move(coeffs)) {
        if (c_.size() != basis_->size()) throw BasisMismatch("coefficient count does not match the basis");
    }
    static TruncatedSeries unit(std::shared_ptr<const WordBasis> basis) {
        TruncatedSeries s(std::move(basis));
        s.c_[0] = scalar_one<S>();
        return s;
    }

    const WordBasis& basis() const { return *basis_; }
    const std::shared_ptr<const WordBasis>& basis_ptr() const { return basis_; }
    const std::vector<S>& coeffs() const { return c_; }
    S& operator[](size_t i) { return c_[i]; }
    const S& operator[](size_t i) const { return c_[i]; }
    S& at(const Word& w) { return c_[basis_->index(w)]; }
    const S& at(const Word& w) const { return c_[basis_->index(w)]; }

    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
        if (!(*a.basis_ == *b.basis_)) throw BasisMismatch("product of series over different bases");
        const WordBasis& B = *a.basis_;
        TruncatedSeries out(a.basis_);
        for (size_t i = 0; i < B.size(); ++i) {
            const Word& w = B.word(i);
            S acc{};
            for (int s = 0; s <= w.size(); ++s) {
                Word u{std::vector<int>(w.letters.begin(), w.letters.begin() + s)};
                Word v{std::vector<int>(w.letters.begin() + s, w.letters.end())};
                acc = acc + a.c_[B.index(u)] * b.c_[B.index(v)];
            }
            out.c_[i] = acc;
        }
        return out;
    }

    // geometric series in (a - e); exact for coefficient e = 1
    TruncatedSeries inverse() const {
        TruncatedSeries x = *this;
        x.c_[0] = S{};
        for (auto& c : x.c_) c = S{} - c;  // e - a
        TruncatedSeries out = unit(basis_), power = unit(basis_);
        for (int m = 1; m <= basis_->K(); ++m) {
            power = power * x;
            for (size_t i = 0; i < out.c_.size(); ++i) out.c_[i] = out.c_[i] + power.c_[i];
        }
        return out;
    }

private:
    std::shared_ptr<const WordBasis> basis_;
    std::vector<S> c_;
};

template <class S>
TruncatedSeries<S> truncated_product(const TruncatedSeries<S>& a, const TruncatedSeries<S>& b) {
    return a * b;
}

}  // namespace itergm
