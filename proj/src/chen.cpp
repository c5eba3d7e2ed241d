#include "itergm/chen.hpp"

#include <sstream>

namespace itergm {

std::string to_string(const Word& w) {
    std::string s = "[";
    for (int k = 0; k < w.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(w.letters[k]);
    }
    return s + "]";
}

Word parse_word(const std::string& s) {
    Word w;
    size_t a = s.find('['), b = s.rfind(']');
    if (a == std::string::npos || b == std::string::npos || b < a) throw ParseError("malformed word \"" + s + "\"");
    std::stringstream in(s.substr(a + 1, b - a - 1));
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        try {
            w.letters.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ParseError("malformed word \"" + s + "\"");
        }
    }
    return w;
}

Word concat(const Word& a, const Word& b) {
    Word w = a;
    w.letters.insert(w.letters.end(), b.letters.begin(), b.letters.end());
    return w;
}

WordBasis::WordBasis(int n, int K, size_t capacity) : n_(n), K_(K), N_(n * n) {
    if (n < 1 || K < 0) throw std::invalid_argument("word basis needs n >= 1 and K >= 0");
    size_t total = 0, block = 1;
    offsets_.push_back(0);
    for (int k = 0; k <= K; ++k) {
        total += block;
        if (total > capacity)
            throw CapacityExceeded("N_K exceeds " + std::to_string(capacity) + " at length " + std::to_string(k));
        offsets_.push_back(total);
        block *= N_;
    }
    words_.reserve(total);
    for (int k = 0; k <= K; ++k) {
        std::vector<int> letters(k, 1);
        for (size_t m = 0; m < block_size(k); ++m) {
            words_.push_back({letters});
            for (int pos = k - 1; pos >= 0; --pos) {
                if (++letters[pos] <= N_) break;
                letters[pos] = 1;
            }
        }
    }
}

size_t WordBasis::index(const Word& w) const {
    if (w.size() > K_) throw CapacityExceeded("word " + to_string(w) + " longer than K");
    size_t idx = 0;
    for (int l : w.letters) {
        if (l < 1 || l > N_) throw std::out_of_range("letter out of range in " + to_string(w));
        idx = idx * N_ + (l - 1);
    }
    return offsets_[w.size()] + idx;
}

std::shared_ptr<const WordBasis> enumerate_words(int n, int K, size_t capacity) {
    return std::make_shared<const WordBasis>(n, K, capacity);
}

namespace {

void shuffle_into(const int* u, int nu, const int* v, int nv, std::vector<int>& prefix, std::vector<Word>& out) {
    if (nu == 0 || nv == 0) {
        Word w{prefix};
        w.letters.insert(w.letters.end(), u, u + nu);
        w.letters.insert(w.letters.end(), v, v + nv);
        out.push_back(std::move(w));
        return;
    }
    prefix.push_back(u[0]);
    shuffle_into(u + 1, nu - 1, v, nv, prefix, out);
    prefix.back() = v[0];
    shuffle_into(u, nu, v + 1, nv - 1, prefix, out);
    prefix.pop_back();
}

}  // namespace

std::vector<Word> shuffle(const Word& u, const Word& v, int K) {
    if (K >= 0 && u.size() + v.size() > K)
        throw CapacityExceeded("shuffle of " + to_string(u) + " and " + to_string(v) + " exceeds length " +
                               std::to_string(K));
    std::vector<Word> out;
    std::vector<int> prefix;
    shuffle_into(u.letters.data(), u.size(), v.letters.data(), v.size(), prefix, out);
    return out;
}

}  // namespace itergm
