#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace morseflow {

// Input that violates a documented precondition (bad file, bad braid, ...).
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A theorem-backed invariant failed at runtime.  Never tie-broken or ignored.
struct invariant_error : std::runtime_error {
    explicit invariant_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Fixed-width bitset with run-time size.
class bitset {
  public:
    bitset() = default;
    explicit bitset(int n) : n_(n), w_((n + 63) / 64, 0) {}

    int size() const { return n_; }

    void set(int i) { w_[i >> 6] |= uint64_t(1) << (i & 63); }
    void reset(int i) { w_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }
    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
    void flip(int i) { w_[i >> 6] ^= uint64_t(1) << (i & 63); }

    void clear() { std::fill(w_.begin(), w_.end(), 0); }

    bool any() const {
        for (uint64_t x : w_)
            if (x) return true;
        return false;
    }

    int count() const {
        int c = 0;
        for (uint64_t x : w_) c += __builtin_popcountll(x);
        return c;
    }

    int lowest() const {  // -1 if empty
        for (size_t k = 0; k < w_.size(); ++k)
            if (w_[k]) return int(k * 64 + __builtin_ctzll(w_[k]));
        return -1;
    }

    bitset& operator|=(const bitset& o) {
        for (size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
        return *this;
    }
    bitset& operator&=(const bitset& o) {
        for (size_t k = 0; k < w_.size(); ++k) w_[k] &= o.w_[k];
        return *this;
    }
    bitset& operator^=(const bitset& o) {
        for (size_t k = 0; k < w_.size(); ++k) w_[k] ^= o.w_[k];
        return *this;
    }
    void and_not(const bitset& o) {
        for (size_t k = 0; k < w_.size(); ++k) w_[k] &= ~o.w_[k];
    }

    bool operator==(const bitset& o) const { return n_ == o.n_ && w_ == o.w_; }

    bool is_subset_of(const bitset& o) const {
        for (size_t k = 0; k < w_.size(); ++k)
            if (w_[k] & ~o.w_[k]) return false;
        return true;
    }

    bool intersects(const bitset& o) const {
        for (size_t k = 0; k < w_.size(); ++k)
            if (w_[k] & o.w_[k]) return true;
        return false;
    }

    template <typename F>
    void for_each(F&& f) const {
        for (size_t k = 0; k < w_.size(); ++k) {
            uint64_t x = w_[k];
            while (x) {
                f(int(k * 64 + __builtin_ctzll(x)));
                x &= x - 1;
            }
        }
    }

  private:
    int n_ = 0;
    std::vector<uint64_t> w_;
};

// Symmetric difference of two sorted index vectors (GF(2) column addition).
inline void symdiff_into(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                         std::vector<uint32_t>& out) {
    out.clear();
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j])
            out.push_back(a[i++]);
        else if (b[j] < a[i])
            out.push_back(b[j++]);
        else {
            ++i;
            ++j;
        }
    }
    out.insert(out.end(), a.begin() + i, a.end());
    out.insert(out.end(), b.begin() + j, b.end());
}

inline std::vector<uint32_t> symdiff(const std::vector<uint32_t>& a,
                                     const std::vector<uint32_t>& b) {
    std::vector<uint32_t> out;
    symdiff_into(a, b, out);
    return out;
}

// Echelonized GF(2) subspace of bitset vectors.  insert() reduces the vector
// against the current basis and keeps it when independent.
class gf2_space {
  public:
    explicit gf2_space(int width) : width_(width) {}

    int dim() const { return int(basis_.size()); }
    int width() const { return width_; }

    // Reduce v against the basis in place; returns true if a nonzero
    // remainder was added (dimension grew).
    bool insert(bitset v) {
        reduce(v);
        int p = v.lowest();
        if (p < 0) return false;
        size_t pos = 0;
        while (pos < basis_.size() && pivot_[pos] < p) ++pos;
        basis_.insert(basis_.begin() + pos, std::move(v));
        pivot_.insert(pivot_.begin() + pos, p);
        return true;
    }

    void reduce(bitset& v) const {
        for (size_t k = 0; k < basis_.size(); ++k)
            if (v.test(pivot_[k])) v ^= basis_[k];
    }

    bool contains(bitset v) const {
        reduce(v);
        return !v.any();
    }

    const std::vector<bitset>& basis() const { return basis_; }

  private:
    int width_;
    std::vector<bitset> basis_;
    std::vector<int> pivot_;
};

// dim(A + B) for two spans given as vector lists.
inline int gf2_dim_sum(int width, const std::vector<bitset>& a, const std::vector<bitset>& b) {
    gf2_space s(width);
    for (const auto& v : a) s.insert(v);
    for (const auto& v : b) s.insert(v);
    return s.dim();
}

}  // namespace morseflow
