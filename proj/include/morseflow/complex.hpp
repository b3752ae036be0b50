#pragma once

#include <array>

#include "bits.hpp"

namespace morseflow {

// Cubical decomposition of the box [0, m-1]^d induced by a normal-form
// skeleton.  Cells are interval-coded: in each coordinate an even code 2h is
// the lattice point {h} and an odd code 2h+1 is the open interval (h, h+1).
// Nothing is stored per cell; faces, closures and stars are code arithmetic.
// Cell index = mixed-radix number over the codes, coordinate 0 least
// significant.
class cubical_complex {
  public:
    using code_t = std::vector<int>;

    cubical_complex() = default;
    cubical_complex(int m, int d, int64_t cell_budget = 10'000'000) : m_(m), d_(d) {
        if (m < 3 || d < 1) throw validation_error("build_complex: need m >= 3, d >= 1");
        radix_ = 2 * m - 1;
        int64_t cells = 1;
        for (int i = 0; i < d; ++i) {
            cells *= radix_;
            if (cells > cell_budget)
                throw validation_error("build_complex: cell count exceeds budget of " +
                                       std::to_string(cell_budget));
        }
        n_cells_ = cells;
        int64_t tops = 1;
        for (int i = 0; i < d; ++i) tops *= (m - 1);
        n_top_ = tops;
    }

    int m() const { return m_; }
    int d() const { return d_; }
    int radix() const { return radix_; }
    int64_t size() const { return n_cells_; }
    int64_t top_count() const { return n_top_; }

    code_t decode(uint32_t idx) const {
        code_t c(d_);
        for (int i = 0; i < d_; ++i) {
            c[i] = int(idx % radix_);
            idx /= radix_;
        }
        return c;
    }

    uint32_t encode(const code_t& c) const {
        uint32_t idx = 0;
        for (int i = d_ - 1; i >= 0; --i) idx = idx * radix_ + uint32_t(c[i]);
        return idx;
    }

    int dim(uint32_t idx) const {
        int q = 0;
        for (int i = 0; i < d_; ++i) {
            q += int(idx % radix_) & 1;
            idx /= radix_;
        }
        return q;
    }

    bool is_top(uint32_t idx) const { return dim(idx) == d_; }

    // Dense ordinal over the top cells (all-odd codes), preserving index order.
    int64_t top_ordinal(uint32_t idx) const {
        int64_t o = 0, scale = 1;
        for (int i = 0; i < d_; ++i) {
            int c = int(idx % radix_);
            idx /= radix_;
            o += scale * ((c - 1) / 2);
            scale *= (m_ - 1);
        }
        return o;
    }

    uint32_t top_cell(int64_t ordinal) const {
        code_t c(d_);
        for (int i = 0; i < d_; ++i) {
            c[i] = 2 * int(ordinal % (m_ - 1)) + 1;
            ordinal /= (m_ - 1);
        }
        return encode(c);
    }

    // Codimension-1 faces: one odd code 2h+1 replaced by 2h or 2h+2.
    void faces(uint32_t idx, std::vector<uint32_t>& out) const {
        out.clear();
        uint32_t rest = idx, scale = 1;
        for (int i = 0; i < d_; ++i) {
            int c = int(rest % radix_);
            rest /= radix_;
            if (c & 1) {
                out.push_back(idx - scale);
                out.push_back(idx + scale);
            }
            scale *= radix_;
        }
        std::sort(out.begin(), out.end());
    }

    std::vector<uint32_t> faces(uint32_t idx) const {
        std::vector<uint32_t> out;
        faces(idx, out);
        return out;
    }

    // Immediate cofaces: one even code 2h replaced by 2h-1 or 2h+1.
    void cofaces(uint32_t idx, std::vector<uint32_t>& out) const {
        out.clear();
        uint32_t rest = idx, scale = 1;
        for (int i = 0; i < d_; ++i) {
            int c = int(rest % radix_);
            rest /= radix_;
            if (!(c & 1)) {
                if (c > 0) out.push_back(idx - scale);
                if (c < radix_ - 1) out.push_back(idx + scale);
            }
            scale *= radix_;
        }
        std::sort(out.begin(), out.end());
    }

    // Closure of a cell: per coordinate, an odd code widens to its two
    // endpoints; 3^dim cells, never clipped.
    std::vector<uint32_t> closure(uint32_t idx) const {
        std::vector<uint32_t> cur{0};
        std::vector<uint32_t> next;
        uint32_t rest = idx, scale = 1;
        for (int i = 0; i < d_; ++i) {
            int c = int(rest % radix_);
            rest /= radix_;
            next.clear();
            for (uint32_t base : cur) {
                if (c & 1) {
                    next.push_back(base + scale * uint32_t(c - 1));
                    next.push_back(base + scale * uint32_t(c));
                    next.push_back(base + scale * uint32_t(c + 1));
                } else {
                    next.push_back(base + scale * uint32_t(c));
                }
            }
            cur.swap(next);
            scale *= radix_;
        }
        std::sort(cur.begin(), cur.end());
        return cur;
    }

    // Star of a cell: per coordinate, an even code widens to the adjacent
    // intervals (clipped at the box boundary).
    std::vector<uint32_t> star(uint32_t idx) const {
        std::vector<uint32_t> cur{0};
        std::vector<uint32_t> next;
        uint32_t rest = idx, scale = 1;
        for (int i = 0; i < d_; ++i) {
            int c = int(rest % radix_);
            rest /= radix_;
            next.clear();
            for (uint32_t base : cur) {
                if (c & 1) {
                    next.push_back(base + scale * uint32_t(c));
                } else {
                    if (c > 0) next.push_back(base + scale * uint32_t(c - 1));
                    next.push_back(base + scale * uint32_t(c));
                    if (c < radix_ - 1) next.push_back(base + scale * uint32_t(c + 1));
                }
            }
            cur.swap(next);
            scale *= radix_;
        }
        std::sort(cur.begin(), cur.end());
        return cur;
    }

    // star(idx) restricted to top cells, as top ordinals.
    void star_tops(uint32_t idx, std::vector<int64_t>& out) const {
        out.clear();
        out.push_back(0);
        static thread_local std::vector<int64_t> next;
        uint32_t rest = idx;
        int64_t scale = 1;
        for (int i = 0; i < d_; ++i) {
            int c = int(rest % radix_);
            rest /= radix_;
            next.clear();
            for (int64_t base : out) {
                if (c & 1) {
                    next.push_back(base + scale * ((c - 1) / 2));
                } else {
                    int h = c / 2;
                    if (h > 0) next.push_back(base + scale * (h - 1));
                    if (h < m_ - 1) next.push_back(base + scale * h);
                }
            }
            out.swap(next);
            scale *= (m_ - 1);
        }
        std::sort(out.begin(), out.end());
    }

  private:
    int m_ = 0, d_ = 0, radix_ = 0;
    int64_t n_cells_ = 0, n_top_ = 0;
};

inline cubical_complex build_complex(int m, int d, int64_t cell_budget = 10'000'000) {
    return cubical_complex(m, d, cell_budget);
}

// Sparse GF(2) cellular boundary, one sorted row-index list per column.
struct boundary_matrix {
    std::vector<std::vector<uint32_t>> cols;
};

// Debug dump: one "row col 1" triplet per nonzero entry, sorted.
inline std::string boundary_to_text(const boundary_matrix& b) {
    std::vector<std::pair<uint32_t, uint32_t>> entries;
    for (uint32_t col = 0; col < b.cols.size(); ++col)
        for (uint32_t row : b.cols[col]) entries.emplace_back(row, col);
    std::sort(entries.begin(), entries.end());
    std::string s;
    for (auto [row, col] : entries)
        s += std::to_string(row) + " " + std::to_string(col) + " 1\n";
    return s;
}

inline boundary_matrix boundary_of(const cubical_complex& x, bool check_dd = true) {
    boundary_matrix b;
    b.cols.resize(size_t(x.size()));
    std::vector<uint32_t> f;
    for (uint32_t c = 0; c < uint32_t(x.size()); ++c) {
        x.faces(c, f);
        b.cols[c] = f;
    }
    if (check_dd) {
        // dd = 0 over GF(2): every codim-2 face is reached exactly twice
        std::vector<uint32_t> acc, tmp;
        for (uint32_t c = 0; c < uint32_t(x.size()); ++c) {
            acc.clear();
            for (uint32_t g : b.cols[c]) {
                symdiff_into(acc, b.cols[g], tmp);
                acc.swap(tmp);
            }
            if (!acc.empty()) throw invariant_error("boundary_matrix: dd != 0");
        }
    }
    return b;
}

}  // namespace morseflow
