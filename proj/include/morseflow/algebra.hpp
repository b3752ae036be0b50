#pragma once

#include <deque>
#include <map>

#include "complex.hpp"
#include "dynamics.hpp"
#include "order.hpp"

namespace morseflow {

// Order data of the grading poset, decoupled from sc_data so test complexes
// can use hand-made posets.
struct grade_order {
    const poset* p;
    bool leq(int a, int b) const { return p->leq(a, b); }
    int size() const { return p->n; }
};

struct generator {
    int32_t grade;  // SC class
    int32_t dim;    // homological dimension q
};

// SC-graded GF(2) complex: generators with (grade, dim), sparse boundary
// columns over generator indices.  The differential must be filtered: a
// nonzero entry (row g, col g') needs dim g = dim g' - 1 and grade g <= grade g'.
struct graded_complex {
    std::vector<generator> gens;
    std::vector<std::vector<uint32_t>> cols;

    int64_t size() const { return int64_t(gens.size()); }
};

inline void check_filtered(const graded_complex& c, const grade_order& ord) {
    for (uint32_t j = 0; j < c.gens.size(); ++j)
        for (uint32_t i : c.cols[j]) {
            if (c.gens[i].dim != c.gens[j].dim - 1)
                throw invariant_error("graded_complex: entry does not drop dimension by 1");
            if (!ord.leq(c.gens[i].grade, c.gens[j].grade))
                throw invariant_error("graded_complex: differential not filtered");
        }
}

// Cells of a cubical complex with the dyn grading.
inline graded_complex graded_complex_of(const cubical_complex& x, const sc_data& scd,
                                        bool check = true) {
    graded_complex c;
    c.gens.resize(size_t(x.size()));
    c.cols.resize(size_t(x.size()));
    std::vector<uint32_t> f;
    for (uint32_t cell = 0; cell < uint32_t(x.size()); ++cell) {
        c.gens[cell] = {scd.dyn[cell], int32_t(x.dim(cell))};
        x.faces(cell, f);
        c.cols[cell] = f;
    }
    if (check) check_filtered(c, {&scd.sc.order});
    return c;
}

// Optional chain maps between a complex and its reduction (debug artifacts).
// phi embeds the reduced complex, psi projects onto it; psi . phi = id.
struct chain_maps {
    // columns over the source complex indexed by surviving generator
    std::vector<std::vector<uint32_t>> phi;
    // columns over the survivors indexed by source generator
    std::vector<std::vector<uint32_t>> psi;
};

struct conley_complex {
    graded_complex c;                 // strict
    std::vector<uint32_t> survivors;  // reduced index -> source index
    chain_maps maps;                  // populated only when requested
    bool has_maps = false;
};

namespace detail {

// Shared elimination state: sparse columns plus row incidence lists.
struct reducer {
    const graded_complex* src;
    std::vector<std::vector<uint32_t>> col;  // by source index
    std::vector<std::vector<uint32_t>> row;  // row -> columns containing it
    std::vector<char> alive;
    const grade_order* ord = nullptr;  // per-step debug checks only
    bool with_maps = false;
    std::vector<std::vector<uint32_t>> phi;  // phi[g] = chain in source space
    std::vector<std::vector<uint32_t>> psi;  // psi[x] = chain over alive gens
    std::vector<std::vector<uint32_t>> occ;  // alive gen -> sources whose psi hits it

    explicit reducer(const graded_complex& c, bool maps) : src(&c), with_maps(maps) {
        col = c.cols;
        row.resize(c.gens.size());
        alive.assign(c.gens.size(), 1);
        for (uint32_t j = 0; j < col.size(); ++j)
            for (uint32_t i : col[j]) row[i].push_back(j);
        if (with_maps) {
            phi.resize(c.gens.size());
            psi.resize(c.gens.size());
            occ.resize(c.gens.size());
            for (uint32_t g = 0; g < c.gens.size(); ++g) {
                phi[g] = {g};
                psi[g] = {g};
                occ[g] = {g};
            }
        }
    }

    bool same_grade(uint32_t a, uint32_t b) const {
        return src->gens[a].grade == src->gens[b].grade;
    }

    void erase_from(std::vector<uint32_t>& v, uint32_t x) {
        auto it = std::lower_bound(v.begin(), v.end(), x);
        if (it != v.end() && *it == x) v.erase(it);
    }

    // Gaussian cancellation of the entry (a, b); a and b are removed and the
    // standard update d(x,y) += d(x,b) d(a,y) is applied over GF(2).
    // Returns the columns whose support changed (for queue maintenance).
    std::vector<uint32_t> cancel(uint32_t a, uint32_t b, std::vector<uint32_t>& scratch) {
        std::vector<uint32_t> touched;
        std::vector<uint32_t> colb = col[b];  // copy: includes a
        std::vector<uint32_t> rowa = row[a];  // columns containing a
        for (uint32_t y : rowa) {
            if (y == b || !alive[y]) continue;
            // col[y] ^= col[b]; entry a cancels since a is in both
            symdiff_into(col[y], colb, scratch);
            // maintain row lists for toggled entries
            for (uint32_t i : colb) {
                if (i == a) continue;
                bool had = std::binary_search(col[y].begin(), col[y].end(), i);
                if (had)
                    erase_from(row[i], y);
                else {
                    auto it = std::lower_bound(row[i].begin(), row[i].end(), y);
                    row[i].insert(it, y);
                }
            }
            col[y].swap(scratch);
            if (with_maps) {
                std::vector<uint32_t> t;
                symdiff_into(phi[y], phi[b], t);
                phi[y].swap(t);
            }
            touched.push_back(y);
        }
        if (with_maps) {
            // psi kills b and rewrites a as (boundary of b) minus a
            std::vector<uint32_t> t;
            std::vector<uint32_t> hit_b = occ[b];
            for (uint32_t xsrc : hit_b) {
                std::vector<uint32_t> delta = {b};
                symdiff_into(psi[xsrc], delta, t);
                psi[xsrc].swap(t);
            }
            std::vector<uint32_t> hit_a = occ[a];
            for (uint32_t xsrc : hit_a) {
                symdiff_into(psi[xsrc], colb, t);  // colb contains a: a drops out
                psi[xsrc].swap(t);
                for (uint32_t g : colb)
                    if (g != a) {
                        auto& o = occ[g];
                        auto it = std::lower_bound(o.begin(), o.end(), xsrc);
                        if (it != o.end() && *it == xsrc)
                            o.erase(it);
                        else
                            o.insert(it, xsrc);
                    }
            }
            occ[a].clear();
            occ[b].clear();
        }
        // drop row b from remaining columns and remove a, b outright
        for (uint32_t y : row[b]) {
            if (!alive[y] || y == b) continue;
            erase_from(col[y], b);
            touched.push_back(y);
        }
        for (uint32_t i : col[a]) erase_from(row[i], a);
        for (uint32_t i : col[b])
            if (i != a) erase_from(row[i], b);
        alive[a] = alive[b] = 0;
        col[a].clear();
        col[b].clear();
        row[a].clear();
        row[b].clear();
#ifndef NDEBUG
        check_step();
#endif
        return touched;
    }

    // dd = 0 and filtered entries after every elementary cancellation; only
    // compiled into debug builds and only run at test scale
    void check_step() const {
        if (src->gens.size() > 512) return;
        std::vector<uint32_t> acc, tmp;
        for (uint32_t j = 0; j < col.size(); ++j) {
            if (!alive[j]) continue;
            for (uint32_t i : col[j]) {
                if (src->gens[i].dim != src->gens[j].dim - 1)
                    throw invariant_error("reduction step broke the dimension drop");
                if (ord && !ord->leq(src->gens[i].grade, src->gens[j].grade))
                    throw invariant_error("reduction step broke filteredness");
            }
            acc.clear();
            for (uint32_t i : col[j]) {
                symdiff_into(acc, col[i], tmp);
                acc.swap(tmp);
            }
            if (!acc.empty()) throw invariant_error("reduction step broke dd = 0");
        }
    }
};

}  // namespace detail

// Graded algebraic Morse reduction to a strict complex.  Zero-fill pairs
// (a generator whose row or column meets exactly one other generator) are
// cancelled first through a work queue; leftover within-grade entries are
// eliminated in (dimension, index) scan order.  Output is strict; the
// homology braid is preserved (checked separately by verify_equivalence).
inline conley_complex connection_matrix(const graded_complex& src, bool with_maps = false,
                                        const grade_order* ord = nullptr) {
    detail::reducer st(src, with_maps);
    st.ord = ord;
    uint32_t n = uint32_t(src.gens.size());
    std::vector<uint32_t> scratch;

    // queue of candidates for zero-fill cancellation
    std::deque<uint32_t> queue;
    std::vector<char> queued(n, 0);
    auto push = [&](uint32_t g) {
        if (!queued[g] && st.alive[g]) {
            queued[g] = 1;
            queue.push_back(g);
        }
    };
    for (uint32_t g = 0; g < n; ++g) push(g);

    auto drain = [&]() {
        while (!queue.empty()) {
            uint32_t g = queue.front();
            queue.pop_front();
            queued[g] = 0;
            if (!st.alive[g]) continue;
            uint32_t a = UINT32_MAX, b = UINT32_MAX;
            if (st.row[g].size() == 1 && st.same_grade(g, st.row[g][0])) {
                a = g;
                b = st.row[g][0];
            } else if (st.col[g].size() == 1 && st.same_grade(st.col[g][0], g)) {
                a = st.col[g][0];
                b = g;
            } else {
                continue;
            }
            auto touched = st.cancel(a, b, scratch);
            for (uint32_t y : touched) push(y);
            for (uint32_t y : touched)
                for (uint32_t i : st.col[y]) push(i);
        }
    };

    drain();
    // leftover within-grade entries: deterministic scan, lowest dimension
    // first then lowest index, re-draining cheap pairs after each step
    std::vector<uint32_t> order(n);
    for (uint32_t g = 0; g < n; ++g) order[g] = g;
    std::sort(order.begin(), order.end(), [&](uint32_t x, uint32_t y) {
        if (src.gens[x].dim != src.gens[y].dim) return src.gens[x].dim < src.gens[y].dim;
        return x < y;
    });
    bool progress = true;
    while (progress) {
        progress = false;
        for (uint32_t b : order) {
            if (!st.alive[b]) continue;
            uint32_t a = UINT32_MAX;
            for (uint32_t i : st.col[b])
                if (st.same_grade(i, b)) {
                    a = i;
                    break;
                }
            if (a == UINT32_MAX) continue;
            auto touched = st.cancel(a, b, scratch);
            for (uint32_t y : touched) push(y);
            for (uint32_t y : touched)
                for (uint32_t i : st.col[y]) push(i);
            drain();
            progress = true;
        }
    }

    conley_complex out;
    std::vector<uint32_t> remap(n, UINT32_MAX);
    for (uint32_t g = 0; g < n; ++g)
        if (st.alive[g]) {
            remap[g] = uint32_t(out.survivors.size());
            out.survivors.push_back(g);
        }
    out.c.gens.reserve(out.survivors.size());
    out.c.cols.reserve(out.survivors.size());
    for (uint32_t g : out.survivors) {
        out.c.gens.push_back(src.gens[g]);
        std::vector<uint32_t> col;
        col.reserve(st.col[g].size());
        for (uint32_t i : st.col[g]) col.push_back(remap[i]);
        std::sort(col.begin(), col.end());
        out.c.cols.push_back(std::move(col));
    }
    for (uint32_t j = 0; j < out.c.gens.size(); ++j)
        for (uint32_t i : out.c.cols[j])
            if (out.c.gens[i].grade == out.c.gens[j].grade)
                throw invariant_error("connection_matrix: output not strict");

    if (with_maps) {
        out.has_maps = true;
        out.maps.phi.reserve(out.survivors.size());
        for (uint32_t g : out.survivors) out.maps.phi.push_back(st.phi[g]);
        out.maps.psi.resize(src.gens.size());
        for (uint32_t x = 0; x < src.gens.size(); ++x) {
            std::vector<uint32_t> v;
            for (uint32_t g : st.psi[x]) v.push_back(remap[g]);
            std::sort(v.begin(), v.end());
            out.maps.psi[x] = std::move(v);
        }
    }
    return out;
}

// Per-dimension GF(2) homology ranks of the restriction of a graded complex
// to a convex set of grades.
inline std::map<int, int64_t> homology_convex(const graded_complex& c, const grade_order& ord,
                                              const std::vector<int>& convex_classes) {
    {
        std::vector<int> s = convex_classes;
        if (!is_convex(*ord.p, s)) throw validation_error("homology_convex: set not convex");
    }
    bitset in_conv(ord.size());
    for (int g : convex_classes) in_conv.set(g);

    // restricted generators, per dimension counts
    std::vector<uint32_t> keep;
    std::vector<uint32_t> remap(c.gens.size(), UINT32_MAX);
    for (uint32_t g = 0; g < c.gens.size(); ++g)
        if (in_conv.test(c.gens[g].grade)) {
            remap[g] = uint32_t(keep.size());
            keep.push_back(g);
        }
    std::map<int, int64_t> gen_count, rank;
    for (uint32_t g : keep) gen_count[c.gens[g].dim]++;

    // column reduction with pivot = largest restricted row index; columns by
    // increasing dimension so pivots never collide across dimensions
    std::vector<uint32_t> cols_sorted = keep;
    std::sort(cols_sorted.begin(), cols_sorted.end(), [&](uint32_t x, uint32_t y) {
        if (c.gens[x].dim != c.gens[y].dim) return c.gens[x].dim < c.gens[y].dim;
        return x < y;
    });
    std::vector<uint32_t> pivot_owner(keep.size(), UINT32_MAX);
    std::vector<std::vector<uint32_t>> reduced(keep.size());
    std::vector<uint32_t> cur, tmp;
    for (uint32_t j : cols_sorted) {
        cur.clear();
        for (uint32_t i : c.cols[j])
            if (remap[i] != UINT32_MAX) cur.push_back(remap[i]);
        while (!cur.empty()) {
            uint32_t p = cur.back();
            uint32_t owner = pivot_owner[p];
            if (owner == UINT32_MAX) break;
            symdiff_into(cur, reduced[owner], tmp);
            cur.swap(tmp);
        }
        if (!cur.empty()) {
            uint32_t jj = remap[j];
            pivot_owner[cur.back()] = jj;
            reduced[jj] = cur;
            rank[c.gens[j].dim]++;
        }
    }

    std::map<int, int64_t> out;
    for (auto [q, cnt] : gen_count) {
        int64_t r_q = rank.count(q) ? rank[q] : 0;
        int64_t r_q1 = rank.count(q + 1) ? rank[q + 1] : 0;
        int64_t h = cnt - r_q - r_q1;
        if (h != 0) out[q] = h;
    }
    return out;
}

// (class, q) -> rank table of a strict complex: survivors counted directly.
struct betti_table {
    std::map<std::pair<int, int>, int64_t> rank;
};

inline betti_table betti_bm(const conley_complex& cc) {
    for (uint32_t j = 0; j < cc.c.gens.size(); ++j)
        for (uint32_t i : cc.c.cols[j])
            if (cc.c.gens[i].grade == cc.c.gens[j].grade)
                throw validation_error("betti_bm: complex is not strict");
    betti_table t;
    for (const auto& g : cc.c.gens) t.rank[{g.grade, g.dim}]++;
    return t;
}

// Homology-braid agreement between a source complex and its reduction over a
// family of down-sets.  Throws with the offending set on mismatch.
inline bool verify_equivalence(const graded_complex& src, const conley_complex& cc,
                               const grade_order& ord,
                               const std::vector<std::vector<int>>& downsets) {
    for (const auto& alpha : downsets) {
        auto hs = homology_convex(src, ord, alpha);
        auto hc = homology_convex(cc.c, ord, alpha);
        if (hs != hc) {
            std::string msg = "verify_equivalence: rank mismatch on down-set {";
            for (size_t i = 0; i < alpha.size(); ++i)
                msg += (i ? "," : "") + std::to_string(alpha[i]);
            msg += "}";
            throw invariant_error(msg);
        }
    }
    return true;
}

// Deterministic random down-sets of a poset (for sampled equivalence checks).
inline std::vector<std::vector<int>> random_down_sets(const poset& p, int count,
                                                      uint64_t seed) {
    std::vector<std::vector<int>> out;
    uint64_t state = seed ? seed : 0x9e3779b97f4a7c15ull;
    auto next = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    };
    for (int k = 0; k < count; ++k) {
        bitset take(p.n);
        for (int v = 0; v < p.n; ++v)
            if (next() & 1) take.set(v);
        bitset closed(p.n);
        take.for_each([&](int v) { closed |= p.down[v]; });
        std::vector<int> alpha;
        closed.for_each([&](int v) { alpha.push_back(v); });
        out.push_back(std::move(alpha));
    }
    return out;
}

}  // namespace morseflow
