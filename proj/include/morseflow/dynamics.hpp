#pragma once

#include <cstdlib>
#include <thread>

#include "braid.hpp"
#include "complex.hpp"
#include "order.hpp"

namespace morseflow {

// Crossing-number data: lambda on top cells (by top ordinal) and the
// min/max envelope (lambda_-, lambda_+) over the star on every cell.
struct lambda_data {
    std::vector<int> lambda_top;
    std::vector<int> lminus, lplus;  // by cell index

    int lambda_minus(uint32_t cell) const { return lminus[cell]; }
    int lambda_plus(uint32_t cell) const { return lplus[cell]; }
};

inline int default_thread_count() {
    if (const char* env = std::getenv("MORSEFLOW_THREADS")) {
        int t = std::atoi(env);
        if (t >= 1) return t;
    }
    return 1;
}

inline lambda_data compute_lambda(const cubical_complex& x, const braid_diagram& b,
                                  int threads = 0) {
    require_valid(b);
    if (x.m() != b.m || x.d() != b.d)
        throw validation_error("compute_lambda: complex and braid shape mismatch");
    if (threads <= 0) threads = default_thread_count();

    lambda_data out;
    out.lambda_top.assign(size_t(x.top_count()), 0);

    auto run = [&](int64_t lo, int64_t hi) {
        std::vector<int> code2x(x.d());
        for (int64_t o = lo; o < hi; ++o) {
            uint32_t cell = x.top_cell(o);
            uint32_t rest = cell;
            for (int i = 0; i < x.d(); ++i) {
                code2x[i] = int(rest % x.radix());  // odd code 2h+1 is twice the midpoint
                rest /= x.radix();
            }
            int lam = intersection_number_2x(code2x, b);
            if (lam % 2 != 0)
                throw invariant_error("compute_lambda: odd crossing number on a top cell");
            out.lambda_top[size_t(o)] = lam;
        }
    };

    int64_t n_top = x.top_count();
    if (threads == 1 || n_top < 1024) {
        run(0, n_top);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(threads);
        int64_t chunk = (n_top + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            int64_t lo = t * chunk, hi = std::min<int64_t>(n_top, lo + chunk);
            pool.emplace_back([&, t, lo, hi] {
                try {
                    run(lo, hi);
                } catch (...) {
                    errs[size_t(t)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }

    out.lminus.assign(size_t(x.size()), 0);
    out.lplus.assign(size_t(x.size()), 0);
    std::vector<int64_t> tops;
    for (uint32_t c = 0; c < uint32_t(x.size()); ++c) {
        x.star_tops(c, tops);
        int lo = out.lambda_top[size_t(tops.front())], hi = lo;
        for (int64_t o : tops) {
            lo = std::min(lo, out.lambda_top[size_t(o)]);
            hi = std::max(hi, out.lambda_top[size_t(o)]);
        }
        out.lminus[c] = lo;
        out.lplus[c] = hi;
    }
    return out;
}

// E  : partial adjacency on all cells ((face, top) both ways)
// R  : E filtered by the product order on (lambda_-, lambda_+)
// Etop: codim-1 adjacency between distinct top cells
// F  : Etop filtered by lambda
// Etop and F live on top-cell ordinals.  The cell-level relations are bulky
// and only built when asked for.
struct flow_relations {
    relation etop, f;
    bool has_full = false;
    relation e, r;
};

inline flow_relations relations(const cubical_complex& x, const lambda_data& lam,
                                bool build_full = true) {
    flow_relations out;
    int64_t n_top = x.top_count();
    if (n_top > (int64_t(1) << 31)) throw validation_error("relations: too many top cells");
    out.etop.n = out.f.n = int(n_top);
    for (int64_t o = 0; o < n_top; ++o) {
        // top neighbours: one odd coordinate moved by one interval
        int64_t rest = o, scale = 1;
        for (int i = 0; i < x.d(); ++i) {
            int h = int(rest % (x.m() - 1));
            rest /= (x.m() - 1);
            for (int dh : {-1, 1}) {
                if (h + dh < 0 || h + dh >= x.m() - 1) continue;
                int64_t p = o + dh * scale;
                out.etop.add(int(o), int(p));
                if (lam.lambda_top[size_t(o)] <= lam.lambda_top[size_t(p)])
                    out.f.add(int(o), int(p));
            }
            scale *= (x.m() - 1);
        }
    }
    out.etop.normalize();
    out.f.normalize();

    if (build_full) {
        if (x.size() > (int64_t(1) << 31))
            throw validation_error("relations: too many cells for the full relations");
        out.has_full = true;
        out.e.n = out.r.n = int(x.size());
        for (int64_t o = 0; o < n_top; ++o) {
            uint32_t top = x.top_cell(o);
            for (uint32_t c : x.closure(top)) {
                out.e.add(int(c), int(top));
                out.e.add(int(top), int(c));
                bool le = lam.lminus[c] <= lam.lminus[top] && lam.lplus[c] <= lam.lplus[top];
                bool ge = lam.lminus[top] <= lam.lminus[c] && lam.lplus[top] <= lam.lplus[c];
                if (le) out.r.add(int(c), int(top));
                if (ge && c != top) out.r.add(int(top), int(c));
            }
        }
        out.e.normalize();
        out.r.normalize();
    }
    return out;
}

// Condensation of F plus everything derived from it: per-class lambda and
// lap, and the map dyn sending a cell to the unique minimal class meeting
// its star.
struct sc_data {
    scc_poset sc;                  // classes of top-cell ordinals
    std::vector<int> lambda_class;
    std::vector<int> lap;
    std::vector<int32_t> dyn;      // per cell index
    std::vector<int64_t> class_size;  // top cells per class

    int class_count() const { return int(sc.classes.size()); }
    bool class_leq(int a, int b) const { return sc.order.leq(a, b); }
};

inline sc_data sc_structure(const cubical_complex& x, const lambda_data& lam,
                            const flow_relations& rel) {
    sc_data out;
    // canonical numbering: scc_condense orders classes by minimal member,
    // then renumber by (lap, minimal top-cell ordinal)
    scc_poset raw = scc_condense(rel.f);
    int k = int(raw.classes.size());
    std::vector<int> lam_raw(k, -1);
    for (int c = 0; c < k; ++c) {
        for (int v : raw.classes[c]) {
            int l = lam.lambda_top[size_t(v)];
            if (lam_raw[c] == -1) lam_raw[c] = l;
            if (lam_raw[c] != l)
                throw invariant_error("sc_structure: lambda not constant on a class");
        }
        if (lam_raw[c] % 2 != 0) throw invariant_error("sc_structure: odd class lambda");
    }
    std::vector<int> perm(k);
    for (int c = 0; c < k; ++c) perm[c] = c;
    std::sort(perm.begin(), perm.end(), [&](int a, int b) {
        if (lam_raw[a] != lam_raw[b]) return lam_raw[a] < lam_raw[b];
        return raw.classes[a].front() < raw.classes[b].front();
    });
    std::vector<int> rank(k);
    for (int c = 0; c < k; ++c) rank[perm[c]] = c;

    out.sc.classes.resize(k);
    out.lambda_class.resize(k);
    out.lap.resize(k);
    out.class_size.resize(k);
    for (int c = 0; c < k; ++c) {
        out.sc.classes[rank[c]] = raw.classes[c];
        out.lambda_class[rank[c]] = lam_raw[c];
        out.lap[rank[c]] = lam_raw[c] / 2;
        out.class_size[rank[c]] = int64_t(raw.classes[c].size());
    }
    out.sc.class_of.assign(raw.class_of.size(), -1);
    for (size_t v = 0; v < raw.class_of.size(); ++v)
        out.sc.class_of[v] = rank[raw.class_of[v]];

    out.sc.order.n = k;
    out.sc.order.up.assign(k, bitset(k));
    out.sc.order.down.assign(k, bitset(k));
    for (int c = 0; c < k; ++c)
        raw.order.up[c].for_each([&](int b) { out.sc.order.up[rank[c]].set(rank[b]); });
    for (int c = 0; c < k; ++c)
        out.sc.order.up[c].for_each([&](int b) { out.sc.order.down[b].set(c); });
    out.sc.order.covers.assign(k, {});
    for (int c = 0; c < k; ++c)
        for (int a : raw.order.covers[c]) out.sc.order.covers[rank[c]].push_back(rank[a]);
    for (auto& cov : out.sc.order.covers) std::sort(cov.begin(), cov.end());

    // dyn: unique minimum of the classes meeting the star
    out.dyn.assign(size_t(x.size()), -1);
    std::vector<int64_t> tops;
    std::vector<int> cand;
    for (uint32_t cell = 0; cell < uint32_t(x.size()); ++cell) {
        x.star_tops(cell, tops);
        cand.clear();
        for (int64_t o : tops) cand.push_back(out.sc.class_of[size_t(o)]);
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        int best = -1;
        for (int c : cand) {
            bool below_all = true;
            for (int other : cand)
                if (!out.sc.order.leq(c, other)) {
                    below_all = false;
                    break;
                }
            if (below_all) {
                best = c;
                break;
            }
        }
        if (best < 0)
            throw invariant_error("sc_structure: dyn minimum not unique at cell " +
                                  std::to_string(cell));
        out.dyn[cell] = best;
    }

    // dyn must be order-preserving from the face order to (SC, <=)
    std::vector<uint32_t> fs;
    for (uint32_t cell = 0; cell < uint32_t(x.size()); ++cell) {
        x.faces(cell, fs);
        for (uint32_t f : fs)
            if (!out.sc.order.leq(out.dyn[f], out.dyn[cell]))
                throw invariant_error("sc_structure: dyn not order-preserving");
    }
    return out;
}

// Morse pre-order on all cells, pulled back from SC through dyn.  Stored as
// a view; the explicit relation is only materialized at test scale.
struct morse_preorder {
    const sc_data* scd;
    bool leq(uint32_t a, uint32_t b) const {
        return scd->sc.order.leq(scd->dyn[a], scd->dyn[b]);
    }
    pre_order materialize(int64_t n_cells) const {
        if (n_cells > 4096)
            throw validation_error("morse_preorder: materialization limited to 4096 cells");
        int n = int(n_cells);
        pre_order p;
        p.n = n;
        p.up.assign(n, bitset(n));
        p.down.assign(n, bitset(n));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (leq(uint32_t(a), uint32_t(b))) {
                    p.up[a].set(b);
                    p.down[b].set(a);
                }
        return p;
    }
};

inline morse_preorder make_morse_preorder(const sc_data& scd) { return {&scd}; }

namespace detail {

// Pure one-step forward image c_R of the cells marked in `in`: all cells
// below a marked one in the product order across a (face, top) incidence.
// Streamed from the complex, never materialized.  Reflexive pairs on top
// cells keep marked top cells in the image.
inline void r_step(const cubical_complex& x, const lambda_data& lam, const bitset& in,
                   bitset& out) {
    out.clear();
    in.for_each([&](int c) {
        if (x.is_top(uint32_t(c))) out.set(c);  // (t,t) in R for top cells
    });
    for (int64_t o = 0; o < x.top_count(); ++o) {
        uint32_t top = x.top_cell(o);
        for (uint32_t c : x.closure(top)) {
            if (c == top) continue;
            bool c_le_top = lam.lminus[c] <= lam.lminus[top] && lam.lplus[c] <= lam.lplus[top];
            bool top_le_c = lam.lminus[top] <= lam.lminus[c] && lam.lplus[top] <= lam.lplus[c];
            if (c_le_top && in.test(int(top))) out.set(int(c));
            if (top_le_c && in.test(int(c))) out.set(int(top));
        }
    }
}

}  // namespace detail

// Attracting-block check for one down-set of SC.  With U = dyn^{-1}(alpha):
// U is closed in the face order, forward invariant under R, and its one-step
// forward image lands in the combinatorial interior.
inline bool verify_block(const cubical_complex& x, const lambda_data& lam, const sc_data& scd,
                         const std::vector<int>& alpha) {
    int k = scd.class_count();
    bitset in_alpha(k);
    for (int c : alpha) {
        if (c < 0 || c >= k) throw validation_error("verify_block: class out of range");
        in_alpha.set(c);
    }
    for (int c : alpha)
        scd.sc.order.down[c].for_each([&](int b) {
            if (!in_alpha.test(b)) throw validation_error("verify_block: not a down-set");
        });

    int64_t n = x.size();
    bitset u{int(n)};
    for (int64_t cell = 0; cell < n; ++cell)
        if (in_alpha.test(scd.dyn[size_t(cell)])) u.set(int(cell));

    // closed under faces
    std::vector<uint32_t> fs;
    for (int64_t cell = 0; cell < n; ++cell) {
        if (!u.test(int(cell))) continue;
        x.faces(uint32_t(cell), fs);
        for (uint32_t f : fs)
            if (!u.test(int(f))) return false;
    }

    // forward invariant: c_R(U) inside U; then Gamma+ U = c_R(U)
    bitset step{int(n)};
    detail::r_step(x, lam, u, step);
    if (!step.is_subset_of(u)) return false;

    // interior: every cell of c_R(U) has its whole star in U
    bitset gamma = step;
    std::vector<int64_t> tops;
    bool ok = true;
    gamma.for_each([&](int cell) {
        if (!ok) return;
        for (uint32_t s : x.star(uint32_t(cell)))
            if (!u.test(int(s))) {
                ok = false;
                return;
            }
    });
    return ok;
}

// Equivalent of verify_block over *all* principal down-sets at once, checked
// edge by edge.  Used where looping over classes would be quadratic.
inline bool verify_blocks_all_principal(const cubical_complex& x, const lambda_data& lam,
                                        const sc_data& scd) {
    std::vector<uint32_t> fs;
    for (uint32_t cell = 0; cell < uint32_t(x.size()); ++cell) {
        x.faces(cell, fs);
        for (uint32_t f : fs)
            if (!scd.sc.order.leq(scd.dyn[f], scd.dyn[cell])) return false;
    }
    std::vector<uint32_t> st;
    for (int64_t o = 0; o < x.top_count(); ++o) {
        uint32_t top = x.top_cell(o);
        for (uint32_t c : x.closure(top)) {
            if (c == top) continue;
            bool c_le_top = lam.lminus[c] <= lam.lminus[top] && lam.lplus[c] <= lam.lplus[top];
            bool top_le_c = lam.lminus[top] <= lam.lminus[c] && lam.lplus[top] <= lam.lplus[c];
            // (a,b) in R: dyn(a) <= dyn(b) and star(a) inside dyn^{-1}(down(dyn b))
            if (c_le_top) {
                if (!scd.sc.order.leq(scd.dyn[c], scd.dyn[top])) return false;
                for (uint32_t s : x.star(c))
                    if (!scd.sc.order.leq(scd.dyn[s], scd.dyn[top])) return false;
            }
            if (top_le_c) {
                // star of a top cell is itself
                if (!scd.sc.order.leq(scd.dyn[top], scd.dyn[c])) return false;
            }
        }
    }
    return true;
}

// Partial equivalence classes of R restricted to top cells agree with the
// dyn fibers (restriction property of the discrete resolution).
inline bool r_scc_matches_dyn(const cubical_complex& x, const flow_relations& rel,
                              const sc_data& scd) {
    if (!rel.has_full)
        throw validation_error("r_scc_matches_dyn: full relations required");
    scc_poset rs = scc_condense(rel.r);
    for (int64_t o = 0; o < x.top_count(); ++o)
        for (int64_t p = 0; p < x.top_count(); ++p) {
            uint32_t co = x.top_cell(o), cp = x.top_cell(p);
            bool same_r = rs.class_of[co] == rs.class_of[cp];
            bool same_dyn = scd.sc.class_of[size_t(o)] == scd.sc.class_of[size_t(p)];
            if (same_r != same_dyn) return false;
        }
    return true;
}

}  // namespace morseflow
