#pragma once

#include <optional>

#include "algebra.hpp"
#include "json.hpp"

namespace morseflow {

// Polynomial in two variables with natural-number exponents: the lambda
// exponent tracks the lap number, the mu exponent homological dimension.
struct poly2 {
    std::map<std::pair<int, int>, int64_t> c;

    static poly2 term(int p, int q, int64_t coef = 1) {
        poly2 r;
        if (coef) r.c[{p, q}] = coef;
        return r;
    }

    bool is_zero() const { return c.empty(); }

    int64_t coef(int p, int q) const {
        auto it = c.find({p, q});
        return it == c.end() ? 0 : it->second;
    }

    poly2& operator+=(const poly2& o) {
        for (auto [k, v] : o.c) {
            c[k] += v;
            if (c[k] == 0) c.erase(k);
        }
        return *this;
    }

    friend poly2 operator+(poly2 a, const poly2& b) {
        a += b;
        return a;
    }

    friend poly2 operator*(const poly2& a, const poly2& b) {
        poly2 r;
        for (auto [ka, va] : a.c)
            for (auto [kb, vb] : b.c) {
                auto key = std::make_pair(ka.first + kb.first, ka.second + kb.second);
                r.c[key] += va * vb;
                if (r.c[key] == 0) r.c.erase(key);
            }
        return r;
    }

    bool operator==(const poly2& o) const { return c == o.c; }

    std::string str() const {
        if (c.empty()) return "0";
        std::string s;
        for (auto [k, v] : c) {
            if (!s.empty()) s += " + ";
            auto [p, q] = k;
            std::string vars;
            if (p > 0) vars += p == 1 ? "λ" : "λ^" + std::to_string(p);
            if (q > 0) vars += q == 1 ? "μ" : "μ^" + std::to_string(q);
            if (vars.empty())
                s += std::to_string(v);
            else
                s += (v == 1 ? "" : std::to_string(v)) + vars;
        }
        return s;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (auto [k, v] : c) arr.push_back({k.first, k.second, v});
        return arr;
    }
};

// Differential blocks of a strict complex split by lap drop: Delta^r_{p,q}
// maps the (lap p, dim q) part to (lap p-r, dim q-1).  r >= 1 always; an
// r <= 0 entry contradicts strictness plus lap monotonicity and is fatal.
struct differential_block {
    int r, p, q;
    std::vector<uint32_t> rows, cols;        // conley generator ids
    std::vector<std::vector<int>> matrix;    // rows x cols over GF(2)
};

struct parabolic_module {
    std::vector<differential_block> blocks;
    // generators grouped by (p, q); conley generator ids
    std::map<std::pair<int, int>, std::vector<uint32_t>> groups;
};

inline parabolic_module bigraded_blocks(const conley_complex& cc, const sc_data& scd) {
    parabolic_module out;
    const auto& gens = cc.c.gens;
    auto lap_of = [&](uint32_t g) { return scd.lap[gens[g].grade]; };
    for (uint32_t g = 0; g < gens.size(); ++g)
        out.groups[{lap_of(g), gens[g].dim}].push_back(g);

    std::map<std::tuple<int, int, int>, std::vector<std::pair<uint32_t, uint32_t>>> entries;
    for (uint32_t j = 0; j < gens.size(); ++j)
        for (uint32_t i : cc.c.cols[j]) {
            int p = lap_of(j), r = p - lap_of(i), q = gens[j].dim;
            if (gens[i].dim != q - 1)
                throw invariant_error("bigraded_blocks: entry does not drop dimension by 1");
            if (r <= 0) throw invariant_error("bigraded_blocks: entry with lap drop r <= 0");
            entries[{r, p, q}].emplace_back(i, j);
        }
    for (auto& [key, es] : entries) {
        auto [r, p, q] = key;
        differential_block b;
        b.r = r;
        b.p = p;
        b.q = q;
        b.rows = out.groups.count({p - r, q - 1}) ? out.groups[{p - r, q - 1}]
                                                  : std::vector<uint32_t>{};
        b.cols = out.groups.count({p, q}) ? out.groups[{p, q}] : std::vector<uint32_t>{};
        b.matrix.assign(b.rows.size(), std::vector<int>(b.cols.size(), 0));
        std::map<uint32_t, int> row_at, col_at;
        for (size_t i = 0; i < b.rows.size(); ++i) row_at[b.rows[i]] = int(i);
        for (size_t j = 0; j < b.cols.size(); ++j) col_at[b.cols[j]] = int(j);
        for (auto [i, j] : es) b.matrix[size_t(row_at[i])][size_t(col_at[j])] = 1;
        out.blocks.push_back(std::move(b));
    }
    return out;
}

// Dimension-graded blocks of the full differential: Delta_q maps dim q to
// dim q-1, rows/cols in generator order.
inline std::map<int, differential_block> dimension_blocks(const conley_complex& cc) {
    std::map<int, std::vector<uint32_t>> by_dim;
    for (uint32_t g = 0; g < cc.c.gens.size(); ++g) by_dim[cc.c.gens[g].dim].push_back(g);
    std::map<int, differential_block> out;
    for (auto& [q, cols] : by_dim) {
        if (!by_dim.count(q - 1)) continue;
        differential_block b;
        b.r = 0;
        b.p = 0;
        b.q = q;
        b.cols = cols;
        b.rows = by_dim[q - 1];
        b.matrix.assign(b.rows.size(), std::vector<int>(b.cols.size(), 0));
        std::map<uint32_t, int> row_at;
        for (size_t i = 0; i < b.rows.size(); ++i) row_at[b.rows[i]] = int(i);
        for (size_t j = 0; j < b.cols.size(); ++j)
            for (uint32_t i : cc.c.cols[b.cols[j]]) b.matrix[size_t(row_at[i])][j] = 1;
        out[q] = std::move(b);
    }
    return out;
}

// Spectral sequence of the lap filtration on a strict complex restricted to
// a convex set of classes.  Classical subquotient definition:
//   Z^r_p = F_p . d^{-1}(F_{p-r}),  E^r_p = Z^r_p / (Z^{r-1}_{p-1} + d Z^{r-1}_{p+r-1}).
// All ranks by GF(2) elimination.  Converges within the lap range.
struct spectral_sequence_result {
    // (r, p, q) -> rank E^r_{p,q}; r from 1 to r_max (inclusive), E^{r_max} stable
    std::map<std::tuple<int, int, int>, int64_t> pages;
    // (r, p, q) -> rank of d^r_{p,q} : E^r_{p,q} -> E^r_{p-r,q-1}
    std::map<std::tuple<int, int, int>, int64_t> drank;
    std::map<std::pair<int, int>, int64_t> einf;  // (p,q) -> rank
    int r_max = 1;
};

inline spectral_sequence_result spectral_sequence(const conley_complex& cc, const sc_data& scd,
                                                  const std::vector<int>& convex_classes) {
    {
        std::vector<int> s = convex_classes;
        if (!is_convex(scd.sc.order, s))
            throw validation_error("spectral_sequence: set not convex");
    }
    bitset in_conv(scd.class_count());
    for (int g : convex_classes) in_conv.set(g);

    // restricted generators
    std::vector<uint32_t> keep;
    for (uint32_t g = 0; g < cc.c.gens.size(); ++g)
        if (in_conv.test(cc.c.gens[g].grade)) keep.push_back(g);
    int n = int(keep.size());
    spectral_sequence_result out;
    if (n == 0) {
        out.r_max = 1;
        return out;
    }
    std::vector<uint32_t> remap(cc.c.gens.size(), UINT32_MAX);
    for (int i = 0; i < n; ++i) remap[keep[i]] = uint32_t(i);

    std::vector<int> lap(n), dim(n);
    int lap_lo = INT32_MAX, lap_hi = INT32_MIN, dim_hi = 0;
    for (int i = 0; i < n; ++i) {
        lap[i] = scd.lap[cc.c.gens[keep[i]].grade];
        dim[i] = cc.c.gens[keep[i]].dim;
        lap_lo = std::min(lap_lo, lap[i]);
        lap_hi = std::max(lap_hi, lap[i]);
        dim_hi = std::max(dim_hi, dim[i]);
    }
    // differential as dense bitset columns over the restriction
    std::vector<bitset> dcol(n, bitset(n));
    for (int j = 0; j < n; ++j)
        for (uint32_t i : cc.c.cols[keep[j]])
            if (remap[i] != UINT32_MAX) dcol[j].set(int(remap[i]));
    auto apply_d = [&](const bitset& v) {
        bitset w(n);
        v.for_each([&](int j) { w ^= dcol[j]; });
        return w;
    };

    // basis of Z^r_{p,q} = {v in F_{p,q} : d v in F_{p-r}}: eliminate the
    // part of d v sticking out of F_{p-r} over the generators of F_{p,q}
    // kernel of (project outside F_{p-r}) . d over the generators of F_{p,q};
    // paired elimination kept sorted by pivot so reduction is a single
    // ascending pass
    auto z_basis = [&](int r, int p, int q) {
        std::vector<bitset> basis;
        std::vector<bitset> ech_o, ech_v;
        std::vector<int> ech_piv;
        for (int g = 0; g < n; ++g) {
            if (lap[g] > p || dim[g] != q) continue;
            bitset vv(n);
            vv.set(g);
            bitset oo(n);
            dcol[g].for_each([&](int i) {
                if (lap[i] > p - r) oo.set(i);
            });
            for (size_t k = 0; k < ech_piv.size(); ++k)
                if (oo.test(ech_piv[k])) {
                    oo ^= ech_o[k];
                    vv ^= ech_v[k];
                }
            int piv = oo.lowest();
            if (piv < 0) {
                basis.push_back(vv);
            } else {
                size_t pos = 0;
                while (pos < ech_piv.size() && ech_piv[pos] < piv) ++pos;
                ech_piv.insert(ech_piv.begin() + pos, piv);
                ech_o.insert(ech_o.begin() + pos, oo);
                ech_v.insert(ech_v.begin() + pos, vv);
            }
        }
        return basis;
    };

    out.r_max = std::max(1, lap_hi - lap_lo + 1);
    for (int r = 1; r <= out.r_max; ++r) {
        for (int p = lap_lo; p <= lap_hi; ++p) {
            for (int q = 0; q <= dim_hi; ++q) {
                auto z = z_basis(r, p, q);
                // denominator: Z^{r-1}_{p-1,q} + d Z^{r-1}_{p+r-1,q+1}
                auto zl = z_basis(r - 1, p - 1, q);
                auto zu = z_basis(r - 1, p + r - 1, q + 1);
                std::vector<bitset> dzu;
                for (auto& v : zu) dzu.push_back(apply_d(v));
                gf2_space denom(n);
                for (auto& v : zl) denom.insert(v);
                for (auto& v : dzu) denom.insert(v);
                int64_t dim_den = denom.dim();
                gf2_space whole(n);
                for (auto& v : zl) whole.insert(v);
                for (auto& v : dzu) whole.insert(v);
                for (auto& v : z) whole.insert(v);
                int64_t rank_e = whole.dim() - dim_den;
                if (rank_e > 0) out.pages[{r, p, q}] = rank_e;

                // rank of d^r out of (p,q): dim((d Z^r_{p,q} + B') / B') with
                // B' the denominator at (p-r, q-1)
                if (!z.empty()) {
                    auto zl2 = z_basis(r - 1, p - r - 1, q - 1);
                    auto zu2 = z_basis(r - 1, p - 1, q);
                    std::vector<bitset> dzu2;
                    for (auto& v : zu2) dzu2.push_back(apply_d(v));
                    gf2_space b2(n);
                    for (auto& v : zl2) b2.insert(v);
                    for (auto& v : dzu2) b2.insert(v);
                    int64_t dim_b2 = b2.dim();
                    for (auto& v : z) b2.insert(apply_d(v));
                    int64_t rk = b2.dim() - dim_b2;
                    if (rk > 0) out.drank[{r, p, q}] = rk;
                }
            }
        }
    }
    for (int p = lap_lo; p <= lap_hi; ++p)
        for (int q = 0; q <= dim_hi; ++q) {
            auto it = out.pages.find({out.r_max, p, q});
            int64_t stable = it == out.pages.end() ? 0 : it->second;
            // subtract ranks of differentials on the last computed page
            auto dr_out = out.drank.find({out.r_max, p, q});
            auto dr_in = out.drank.find({out.r_max, p + out.r_max, q + 1});
            if (dr_out != out.drank.end()) stable -= dr_out->second;
            if (dr_in != out.drank.end()) stable -= dr_in->second;
            if (stable > 0) out.einf[{p, q}] = stable;
        }
    return out;
}

// Page-rank bookkeeping identity from the short exact sequences:
// rank E^r = rank E^{r+1} + rank d^r_out + rank d^r_in, for every (r,p,q).
inline bool spectral_conservation_holds(const spectral_sequence_result& ss) {
    std::set<std::tuple<int, int, int>> keys;
    for (auto& [k, v] : ss.pages) keys.insert(k);
    for (auto& [k, v] : ss.drank) keys.insert(k);
    auto page = [&](int r, int p, int q) -> int64_t {
        if (r > ss.r_max) {
            auto it = ss.einf.find({p, q});
            return it == ss.einf.end() ? 0 : it->second;
        }
        auto it = ss.pages.find({r, p, q});
        return it == ss.pages.end() ? 0 : it->second;
    };
    auto dr = [&](int r, int p, int q) -> int64_t {
        auto it = ss.drank.find({r, p, q});
        return it == ss.drank.end() ? 0 : it->second;
    };
    for (auto [r, p, q] : keys) {
        if (page(r, p, q) != page(r + 1, p, q) + dr(r, p, q) + dr(r, p + r, q + 1))
            return false;
    }
    return true;
}

// Morse relations: sum of per-class polynomials equals the limit polynomial
// plus sum over r of (1 + lambda^r mu) Q^r, as an exact identity.
struct morse_relations_result {
    poly2 lhs;        // sum over classes in the convex set
    poly2 homology;   // E-infinity polynomial
    std::map<int, poly2> q_polys;
    bool identity_holds = false;
};

inline poly2 class_polynomial(const betti_table& betti, const sc_data& scd, int cls) {
    poly2 p;
    for (auto& [key, rank] : betti.rank)
        if (key.first == cls) p += poly2::term(scd.lap[cls], key.second, rank);
    return p;
}

inline morse_relations_result morse_relations(const conley_complex& cc, const sc_data& scd,
                                              const std::vector<int>& convex_classes) {
    morse_relations_result out;
    betti_table betti = betti_bm(cc);
    for (int cls : convex_classes) out.lhs += class_polynomial(betti, scd, cls);

    auto ss = spectral_sequence(cc, scd, convex_classes);
    if (!spectral_conservation_holds(ss))
        throw invariant_error("morse_relations: spectral page bookkeeping failed");
    for (auto& [k, rank] : ss.einf) out.homology += poly2::term(k.first, k.second, rank);
    for (auto& [key, rank] : ss.drank) {
        auto [r, p, q] = key;
        out.q_polys[r] += poly2::term(p - r, q - 1, rank);
    }
    poly2 rhs = out.homology;
    for (auto& [r, qp] : out.q_polys) {
        poly2 factor = poly2::term(0, 0) + poly2::term(r, 1);
        rhs += factor * qp;
    }
    out.identity_holds = (out.lhs == rhs);
    if (!out.identity_holds)
        throw invariant_error("morse_relations: identity failed: lhs=" + out.lhs.str() +
                              " rhs=" + rhs.str());
    return out;
}

// Tessellar phase diagram: the SC poset with per-class polynomials; the
// reduced diagram keeps the classes with nonzero polynomial and recomputes
// covering edges inside the induced sub-poset.
struct phase_diagram {
    struct node {
        int cls;
        int lap;
        poly2 polynomial;
    };
    std::vector<node> nodes;                      // all classes
    std::vector<std::pair<int, int>> edges;       // Hasse: (upper, lower) class ids
    std::vector<int> reduced_nodes;               // class ids, nonzero polynomial
    std::vector<std::pair<int, int>> reduced_edges;

    poly2 total() const {
        poly2 t;
        for (const auto& n : nodes) t += n.polynomial;
        return t;
    }
};

inline phase_diagram make_phase_diagram(const sc_data& scd, const betti_table& betti) {
    phase_diagram out;
    int k = scd.class_count();
    for (int c = 0; c < k; ++c)
        out.nodes.push_back({c, scd.lap[c], class_polynomial(betti, scd, c)});
    for (int c = 0; c < k; ++c)
        for (int a : scd.sc.order.covers[c]) out.edges.emplace_back(c, a);

    for (int c = 0; c < k; ++c)
        if (!out.nodes[c].polynomial.is_zero()) out.reduced_nodes.push_back(c);
    // induced order, transitive reduction recomputed
    int rn = int(out.reduced_nodes.size());
    std::vector<int> pos(k, -1);
    for (int i = 0; i < rn; ++i) pos[out.reduced_nodes[i]] = i;
    for (int i = 0; i < rn; ++i)
        for (int j = 0; j < rn; ++j) {
            int a = out.reduced_nodes[i], b = out.reduced_nodes[j];
            if (a == b || !scd.sc.order.lt(a, b)) continue;
            bool covered = true;
            for (int t = 0; t < rn && covered; ++t) {
                int m = out.reduced_nodes[t];
                if (m != a && m != b && scd.sc.order.lt(a, m) && scd.sc.order.lt(m, b))
                    covered = false;
            }
            if (covered) out.reduced_edges.emplace_back(b, a);  // (upper, lower)
        }
    std::sort(out.reduced_edges.begin(), out.reduced_edges.end());
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

// Annotated poset used for isomorphism tests on reduced diagrams.
struct annotated_poset {
    std::vector<poly2> label;                // per node
    std::vector<std::pair<int, int>> edges;  // (upper, lower)

    int size() const { return int(label.size()); }
};

inline annotated_poset reduced_annotated(const phase_diagram& pd) {
    annotated_poset ap;
    std::map<int, int> pos;
    for (int cls : pd.reduced_nodes) {
        pos[cls] = ap.size();
        ap.label.push_back(pd.nodes[size_t(cls)].polynomial);
    }
    for (auto [u, l] : pd.reduced_edges) ap.edges.emplace_back(pos[u], pos[l]);
    std::sort(ap.edges.begin(), ap.edges.end());
    return ap;
}

// Backtracking isomorphism of annotated posets; annotations must match
// exactly.  Small inputs only (reduced diagrams run to ~30 nodes).
inline bool find_isomorphism(const annotated_poset& a, const annotated_poset& b,
                             std::vector<int>* out_map = nullptr) {
    int n = a.size();
    if (n != b.size() || a.edges.size() != b.edges.size()) return false;
    std::vector<std::set<int>> asucc(n), bsucc(n), apred(n), bpred(n);
    for (auto [u, l] : a.edges) {
        asucc[u].insert(l);
        apred[l].insert(u);
    }
    for (auto [u, l] : b.edges) {
        bsucc[u].insert(l);
        bpred[l].insert(u);
    }
    std::vector<int> map(n, -1), used(n, 0);

    std::function<bool(int)> go = [&](int i) -> bool {
        if (i == n) return true;
        for (int j = 0; j < n; ++j) {
            if (used[j]) continue;
            if (!(a.label[i] == b.label[j])) continue;
            if (asucc[i].size() != bsucc[j].size() || apred[i].size() != bpred[j].size())
                continue;
            bool ok = true;
            for (int k = 0; k < i && ok; ++k) {
                bool ae = asucc[i].count(k), be = bsucc[j].count(map[k]);
                if (ae != be) ok = false;
                bool ar = apred[i].count(k), br = bpred[j].count(map[k]);
                if (ar != br) ok = false;
            }
            if (!ok) continue;
            map[i] = j;
            used[j] = 1;
            if (go(i + 1)) return true;
            used[j] = 0;
            map[i] = -1;
        }
        return false;
    };
    if (!go(0)) return false;
    if (out_map) *out_map = map;
    return true;
}

inline bool diagram_isomorphic(const phase_diagram& a, const phase_diagram& b) {
    return find_isomorphism(reduced_annotated(a), reduced_annotated(b));
}

// ---- exports ---------------------------------------------------------------

inline std::string diagram_to_dot(const phase_diagram& pd, bool reduced) {
    std::string s = "digraph phase {\n  rankdir=BT;\n  node [shape=ellipse];\n";
    std::map<int, std::vector<int>> by_lap;
    auto include = [&](int cls) {
        if (!reduced) return true;
        return std::find(pd.reduced_nodes.begin(), pd.reduced_nodes.end(), cls) !=
               pd.reduced_nodes.end();
    };
    for (const auto& n : pd.nodes)
        if (include(n.cls)) by_lap[n.lap].push_back(n.cls);
    for (auto& [lap, nodes] : by_lap) {
        s += "  { rank=same;";
        for (int cls : nodes) s += " S" + std::to_string(cls) + ";";
        s += " }\n";
    }
    for (const auto& n : pd.nodes) {
        if (!include(n.cls)) continue;
        std::string lbl = "S" + std::to_string(n.cls);
        if (!n.polynomial.is_zero()) lbl += " : " + n.polynomial.str();
        s += "  S" + std::to_string(n.cls) + " [label=\"" + lbl + "\"];\n";
    }
    const auto& edges = reduced ? pd.reduced_edges : pd.edges;
    for (auto [u, l] : edges)
        s += "  S" + std::to_string(u) + " -> S" + std::to_string(l) + ";\n";
    s += "}\n";
    return s;
}

inline nlohmann::ordered_json diagram_to_json(const phase_diagram& pd,
                                              const parabolic_module& pm) {
    nlohmann::ordered_json j;
    j["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : pd.nodes) {
        nlohmann::ordered_json node;
        node["id"] = n.cls;
        node["lap"] = n.lap;
        node["poincare"] = n.polynomial.to_json();
        j["nodes"].push_back(node);
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (auto [u, l] : pd.edges) j["edges"].push_back({u, l});
    j["reduced_nodes"] = pd.reduced_nodes;
    j["reduced_edges"] = nlohmann::ordered_json::array();
    for (auto [u, l] : pd.reduced_edges) j["reduced_edges"].push_back({u, l});
    j["differential_blocks"] = nlohmann::ordered_json::array();
    for (const auto& b : pm.blocks) {
        nlohmann::ordered_json blk;
        blk["r"] = b.r;
        blk["p"] = b.p;
        blk["q"] = b.q;
        blk["matrix"] = b.matrix;
        j["differential_blocks"].push_back(blk);
    }
    return j;
}

}  // namespace morseflow
