#pragma once

#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <set>
#include <utility>

#include "bits.hpp"

namespace morseflow {

// Binary relation on a dense ground set 0..n-1.  Pairs are kept sorted and
// deduplicated so equality is structural.
struct relation {
    int n = 0;
    std::vector<std::pair<int, int>> pairs;

    relation() = default;
    relation(int n_, std::vector<std::pair<int, int>> ps) : n(n_), pairs(std::move(ps)) {
        normalize();
    }

    void add(int a, int b) { pairs.emplace_back(a, b); }

    void normalize() {
        for (auto& [a, b] : pairs)
            if (a < 0 || a >= n || b < 0 || b >= n)
                throw validation_error("relation: pair index out of range");
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    }

    std::vector<std::vector<int>> successors() const {
        std::vector<std::vector<int>> out(n);
        for (auto [a, b] : pairs) out[a].push_back(b);
        return out;
    }
};

// Reflexive transitive relation, stored as full reachability rows:
// up[a] = {b : a <= b}, down[a] = {b : b <= a}.
struct pre_order {
    int n = 0;
    std::vector<bitset> up, down;

    bool leq(int a, int b) const { return up[a].test(b); }

    relation to_relation() const {
        relation r;
        r.n = n;
        for (int a = 0; a < n; ++a)
            up[a].for_each([&](int b) { r.add(a, b); });
        r.normalize();
        return r;
    }
};

// Smallest reflexive and transitive relation containing r.
inline pre_order closure_trans_refl(const relation& r) {
    pre_order p;
    p.n = r.n;
    p.up.assign(r.n, bitset(r.n));
    for (int a = 0; a < r.n; ++a) p.up[a].set(a);
    for (auto [a, b] : r.pairs) p.up[a].set(b);
    // Warshall over bitset rows
    for (int k = 0; k < r.n; ++k)
        for (int a = 0; a < r.n; ++a)
            if (p.up[a].test(k)) p.up[a] |= p.up[k];
    p.down.assign(r.n, bitset(r.n));
    for (int a = 0; a < r.n; ++a)
        p.up[a].for_each([&](int b) { p.down[b].set(a); });
    return p;
}

inline bool is_antisymmetric(const pre_order& p) {
    for (int a = 0; a < p.n; ++a)
        for (int b = a + 1; b < p.n; ++b)
            if (p.leq(a, b) && p.leq(b, a)) return false;
    return true;
}

// Partial order with Hasse diagram (covering edges = transitive reduction).
struct poset {
    int n = 0;
    std::vector<bitset> up, down;          // reachability, reflexive
    std::vector<std::vector<int>> covers;  // covers[a] = elements covered by a

    bool leq(int a, int b) const { return up[a].test(b); }
    bool lt(int a, int b) const { return a != b && up[a].test(b); }
};

inline poset make_poset(const pre_order& p) {
    if (!is_antisymmetric(p)) throw validation_error("poset: relation is not antisymmetric");
    poset q;
    q.n = p.n;
    q.up = p.up;
    q.down = p.down;
    q.covers.assign(q.n, {});
    // b covers a  iff  a < b and no c with a < c < b
    for (int b = 0; b < q.n; ++b) {
        bitset strict_down = q.down[b];
        strict_down.reset(b);
        bitset reach(q.n);  // union of strict down-sets of strict predecessors
        strict_down.for_each([&](int c) {
            bitset t = q.down[c];
            t.reset(c);
            reach |= t;
        });
        strict_down.and_not(reach);
        strict_down.for_each([&](int a) { q.covers[b].push_back(a); });
    }
    return q;
}

// Poset of strongly connected components.  Classes are sorted by minimal
// member so the output is deterministic.
struct scc_poset {
    std::vector<std::vector<int>> classes;
    std::vector<int> class_of;  // ground element -> class index
    poset order;
};

namespace detail {

// Iterative Tarjan; emits components in reverse topological order.
inline std::vector<std::vector<int>> tarjan_scc(int n,
                                                const std::vector<std::vector<int>>& succ) {
    std::vector<int> index(n, -1), low(n, 0), on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::vector<int>> comps;
    int counter = 0;

    struct frame {
        int v;
        size_t child;
    };
    std::vector<frame> call;

    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& f = call.back();
            int v = f.v;
            if (f.child == 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            bool descended = false;
            while (f.child < succ[v].size()) {
                int w = succ[v][f.child++];
                if (index[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                std::vector<int> comp;
                while (true) {
                    int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(w);
                    if (w == v) break;
                }
                std::sort(comp.begin(), comp.end());
                comps.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty()) {
                int parent = call.back().v;
                low[parent] = std::min(low[parent], low[v]);
            }
        }
    }
    return comps;
}

}  // namespace detail

inline scc_poset scc_condense(const relation& r) {
    scc_poset out;
    out.classes = detail::tarjan_scc(r.n, r.successors());
    std::sort(out.classes.begin(), out.classes.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  return a.front() < b.front();
              });
    int k = int(out.classes.size());
    out.class_of.assign(r.n, -1);
    for (int c = 0; c < k; ++c)
        for (int v : out.classes[c]) out.class_of[v] = c;

    // [a] <= [b] iff b reaches a in r; condensation DAG + reflexive-transitive
    // closure.  (a,b) in r means "a below b", matching the closure convention.
    relation cond;
    cond.n = k;
    for (auto [a, b] : r.pairs) {
        int ca = out.class_of[a], cb = out.class_of[b];
        if (ca != cb) cond.add(ca, cb);
    }
    cond.normalize();
    out.order = make_poset(closure_trans_refl(cond));
    return out;
}

// All down-sets of a poset.  Exponential output; guarded to test scale.
inline std::vector<std::vector<int>> down_sets(const poset& p) {
    if (p.n > 20) throw validation_error("down_sets: poset too large (limit 20)");
    std::vector<uint32_t> pred_mask(p.n, 0);
    for (int b = 0; b < p.n; ++b) {
        bitset d = p.down[b];
        d.for_each([&](int a) { pred_mask[b] |= uint32_t(1) << a; });
    }
    std::vector<std::vector<int>> out;
    for (uint32_t mask = 0; mask < (uint32_t(1) << p.n); ++mask) {
        bool ok = true;
        for (int b = 0; b < p.n && ok; ++b)
            if (mask & (uint32_t(1) << b))
                if ((pred_mask[b] & mask) != pred_mask[b]) ok = false;
        if (!ok) continue;
        std::vector<int> s;
        for (int b = 0; b < p.n; ++b)
            if (mask & (uint32_t(1) << b)) s.push_back(b);
        out.push_back(std::move(s));
    }
    return out;
}

// Join-irreducibles of a lattice of sets: members with a unique immediate
// predecessor, ordered by inclusion.  Returns the poset together with the
// member sets realizing its elements.
struct irreducibles {
    poset order;
    std::vector<std::set<int>> sets;
};

inline irreducibles join_irreducibles(const std::vector<std::set<int>>& lattice) {
    int n = int(lattice.size());
    if (n == 0) throw validation_error("join_irreducibles: empty input");
    std::set<std::set<int>> members(lattice.begin(), lattice.end());
    if (int(members.size()) != n)
        throw validation_error("join_irreducibles: duplicate member sets");
    std::set<int> top;
    for (const auto& s : lattice) top.insert(s.begin(), s.end());
    if (!members.count(std::set<int>{}) || !members.count(top))
        throw validation_error("join_irreducibles: lattice must contain bottom and top");
    for (const auto& a : lattice)
        for (const auto& b : lattice) {
            std::set<int> u = a, i;
            u.insert(b.begin(), b.end());
            std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                  std::inserter(i, i.begin()));
            if (!members.count(u) || !members.count(i))
                throw validation_error("join_irreducibles: not closed under union/intersection");
        }

    std::vector<std::set<int>> sorted(lattice);
    std::sort(sorted.begin(), sorted.end(),
              [](const std::set<int>& a, const std::set<int>& b) {
                  if (a.size() != b.size()) return a.size() < b.size();
                  return a < b;
              });

    // j-irreducible: exactly one immediate predecessor (covers exactly one).
    std::vector<std::set<int>> irr;
    for (const auto& s : sorted) {
        std::vector<const std::set<int>*> below;
        for (const auto& t : sorted)
            if (t != s && std::includes(s.begin(), s.end(), t.begin(), t.end()))
                below.push_back(&t);
        int covers = 0;
        for (auto* t : below) {
            bool immediate = true;
            for (auto* u : below)
                if (u != t && std::includes(u->begin(), u->end(), t->begin(), t->end()))
                    immediate = false;
            if (immediate) ++covers;
        }
        if (covers == 1) irr.push_back(s);
    }

    irreducibles out;
    out.sets = irr;
    relation r;
    r.n = int(irr.size());
    for (int a = 0; a < r.n; ++a)
        for (int b = 0; b < r.n; ++b)
            if (a != b &&
                std::includes(irr[b].begin(), irr[b].end(), irr[a].begin(), irr[a].end()))
                r.add(a, b);
    r.normalize();
    out.order = make_poset(closure_trans_refl(r));
    return out;
}

// Principal down/up sets of an element.
inline std::pair<std::vector<int>, std::vector<int>> principal_sets(const pre_order& p, int a) {
    if (a < 0 || a >= p.n) throw validation_error("principal_sets: element out of range");
    std::vector<int> down, up;
    p.down[a].for_each([&](int b) { down.push_back(b); });
    p.up[a].for_each([&](int b) { up.push_back(b); });
    return {down, up};
}

inline bool is_convex(const poset& p, const std::vector<int>& s) {
    bitset in(p.n);
    for (int v : s) {
        if (v < 0 || v >= p.n) throw validation_error("is_convex: element out of range");
        in.set(v);
    }
    for (int a : s)
        for (int c : s) {
            if (!p.leq(a, c)) continue;
            bitset between = p.up[a];
            between &= p.down[c];
            bool ok = between.is_subset_of(in);
            if (!ok) return false;
        }
    return true;
}

// Number of down-sets, by the standard splitting recursion with memoization.
// Used for ideal-count identities on posets up to 64 elements.
inline uint64_t count_ideals(const poset& p) {
    if (p.n > 64) throw validation_error("count_ideals: poset too large (limit 64)");
    std::map<uint64_t, uint64_t> memo;
    std::vector<uint64_t> upm(p.n, 0), downm(p.n, 0);
    for (int a = 0; a < p.n; ++a) {
        p.up[a].for_each([&](int b) { upm[a] |= uint64_t(1) << b; });
        p.down[a].for_each([&](int b) { downm[a] |= uint64_t(1) << b; });
    }
    uint64_t full = p.n == 64 ? ~uint64_t(0) : (uint64_t(1) << p.n) - 1;

    std::function<uint64_t(uint64_t)> go = [&](uint64_t alive) -> uint64_t {
        if (alive == 0) return 1;
        auto it = memo.find(alive);
        if (it != memo.end()) return it->second;
        // pick the element splitting the most
        int best = -1, best_gain = -1;
        uint64_t rest = alive;
        while (rest) {
            int v = __builtin_ctzll(rest);
            rest &= rest - 1;
            int gain = __builtin_popcountll((upm[v] | downm[v]) & alive);
            if (gain > best_gain) {
                best_gain = gain;
                best = v;
            }
        }
        uint64_t val = go(alive & ~(upm[best])) + go(alive & ~(downm[best]));
        memo[alive] = val;
        return val;
    };
    return go(full);
}

}  // namespace morseflow
