#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "bits.hpp"
#include "json.hpp"

namespace morseflow {

// Closed discretized braid diagram in normal form.  anchors[s][i] is the
// integer height of strand s at anchor i; strand 0 and strand m-1 are the
// constant boundary strands.  Strands are indexed by their initial height,
// so anchors[s][0] == s and the closure permutation reads off column d.
struct braid_diagram {
    int m = 0;  // strand count, boundary strands included
    int d = 0;  // period
    std::vector<std::vector<int>> anchors;  // m rows, d+1 columns
};

struct positive_word {
    std::vector<int> letters;  // generator indices in 1..n_inner-1
};

enum class braid_fault {
    shape,
    column_not_permutation,
    periodicity,
    tangency,
    boundary,
    improper,
};

struct braid_issue {
    braid_fault fault;
    std::string message;
};

inline std::vector<int> theta(const braid_diagram& b) {
    std::vector<int> t(b.m);
    for (int s = 0; s < b.m; ++s) {
        int v = b.anchors[s][b.d];
        if (v < 0 || v >= b.m) throw validation_error("theta: closure value out of range");
        t[s] = v;
    }
    std::vector<int> seen(b.m, 0);
    for (int v : t) seen[v]++;
    for (int s = 0; s < b.m; ++s)
        if (seen[s] != 1) throw validation_error("theta: closure column is not a permutation");
    return t;
}

inline std::vector<std::vector<int>> permutation_cycles(const std::vector<int>& perm) {
    int n = int(perm.size());
    std::vector<int> done(n, 0);
    std::vector<std::vector<int>> cycles;
    for (int s = 0; s < n; ++s) {
        if (done[s]) continue;
        std::vector<int> cyc;
        int v = s;
        while (!done[v]) {
            done[v] = 1;
            cyc.push_back(v);
            v = perm[v];
        }
        cycles.push_back(std::move(cyc));
    }
    return cycles;
}

// Checks every structural invariant plus properness of the inner skeleton.
// Returns one issue per violated invariant; empty means valid.
inline std::vector<braid_issue> validate(const braid_diagram& b) {
    std::vector<braid_issue> issues;
    auto add = [&](braid_fault f, std::string msg) { issues.push_back({f, std::move(msg)}); };

    if (b.m < 3 || b.d < 1) {
        add(braid_fault::shape, "need m >= 3 strands and d >= 1 anchors");
        return issues;
    }
    if (int(b.anchors.size()) != b.m) {
        add(braid_fault::shape, "anchor matrix must have m rows");
        return issues;
    }
    for (const auto& row : b.anchors)
        if (int(row.size()) != b.d + 1) {
            add(braid_fault::shape, "each strand needs d+1 anchor values");
            return issues;
        }

    for (int i = 0; i <= b.d; ++i) {
        std::vector<int> seen(b.m, 0);
        bool ok = true;
        for (int s = 0; s < b.m; ++s) {
            int v = b.anchors[s][i];
            if (v < 0 || v >= b.m) {
                ok = false;
                break;
            }
            seen[v]++;
        }
        for (int v = 0; ok && v < b.m; ++v)
            if (seen[v] != 1) ok = false;
        if (!ok)
            add(braid_fault::column_not_permutation,
                "column " + std::to_string(i) + " is not a permutation of 0..m-1");
    }

    for (int s = 0; s < b.m; ++s)
        if (b.anchors[s][0] != s) {
            add(braid_fault::shape, "strands must be indexed by initial height");
            break;
        }

    bool theta_ok = true;
    std::vector<int> th(b.m, 0);
    {
        std::vector<int> seen(b.m, 0);
        for (int s = 0; s < b.m; ++s) {
            int v = b.anchors[s][b.d];
            if (v < 0 || v >= b.m) {
                theta_ok = false;
                break;
            }
            th[s] = v;
            seen[v]++;
        }
        for (int v = 0; theta_ok && v < b.m; ++v)
            if (seen[v] != 1) theta_ok = false;
        if (!theta_ok)
            add(braid_fault::periodicity, "closure column does not define a permutation");
    }

    // Transversality on the closed diagram: a shared anchor needs strands to
    // cross there.  Predecessor/successor anchors wrap through theta.
    if (theta_ok) {
        std::vector<int> th_inv(b.m);
        for (int s = 0; s < b.m; ++s) th_inv[th[s]] = s;
        auto at = [&](int s, int i) -> int {
            if (i >= 0 && i <= b.d) return b.anchors[s][i];
            if (i == -1) return b.anchors[th_inv[s]][b.d - 1];
            return b.anchors[th[s]][i - b.d];  // i in d+1 .. 2d
        };
        for (int s = 0; s < b.m; ++s)
            for (int t = s + 1; t < b.m; ++t)
                for (int i = 0; i < b.d; ++i)  // i == d is i == 0 shifted
                    if (at(s, i) == at(t, i)) {
                        long prev = long(at(s, i - 1)) - at(t, i - 1);
                        long next = long(at(s, i + 1)) - at(t, i + 1);
                        if (prev * next >= 0)
                            add(braid_fault::tangency,
                                "strands " + std::to_string(s) + "," + std::to_string(t) +
                                    " are tangent at anchor " + std::to_string(i));
                    }
    }

    for (int i = 0; i <= b.d; ++i) {
        if (b.anchors[0][i] != 0 || b.anchors[b.m - 1][i] != b.m - 1) {
            add(braid_fault::boundary, "boundary strands must be constant 0 and m-1");
            break;
        }
    }
    for (int s = 1; s + 1 < b.m; ++s)
        for (int i = 0; i <= b.d; ++i)
            if (b.anchors[s][i] == 0 || b.anchors[s][i] == b.m - 1) {
                add(braid_fault::boundary,
                    "inner strand " + std::to_string(s) + " touches a boundary height");
                i = b.d;
                s = b.m;
            }

    if (theta_ok) {
        for (int s = 1; s + 1 < b.m; ++s)
            if (th[s] == s) {
                add(braid_fault::improper,
                    "inner strand " + std::to_string(s) + " closes with period 1");
            }
    }
    return issues;
}

inline void require_valid(const braid_diagram& b) {
    auto issues = validate(b);
    if (issues.empty()) return;
    std::string msg = "invalid braid diagram:";
    for (const auto& is : issues) msg += "\n  - " + is.message;
    throw validation_error(msg);
}

// One crossing per discretization step: at step i only the strands at
// heights (letter, letter+1) cross.
inline braid_diagram word_to_diagram(const positive_word& w, int n_inner) {
    if (w.letters.empty()) throw validation_error("word_to_diagram: empty word");
    if (n_inner < 2) throw validation_error("word_to_diagram: need at least two inner strands");
    for (int a : w.letters)
        if (a < 1 || a > n_inner - 1)
            throw validation_error("word_to_diagram: letter index " + std::to_string(a) +
                                   " out of range 1.." + std::to_string(n_inner - 1));
    braid_diagram b;
    b.m = n_inner + 2;
    b.d = int(w.letters.size());
    b.anchors.assign(b.m, std::vector<int>(b.d + 1));
    std::vector<int> height(b.m);
    std::vector<int> at_height(b.m);
    for (int s = 0; s < b.m; ++s) height[s] = at_height[s] = s;
    for (int s = 0; s < b.m; ++s) b.anchors[s][0] = s;
    for (int i = 0; i < b.d; ++i) {
        int h = w.letters[i];  // crossing heights h and h+1 (inner strands)
        int s1 = at_height[h], s2 = at_height[h + 1];
        std::swap(height[s1], height[s2]);
        std::swap(at_height[h], at_height[h + 1]);
        for (int s = 0; s < b.m; ++s) b.anchors[s][i + 1] = height[s];
    }
    return b;
}

// Reads off the positive word of a normal-form diagram.  Crossings within a
// step are ordered by their exact rational crossing parameter; ties are
// disjoint transpositions and are ordered by lower crossing height.
inline positive_word diagram_to_word(const braid_diagram& b) {
    require_valid(b);
    positive_word w;
    for (int i = 0; i < b.d; ++i) {
        struct crossing {
            long tnum, tden;  // crossing parameter t = tnum/tden, tden > 0
            long hnum;        // crossing height = hnum / tden
            int s1, s2;
        };
        std::vector<crossing> cs;
        for (int s = 0; s < b.m; ++s)
            for (int t = s + 1; t < b.m; ++t) {
                long a0 = b.anchors[s][i], a1 = b.anchors[s][i + 1];
                long b0 = b.anchors[t][i], b1 = b.anchors[t][i + 1];
                if ((a0 - b0) * (a1 - b1) >= 0) continue;
                long den = (a1 - a0) - (b1 - b0);
                long num = b0 - a0;
                if (den < 0) {
                    den = -den;
                    num = -num;
                }
                cs.push_back({num, den, a0 * den + num * (a1 - a0), s, t});
            }
        std::sort(cs.begin(), cs.end(), [](const crossing& x, const crossing& y) {
            long lhs = x.tnum * y.tden, rhs = y.tnum * x.tden;
            if (lhs != rhs) return lhs < rhs;
            return x.hnum * y.tden < y.hnum * x.tden;
        });
        for (size_t k = 0; k + 1 < cs.size(); ++k) {
            const auto &x = cs[k], &y = cs[k + 1];
            if (x.tnum * y.tden == y.tnum * x.tden &&
                (x.s1 == y.s1 || x.s1 == y.s2 || x.s2 == y.s1 || x.s2 == y.s2))
                throw invariant_error("diagram_to_word: coincident non-disjoint crossings");
        }
        for (const auto& c : cs) {
            // position = number of strands strictly below the crossing height
            // at parameter t (the boundary strand at height 0 counts)
            int below = 0;
            for (int s = 0; s < b.m; ++s) {
                if (s == c.s1 || s == c.s2) continue;
                long h = long(b.anchors[s][i]) * c.tden +
                         c.tnum * long(b.anchors[s][i + 1] - b.anchors[s][i]);
                if (h < c.hnum) ++below;
            }
            if (below < 1 || below > b.m - 3)
                throw invariant_error("diagram_to_word: crossing involves a boundary strand");
            w.letters.push_back(below);
        }
    }
    if (w.letters.empty())
        throw validation_error("diagram_to_word: diagram has no crossings (empty word)");
    return w;
}

// Extension operator: repeat the last anchor column once.
inline braid_diagram extend(const braid_diagram& b) {
    braid_diagram e = b;
    e.d = b.d + 1;
    for (int s = 0; s < b.m; ++s) e.anchors[s].push_back(b.anchors[s][b.d]);
    return e;
}

inline braid_diagram extend_k(const braid_diagram& b, int k) {
    if (k < 0) throw validation_error("extend: negative extension count");
    braid_diagram e = b;
    for (int i = 0; i < k; ++i) e = extend(e);
    return e;
}

// Crossing number of a free strand against the skeleton.  The strand is read
// 1-periodically (x_d = x_0); skeleton strands contribute sign changes of
// x - y^s over one period, with the closure column supplying y_d.
// Exact integer variant: pass twice the coordinates (odd integers for generic
// midpoints).
inline int intersection_number_2x(const std::vector<int>& x2, const braid_diagram& b) {
    if (int(x2.size()) != b.d)
        throw validation_error("intersection_number: free strand needs d values");
    for (int v : x2)
        if (v % 2 == 0) throw validation_error("intersection_number: non-generic coordinate");
    int total = 0;
    for (int s = 0; s < b.m; ++s) {
        for (int k = 0; k < b.d; ++k) {
            int xa = x2[k], xb = x2[(k + 1) % b.d];
            long da = long(xa) - 2L * b.anchors[s][k];
            long db = long(xb) - 2L * b.anchors[s][k + 1];
            if (da * db < 0) ++total;
        }
    }
    return total;
}

inline int intersection_number(const std::vector<double>& x, const braid_diagram& b) {
    if (int(x.size()) != b.d)
        throw validation_error("intersection_number: free strand needs d values");
    for (double v : x)
        if (v == std::floor(v))
            throw validation_error("intersection_number: non-generic coordinate " +
                                   std::to_string(v));
    int total = 0;
    for (int s = 0; s < b.m; ++s)
        for (int k = 0; k < b.d; ++k) {
            double da = x[k] - b.anchors[s][k];
            double db = x[(k + 1) % b.d] - b.anchors[s][k + 1];
            if (da * db < 0) ++total;
        }
    return total;
}

// ---- file format -----------------------------------------------------------

inline braid_diagram braid_from_json(const nlohmann::json& j) {
    braid_diagram b;
    try {
        b.m = j.at("m").get<int>();
        b.d = j.at("d").get<int>();
        b.anchors = j.at("anchors").get<std::vector<std::vector<int>>>();
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("braid file: ") + e.what());
    }
    require_valid(b);
    return b;
}

inline nlohmann::json braid_to_json(const braid_diagram& b) {
    nlohmann::ordered_json j;
    j["m"] = b.m;
    j["d"] = b.d;
    j["anchors"] = b.anchors;
    return j;
}

inline braid_diagram load_braid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open braid file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw validation_error("braid file " + path + ": " + e.what());
    }
    return braid_from_json(j);
}

inline void save_braid(const braid_diagram& b, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write braid file: " + path);
    out << braid_to_json(b).dump(2) << "\n";
}

}  // namespace morseflow
