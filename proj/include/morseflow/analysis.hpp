#pragma once

#include <iomanip>

#include "braid.hpp"
#include "grading.hpp"

namespace morseflow {

struct analysis_options {
    int64_t cell_budget = 10'000'000;
    int threads = 0;            // 0: MORSEFLOW_THREADS or 1
    bool debug_chain_maps = false;
    bool build_full_relations = false;  // E and R on all cells
};

// Everything the pipeline produces for one skeleton.
struct analysis_result {
    braid_diagram braid;
    cubical_complex complex;
    lambda_data lambda;
    flow_relations rels;
    sc_data scd;
    conley_complex conley;
    betti_table betti;
    parabolic_module module;
    morse_relations_result morse;
    phase_diagram diagram;
};

inline analysis_result analyze(const braid_diagram& b, const analysis_options& opt = {}) {
    analysis_result r;
    r.braid = b;
    require_valid(b);
    r.complex = build_complex(b.m, b.d, opt.cell_budget);
    r.lambda = compute_lambda(r.complex, b, opt.threads);
    r.rels = relations(r.complex, r.lambda, opt.build_full_relations);
    r.scd = sc_structure(r.complex, r.lambda, r.rels);
    graded_complex gc = graded_complex_of(r.complex, r.scd);
    grade_order ord{&r.scd.sc.order};
    r.conley = connection_matrix(gc, opt.debug_chain_maps, &ord);
    r.betti = betti_bm(r.conley);
    r.module = bigraded_blocks(r.conley, r.scd);
    std::vector<int> all_classes(r.scd.class_count());
    for (int c = 0; c < r.scd.class_count(); ++c) all_classes[c] = c;
    r.morse = morse_relations(r.conley, r.scd, all_classes);
    r.diagram = make_phase_diagram(r.scd, r.betti);
    return r;
}

// FNV-1a over the anchor matrix; stable input fingerprint for reports.
inline std::string braid_fingerprint(const braid_diagram& b) {
    uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&](uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ull;
    };
    mix(uint64_t(b.m));
    mix(uint64_t(b.d));
    for (const auto& row : b.anchors)
        for (int v : row) mix(uint64_t(v) + 0x9e3779b97f4a7c15ull);
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline nlohmann::ordered_json analysis_report(const analysis_result& r) {
    nlohmann::ordered_json j;
    j["input"] = {{"m", r.braid.m}, {"d", r.braid.d}, {"hash", braid_fingerprint(r.braid)}};
    j["complex"] = {{"cells", r.complex.size()}, {"top_cells", r.complex.top_count()}};

    nlohmann::ordered_json classes = nlohmann::ordered_json::array();
    for (int c = 0; c < r.scd.class_count(); ++c) {
        nlohmann::ordered_json cls;
        cls["id"] = c;
        cls["lap"] = r.scd.lap[c];
        cls["lambda"] = r.scd.lambda_class[c];
        nlohmann::ordered_json tops = nlohmann::ordered_json::array();
        for (int o : r.scd.sc.classes[size_t(c)]) tops.push_back(r.complex.top_cell(o));
        cls["top_cells"] = tops;
        cls["hasse_successors"] = r.scd.sc.order.covers[c];  // classes covered by c
        classes.push_back(cls);
    }
    j["sc"] = {{"count", r.scd.class_count()}, {"classes", classes}};

    nlohmann::ordered_json betti = nlohmann::ordered_json::array();
    for (auto& [key, rank] : r.betti.rank)
        betti.push_back({{"class", key.first}, {"q", key.second}, {"rank", rank}});
    j["betti"] = betti;

    nlohmann::ordered_json gens = nlohmann::ordered_json::array();
    for (uint32_t g = 0; g < r.conley.c.gens.size(); ++g)
        gens.push_back({{"id", g},
                        {"class", r.conley.c.gens[g].grade},
                        {"q", r.conley.c.gens[g].dim}});
    std::vector<std::pair<uint32_t, uint32_t>> entries;
    for (uint32_t col = 0; col < r.conley.c.cols.size(); ++col)
        for (uint32_t row : r.conley.c.cols[col]) entries.emplace_back(row, col);
    std::sort(entries.begin(), entries.end());
    nlohmann::ordered_json diff = nlohmann::ordered_json::array();
    for (auto [row, col] : entries) diff.push_back({row, col});
    j["conley"] = {{"generators", gens}, {"differential", diff}};

    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const auto& b : r.module.blocks) {
        nlohmann::ordered_json blk;
        blk["r"] = b.r;
        blk["p"] = b.p;
        blk["q"] = b.q;
        blk["rows"] = nlohmann::ordered_json::array();
        for (uint32_t g : b.rows) blk["rows"].push_back(r.conley.c.gens[g].grade);
        blk["cols"] = nlohmann::ordered_json::array();
        for (uint32_t g : b.cols) blk["cols"].push_back(r.conley.c.gens[g].grade);
        blk["matrix"] = b.matrix;
        blocks.push_back(blk);
    }
    j["differential_blocks"] = blocks;

    nlohmann::ordered_json qpolys;
    for (auto& [rr, poly] : r.morse.q_polys) qpolys[std::to_string(rr)] = poly.to_json();
    j["morse"] = {{"generator_polynomial", r.morse.lhs.to_json()},
                  {"homology_polynomial", r.morse.homology.to_json()},
                  {"Q", qpolys},
                  {"identity", r.morse.identity_holds}};

    j["phase_diagram"] = diagram_to_json(r.diagram, r.module);
    j["total_polynomial"] = r.diagram.total().to_json();

    if (r.conley.has_maps) {
        nlohmann::ordered_json maps;
        maps["phi"] = r.conley.maps.phi;
        maps["psi"] = r.conley.maps.psi;
        j["chain_maps"] = maps;
    }
    return j;
}

// Published-table text format for d = 2 skeletons: one row per horizontal
// band of top cells, top band first, columns left to right, single spaces.
inline std::string lambda_table_text(const analysis_result& r) {
    if (r.complex.d() != 2)
        throw validation_error("lambda table requires a d = 2 complex");
    int w = r.complex.m() - 1;
    std::string s;
    for (int j = w - 1; j >= 0; --j) {
        for (int i = 0; i < w; ++i) {
            if (i) s += " ";
            s += std::to_string(r.lambda.lambda_top[size_t(j) * w + i]);
        }
        s += "\n";
    }
    return s;
}

// ---- self-check ------------------------------------------------------------

struct selfcheck_report {
    std::vector<std::pair<std::string, bool>> checks;
    bool ok = true;

    void add(const std::string& name, bool pass) {
        checks.emplace_back(name, pass);
        ok = ok && pass;
    }
};

inline void selfcheck_order_roundtrips(selfcheck_report& rep, int count, uint64_t seed) {
    uint64_t state = seed;
    auto next = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    };
    bool all = true;
    for (int t = 0; t < count; ++t) {
        int n = 2 + int(next() % 7);
        relation r;
        r.n = n;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (next() % 3 == 0) r.add(a, b);
        r.normalize();
        poset p = make_poset(closure_trans_refl(r));
        auto ds = down_sets(p);
        std::vector<std::set<int>> lattice;
        for (auto& d : ds) lattice.emplace_back(d.begin(), d.end());
        irreducibles ji = join_irreducibles(lattice);
        bool iso = ji.order.n == p.n;
        if (iso) {
            // J(O(P)) is realized by principal down-sets; match them back
            std::vector<int> mapped(p.n, -1);
            for (int i = 0; i < ji.order.n && iso; ++i) {
                // the set realizing element i is a principal down-set
                int found = -1;
                for (int v = 0; v < p.n; ++v) {
                    std::set<int> principal;
                    p.down[v].for_each([&](int u) { principal.insert(u); });
                    if (principal == ji.sets[size_t(i)]) found = v;
                }
                if (found < 0)
                    iso = false;
                else
                    mapped[i] = found;
            }
            for (int a = 0; a < ji.order.n && iso; ++a)
                for (int b = 0; b < ji.order.n && iso; ++b)
                    if (ji.order.leq(a, b) != p.leq(mapped[a], mapped[b])) iso = false;
        }
        // second round trip: down-sets of J(L) give back L
        if (iso) {
            auto ds2 = down_sets(ji.order);
            iso = ds2.size() == ds.size();
        }
        all = all && iso;
    }
    rep.add("birkhoff round trips (" + std::to_string(count) + " random posets)", all);
}

inline void selfcheck_fixture(selfcheck_report& rep, const std::string& name,
                              const braid_diagram& b, int sampled_downsets, uint64_t seed) {
    analysis_result r = analyze(b);

    // dd = 0 comes with the boundary construction; verify on the graded complex
    {
        graded_complex gc = graded_complex_of(r.complex, r.scd, false);
        bool ok = true;
        std::vector<uint32_t> acc, tmp;
        for (uint32_t c = 0; c < gc.gens.size() && ok; ++c) {
            acc.clear();
            for (uint32_t g : gc.cols[c]) {
                symdiff_into(acc, gc.cols[g], tmp);
                acc.swap(tmp);
            }
            ok = acc.empty();
        }
        rep.add(name + ": dd = 0", ok);
    }

    rep.add(name + ": attracting blocks on all principal down-sets",
            verify_blocks_all_principal(r.complex, r.lambda, r.scd));

    {
        graded_complex gc = graded_complex_of(r.complex, r.scd, false);
        std::vector<std::vector<int>> sets;
        if (r.scd.class_count() <= 12) {
            for (auto& ds : down_sets(r.scd.sc.order)) sets.push_back(ds);
        } else {
            sets = random_down_sets(r.scd.sc.order, sampled_downsets, seed);
        }
        bool ok = true;
        try {
            verify_equivalence(gc, r.conley, {&r.scd.sc.order}, sets);
        } catch (const invariant_error&) {
            ok = false;
        }
        rep.add(name + ": homology braid source vs conley (" + std::to_string(sets.size()) +
                    " down-sets)",
                ok);
    }

    rep.add(name + ": morse relation identity", r.morse.identity_holds);

    bool total_ok = r.morse.homology == poly2::term(0, 0);
    rep.add(name + ": total homology is rank 1 at (0,0)", total_ok);
}

}  // namespace morseflow
