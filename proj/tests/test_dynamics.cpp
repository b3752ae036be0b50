#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "morseflow/analysis.hpp"
#include "morseflow/dynamics.hpp"

using namespace morseflow;

namespace {

braid_diagram example_a() {
    return load_braid(std::string(MORSEFLOW_FIXTURE_DIR) + "/exampleA.json");
}

struct pipeline {
    cubical_complex x;
    lambda_data lam;
    flow_relations rel;
    sc_data scd;
};

pipeline run_example_a(bool full_relations) {
    pipeline p;
    braid_diagram b = example_a();
    p.x = build_complex(b.m, b.d);
    p.lam = compute_lambda(p.x, b);
    p.rel = relations(p.x, p.lam, full_relations);
    p.scd = sc_structure(p.x, p.lam, p.rel);
    return p;
}

// published 7x7 grid of crossing numbers; [i][j], i = first coordinate
const int kLambdaGrid[7][7] = {
    // j = 0..6 per row entry
    {0, 2, 4, 6, 8, 10, 12},   // i = 0
    {2, 2, 4, 6, 6, 8, 10},    // i = 1
    {4, 4, 4, 6, 4, 6, 8},     // i = 2
    {6, 4, 2, 4, 2, 4, 6},     // i = 3
    {8, 6, 4, 6, 4, 4, 4},     // i = 4
    {10, 8, 6, 6, 4, 2, 2},    // i = 5
    {12, 10, 8, 6, 4, 2, 0},   // i = 6
};

}  // namespace

TEST_CASE("crossing number table") {
    pipeline p = run_example_a(false);
    SECTION("matches the published grid cell by cell") {
        for (int i = 0; i < 7; ++i)
            for (int j = 0; j < 7; ++j)
                REQUIRE(p.lam.lambda_top[size_t(j) * 7 + i] == kLambdaGrid[i][j]);
    }
    SECTION("lambda envelope: equal on top cells, min <= max everywhere") {
        for (uint32_t c = 0; c < uint32_t(p.x.size()); ++c) {
            REQUIRE(p.lam.lminus[c] <= p.lam.lplus[c]);
            if (p.x.is_top(c)) {
                REQUIRE(p.lam.lminus[c] == p.lam.lplus[c]);
                REQUIRE(p.lam.lminus[c] == p.lam.lambda_top[size_t(p.x.top_ordinal(c))]);
            }
        }
    }
    SECTION("published envelope values on an edge and a vertex") {
        // edge between the lambda 0 and lambda 2 top cells at the lower left
        uint32_t edge = p.x.encode({2, 1});
        REQUIRE(p.lam.lminus[edge] == 0);
        REQUIRE(p.lam.lplus[edge] == 2);
        // vertex between the top cells with lambda {2,4,4,6}
        uint32_t vertex = p.x.encode({8, 6});
        REQUIRE(p.lam.lminus[vertex] == 2);
        REQUIRE(p.lam.lplus[vertex] == 6);
    }
    SECTION("evenness on random word-generated proper skeletons") {
        std::mt19937 rng(23);
        int done = 0;
        while (done < 30) {
            int n_inner = 2 + int(rng() % 2);
            int len = 1 + int(rng() % 6);
            positive_word w;
            for (int i = 0; i < len; ++i) w.letters.push_back(1 + int(rng() % (n_inner - 1)));
            braid_diagram bb = word_to_diagram(w, n_inner);
            if (!validate(bb).empty()) continue;
            cubical_complex x = build_complex(bb.m, bb.d);
            lambda_data lam = compute_lambda(x, bb);
            for (int v : lam.lambda_top) REQUIRE(v % 2 == 0);
            ++done;
        }
    }
}

TEST_CASE("flow relations") {
    pipeline p = run_example_a(true);
    SECTION("reflexive R pairs sit exactly on top cells") {
        std::set<std::pair<int, int>> rset(p.rel.r.pairs.begin(), p.rel.r.pairs.end());
        for (uint32_t c = 0; c < uint32_t(p.x.size()); ++c)
            REQUIRE(rset.count({int(c), int(c)}) == size_t(p.x.is_top(c)));
    }
    SECTION("equal-lambda adjacent top cells relate both ways in F") {
        std::set<std::pair<int, int>> fset(p.rel.f.pairs.begin(), p.rel.f.pairs.end());
        // ordinals of (0,1) and (1,1): both lambda 2
        int64_t a = 0 + 7 * 1, b = 1 + 7 * 1;
        REQUIRE(fset.count({int(a), int(b)}));
        REQUIRE(fset.count({int(b), int(a)}));
    }
    SECTION("F points from the smaller lambda to the larger") {
        for (auto [a, b] : p.rel.f.pairs)
            REQUIRE(p.lam.lambda_top[size_t(a)] <= p.lam.lambda_top[size_t(b)]);
        // the lambda 0 corner feeds into each neighbour, never back
        std::set<std::pair<int, int>> fset(p.rel.f.pairs.begin(), p.rel.f.pairs.end());
        REQUIRE(fset.count({0, 1}));       // (0,0) -> (1,0)
        REQUIRE_FALSE(fset.count({1, 0}));
        REQUIRE(fset.count({0, 7}));       // (0,0) -> (0,1)
        REQUIRE_FALSE(fset.count({7, 0}));
    }
    SECTION("Etop pairs differ in exactly one coordinate by one interval") {
        for (auto [a, b] : p.rel.etop.pairs) {
            auto ca = p.x.decode(p.x.top_cell(a)), cb = p.x.decode(p.x.top_cell(b));
            int diffs = 0;
            for (int i = 0; i < p.x.d(); ++i)
                if (ca[i] != cb[i]) {
                    ++diffs;
                    REQUIRE(std::abs(ca[i] - cb[i]) == 2);
                }
            REQUIRE(diffs == 1);
        }
    }
}

TEST_CASE("sc structure") {
    pipeline p = run_example_a(true);
    SECTION("29 classes") { REQUIRE(p.scd.class_count() == 29); }
    SECTION("scc of the transitive reflexive closure agrees") {
        pre_order clo = closure_trans_refl(p.rel.f);
        // partial equivalence classes of the pre-order = SCCs
        scc_poset viaclosure = scc_condense(clo.to_relation());
        REQUIRE(viaclosure.classes.size() == 29);
    }
    SECTION("class lambda even, laps 0..6, lap = lambda/2") {
        std::set<int> laps;
        for (int c = 0; c < p.scd.class_count(); ++c) {
            REQUIRE(p.scd.lambda_class[c] % 2 == 0);
            REQUIRE(p.scd.lap[c] == p.scd.lambda_class[c] / 2);
            laps.insert(p.scd.lap[c]);
        }
        REQUIRE(laps == std::set<int>{0, 1, 2, 3, 4, 5, 6});
    }
    SECTION("lambda monotone along F forces constancy on classes") {
        for (int c = 0; c < p.scd.class_count(); ++c)
            for (int v : p.scd.sc.classes[size_t(c)])
                REQUIRE(p.lam.lambda_top[size_t(v)] == p.scd.lambda_class[c]);
    }
    SECTION("dyn of a top cell is its own class") {
        for (int64_t o = 0; o < p.x.top_count(); ++o)
            REQUIRE(p.scd.dyn[p.x.top_cell(o)] == p.scd.sc.class_of[size_t(o)]);
    }
    SECTION("dyn is order-preserving on every face pair") {
        for (uint32_t c = 0; c < uint32_t(p.x.size()); ++c)
            for (uint32_t f : p.x.faces(c))
                REQUIRE(p.scd.sc.order.leq(p.scd.dyn[f], p.scd.dyn[c]));
    }
    SECTION("lap is order-preserving on SC") {
        for (int a = 0; a < p.scd.class_count(); ++a)
            for (int b = 0; b < p.scd.class_count(); ++b)
                if (p.scd.sc.order.leq(a, b)) REQUIRE(p.scd.lap[a] <= p.scd.lap[b]);
    }
    SECTION("R-classes restricted to top cells match dyn fibers") {
        REQUIRE(r_scc_matches_dyn(p.x, p.rel, p.scd));
    }
}

TEST_CASE("morse pre-order") {
    pipeline p = run_example_a(false);
    morse_preorder mp = make_morse_preorder(p.scd);
    SECTION("cells of one dyn fiber are mutually related") {
        uint32_t a = p.x.top_cell(0);
        for (uint32_t c = 0; c < uint32_t(p.x.size()); ++c)
            if (p.scd.dyn[c] == p.scd.dyn[a]) {
                REQUIRE(mp.leq(c, a));
                REQUIRE(mp.leq(a, c));
            }
    }
    SECTION("faces are below their cofaces") {
        for (uint32_t c = 0; c < uint32_t(p.x.size()); ++c)
            for (uint32_t f : p.x.faces(c)) REQUIRE(mp.leq(f, c));
    }
    SECTION("ideal count equals the ideal count of SC") {
        // condense the materialized pre-order and count ideals on both sides
        pre_order full = mp.materialize(p.x.size());
        scc_poset cond = scc_condense(full.to_relation());
        REQUIRE(cond.classes.size() == size_t(p.scd.class_count()));
        REQUIRE(count_ideals(cond.order) == count_ideals(p.scd.sc.order));
    }
}

TEST_CASE("attracting blocks") {
    pipeline p = run_example_a(false);
    SECTION("empty and full down-sets") {
        REQUIRE(verify_block(p.x, p.lam, p.scd, {}));
        std::vector<int> all(p.scd.class_count());
        for (int c = 0; c < p.scd.class_count(); ++c) all[c] = c;
        REQUIRE(verify_block(p.x, p.lam, p.scd, all));
    }
    SECTION("every principal down-set is a block") {
        for (int c = 0; c < p.scd.class_count(); ++c) {
            std::vector<int> alpha;
            p.scd.sc.order.down[c].for_each([&](int b) { alpha.push_back(b); });
            REQUIRE(verify_block(p.x, p.lam, p.scd, alpha));
        }
    }
    SECTION("aggregated check agrees") {
        REQUIRE(verify_blocks_all_principal(p.x, p.lam, p.scd));
    }
    SECTION("non-down-sets are rejected") {
        // a maximal class alone is not a down-set (29 classes, top of the order)
        int top_class = -1;
        for (int c = 0; c < p.scd.class_count(); ++c)
            if (p.scd.sc.order.down[c].count() > 1) top_class = c;
        REQUIRE(top_class >= 0);
        REQUIRE_THROWS_AS(verify_block(p.x, p.lam, p.scd, {top_class}), validation_error);
    }
}

TEST_CASE("blocks on random proper skeletons") {
    std::mt19937 rng(31);
    int done = 0;
    while (done < 10) {
        int n_inner = 2 + int(rng() % 2);
        int len = 1 + int(rng() % 5);
        positive_word w;
        for (int i = 0; i < len; ++i) w.letters.push_back(1 + int(rng() % (n_inner - 1)));
        braid_diagram bb = word_to_diagram(w, n_inner);
        if (!validate(bb).empty()) continue;
        cubical_complex x = build_complex(bb.m, bb.d);
        lambda_data lam = compute_lambda(x, bb);
        flow_relations rel = relations(x, lam, false);
        sc_data scd = sc_structure(x, lam, rel);
        REQUIRE(verify_blocks_all_principal(x, lam, scd));
        ++done;
    }
}
