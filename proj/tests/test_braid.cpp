#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <random>

#include "morseflow/braid.hpp"

using namespace morseflow;

namespace {

braid_diagram example_a() {
    braid_diagram b;
    b.m = 8;
    b.d = 2;
    b.anchors = {{0, 0, 0}, {1, 1, 3}, {2, 4, 1}, {3, 2, 2},
                 {4, 6, 6}, {5, 5, 4}, {6, 3, 5}, {7, 7, 7}};
    return b;
}

braid_diagram pseudo_anosov() {
    braid_diagram b;
    b.m = 5;
    b.d = 6;
    b.anchors = {{0, 0, 0, 0, 0, 0, 0},
                 {1, 2, 1, 2, 3, 2, 3},
                 {2, 3, 2, 3, 1, 3, 1},
                 {3, 1, 3, 1, 2, 1, 2},
                 {4, 4, 4, 4, 4, 4, 4}};
    return b;
}

bool has_fault(const std::vector<braid_issue>& issues, braid_fault f) {
    for (const auto& is : issues)
        if (is.fault == f) return true;
    return false;
}

}  // namespace

TEST_CASE("validation") {
    SECTION("the m=8 d=2 skeleton is valid with closure (1 3 2)(4 6 5)") {
        braid_diagram b = example_a();
        REQUIRE(validate(b).empty());
        auto th = theta(b);
        REQUIRE(th == std::vector<int>{0, 3, 1, 2, 6, 4, 5, 7});
        auto cycles = permutation_cycles(th);
        std::vector<std::vector<int>> inner;
        for (auto& c : cycles)
            if (c.size() > 1) inner.push_back(c);
        REQUIRE(inner == std::vector<std::vector<int>>{{1, 3, 2}, {4, 6, 5}});
    }
    SECTION("an inner strand of period one is improper") {
        positive_word w;
        w.letters = {1, 1};  // s1 s1 closes both inner strands to themselves
        braid_diagram b = word_to_diagram(w, 2);
        auto issues = validate(b);
        REQUIRE(has_fault(issues, braid_fault::improper));
    }
    SECTION("a shared anchor with same-side neighbours is a tangency") {
        braid_diagram b;
        b.m = 4;
        b.d = 2;
        b.anchors = {{0, 0, 0}, {1, 1, 1}, {2, 1, 2}, {3, 3, 3}};
        auto issues = validate(b);
        REQUIRE(has_fault(issues, braid_fault::tangency));
        REQUIRE(has_fault(issues, braid_fault::column_not_permutation));
    }
    SECTION("boundary strands must stay constant") {
        braid_diagram b = example_a();
        b.anchors[0][1] = 1;
        b.anchors[1][1] = 0;
        auto issues = validate(b);
        REQUIRE(has_fault(issues, braid_fault::boundary));
    }
}

TEST_CASE("closure permutation") {
    SECTION("identity-ish diagram: constant strands give the identity") {
        braid_diagram b;
        b.m = 3;
        b.d = 1;
        b.anchors = {{0, 0}, {1, 1}, {2, 2}};
        REQUIRE(theta(b) == std::vector<int>{0, 1, 2});
    }
    SECTION("pseudo-anosov skeleton closes as a 3-cycle") {
        auto th = theta(pseudo_anosov());
        REQUIRE(th == std::vector<int>{0, 3, 1, 2, 4});
        auto cycles = permutation_cycles(th);
        std::vector<std::vector<int>> inner;
        for (auto& c : cycles)
            if (c.size() > 1) inner.push_back(c);
        REQUIRE(inner == std::vector<std::vector<int>>{{1, 3, 2}});
    }
}

TEST_CASE("word to diagram") {
    SECTION("single generator") {
        positive_word w;
        w.letters = {1};
        braid_diagram b = word_to_diagram(w, 2);
        REQUIRE(b.m == 4);
        REQUIRE(b.d == 1);
        REQUIRE(b.anchors[1] == std::vector<int>{1, 2});
        REQUIRE(b.anchors[2] == std::vector<int>{2, 1});
        REQUIRE(validate(b).empty());
    }
    SECTION("empty word is rejected") {
        positive_word w;
        REQUIRE_THROWS_AS(word_to_diagram(w, 2), validation_error);
    }
    SECTION("letter out of range is rejected") {
        positive_word w;
        w.letters = {3};
        REQUIRE_THROWS_AS(word_to_diagram(w, 3), validation_error);
    }
    SECTION("s1^5 s2 gives a valid proper diagram") {
        positive_word w;
        w.letters = {1, 1, 1, 1, 1, 2};
        braid_diagram b = word_to_diagram(w, 3);
        REQUIRE(b.m == 5);
        REQUIRE(b.d == 6);
        REQUIRE(validate(b).empty());
    }
}

TEST_CASE("diagram to word") {
    SECTION("round trip") {
        positive_word w;
        w.letters = {2, 1};
        braid_diagram b = word_to_diagram(w, 3);
        REQUIRE(diagram_to_word(b).letters == w.letters);
    }
    SECTION("the d=3 presentation reads s2 s1 s1 s2 s2 s1") {
        braid_diagram b;
        b.m = 5;
        b.d = 3;
        b.anchors = {{0, 0, 0, 0}, {1, 2, 1, 2}, {2, 3, 2, 3}, {3, 1, 3, 1}, {4, 4, 4, 4}};
        REQUIRE(diagram_to_word(b).letters == std::vector<int>{2, 1, 1, 2, 2, 1});
    }
    SECTION("a crossingless diagram has no word") {
        braid_diagram b;
        b.m = 4;
        b.d = 2;
        b.anchors = {{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}};
        REQUIRE_THROWS_AS(diagram_to_word(b), validation_error);
    }
    SECTION("random words round trip letter for letter") {
        std::mt19937 rng(11);
        int done = 0;
        while (done < 50) {
            int n_inner = 2 + int(rng() % 2);
            int len = 1 + int(rng() % 6);
            positive_word w;
            for (int i = 0; i < len; ++i) w.letters.push_back(1 + int(rng() % (n_inner - 1)));
            braid_diagram b = word_to_diagram(w, n_inner);
            if (!validate(b).empty()) continue;  // improper words are skipped
            REQUIRE(diagram_to_word(b).letters == w.letters);
            ++done;
        }
    }
}

TEST_CASE("extension operator") {
    SECTION("adds one constant step") {
        braid_diagram b = example_a();
        braid_diagram e = extend(b);
        REQUIRE(e.d == 3);
        for (int s = 0; s < e.m; ++s) {
            REQUIRE(e.anchors[s].size() == 4);
            REQUIRE(e.anchors[s][3] == b.anchors[s][2]);
        }
        REQUIRE(validate(e).empty());
        REQUIRE(theta(e) == theta(b));
    }
    SECTION("twice equals two extra columns") {
        braid_diagram b = example_a();
        braid_diagram e2 = extend(extend(b));
        braid_diagram k2 = extend_k(b, 2);
        REQUIRE(e2.anchors == k2.anchors);
        REQUIRE(e2.d == b.d + 2);
    }
    SECTION("negative count is rejected") {
        REQUIRE_THROWS_AS(extend_k(example_a(), -1), validation_error);
    }
}

TEST_CASE("crossing numbers") {
    braid_diagram b = example_a();
    SECTION("published corner, interior and centre values") {
        REQUIRE(intersection_number({0.5, 0.5}, b) == 0);
        REQUIRE(intersection_number({1.5, 1.5}, b) == 2);
        REQUIRE(intersection_number({3.5, 3.5}, b) == 4);
    }
    SECTION("non-generic strands are rejected") {
        REQUIRE_THROWS_AS(intersection_number({1.0, 1.5}, b), validation_error);
    }
    SECTION("crossing numbers of closed strands are even") {
        std::mt19937 rng(17);
        int done = 0;
        while (done < 40) {
            int n_inner = 2 + int(rng() % 2);
            int len = 1 + int(rng() % 6);
            positive_word w;
            for (int i = 0; i < len; ++i) w.letters.push_back(1 + int(rng() % (n_inner - 1)));
            braid_diagram bb = word_to_diagram(w, n_inner);
            if (!validate(bb).empty()) continue;
            for (int t = 0; t < 10; ++t) {
                std::vector<double> x(bb.d);
                for (auto& v : x) v = double(rng() % (bb.m - 1)) + 0.5;
                REQUIRE(intersection_number(x, bb) % 2 == 0);
            }
            ++done;
        }
    }
}

TEST_CASE("braid files") {
    SECTION("fixtures load and validate") {
        for (const char* name : {"exampleA", "sigma_d3", "sigma_d4", "sigma_d5",
                                 "pseudo_anosov"}) {
            braid_diagram b =
                load_braid(std::string(MORSEFLOW_FIXTURE_DIR) + "/" + name + ".json");
            REQUIRE(validate(b).empty());
        }
    }
    SECTION("round trip through a temp file") {
        auto path = std::filesystem::temp_directory_path() / "morseflow_braid_rt.json";
        save_braid(example_a(), path.string());
        braid_diagram b = load_braid(path.string());
        REQUIRE(b.anchors == example_a().anchors);
        std::filesystem::remove(path);
    }
    SECTION("invalid content is rejected with a validation error") {
        auto path = std::filesystem::temp_directory_path() / "morseflow_braid_bad.json";
        std::ofstream(path) << "{\"m\": 3, \"d\": 1, \"anchors\": [[0,0],[1,1],[2,2],[3,3]]}";
        REQUIRE_THROWS_AS(load_braid(path.string()), validation_error);
        std::filesystem::remove(path);
    }
}
