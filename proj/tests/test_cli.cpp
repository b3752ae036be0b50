#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "morseflow/braid.hpp"

namespace fs = std::filesystem;

namespace {

struct run_result {
    int exit_code;
    std::string out;
};

run_result run(const std::string& args) {
    std::string cmd = std::string(MORSEFLOW_TOOL_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string fixture(const std::string& name) {
    return std::string(MORSEFLOW_FIXTURE_DIR) + "/" + name + ".json";
}

}  // namespace

TEST_CASE("analyze command") {
    SECTION("reports match their golden files byte for byte") {
        for (const char* name :
             {"exampleA", "sigma_d3", "sigma_d4", "sigma_d5", "pseudo_anosov"}) {
            run_result r = run("analyze " + fixture(name));
            REQUIRE(r.exit_code == 0);
            std::string golden = read_file(fs::path(MORSEFLOW_GOLDEN_DIR) /
                                           (std::string(name) + "_report.json"));
            REQUIRE(r.out == golden);
        }
    }
    SECTION("lambda table matches its golden file") {
        auto tmp = fs::temp_directory_path() / "morseflow_cli_lambda.txt";
        run_result r =
            run("analyze " + fixture("exampleA") + " --lambda-table " + tmp.string());
        REQUIRE(r.exit_code == 0);
        REQUIRE(read_file(tmp) ==
                read_file(fs::path(MORSEFLOW_GOLDEN_DIR) / "exampleA_lambda.txt"));
        fs::remove(tmp);
    }
    SECTION("identical runs are byte identical, independent of thread count") {
        run_result a = run("analyze " + fixture("sigma_d3"));
        setenv("MORSEFLOW_THREADS", "3", 1);
        run_result b = run("analyze " + fixture("sigma_d3"));
        unsetenv("MORSEFLOW_THREADS");
        REQUIRE(a.out == b.out);
    }
    SECTION("malformed input exits with the validation code") {
        auto tmp = fs::temp_directory_path() / "morseflow_cli_bad.json";
        std::ofstream(tmp) << "{\"m\": 3}";
        run_result r = run("analyze " + tmp.string());
        REQUIRE(r.exit_code == 2);
        fs::remove(tmp);
    }
    SECTION("dot files are written") {
        auto dir = fs::temp_directory_path() / "morseflow_cli_dot";
        run_result r = run("analyze " + fixture("sigma_d3") + " --dot " + dir.string() +
                           " --json /dev/null");
        REQUIRE(r.exit_code == 0);
        REQUIRE(fs::exists(dir / "sigma_d3_phase.dot"));
        REQUIRE(fs::exists(dir / "sigma_d3_reduced.dot"));
        fs::remove_all(dir);
    }
    SECTION("cell budget is enforced") {
        run_result r = run("analyze " + fixture("pseudo_anosov") + " --cell-budget 1000");
        REQUIRE(r.exit_code == 2);
    }
}

TEST_CASE("word2braid command") {
    SECTION("single generator gives the d=1 presentation") {
        run_result r = run("word2braid \"s1\" --n-inner 2");
        REQUIRE(r.exit_code == 0);
        auto j = nlohmann::json::parse(r.out);
        REQUIRE(j["m"] == 4);
        REQUIRE(j["d"] == 1);
    }
    SECTION("s1^5 s2 is accepted and valid") {
        run_result r = run("word2braid \"s1 s1 s1 s1 s1 s2\" --n-inner 3");
        REQUIRE(r.exit_code == 0);
        morseflow::braid_diagram b = morseflow::braid_from_json(nlohmann::json::parse(r.out));
        REQUIRE(b.d == 6);
    }
    SECTION("bad tokens are rejected") {
        REQUIRE(run("word2braid \"x9\" --n-inner 2").exit_code == 2);
        REQUIRE(run("word2braid \"s9\" --n-inner 2").exit_code == 2);
    }
}

TEST_CASE("extend command") {
    SECTION("k=0 is the identity") {
        run_result r = run("extend " + fixture("exampleA") + " -k 0");
        REQUIRE(r.exit_code == 0);
        auto j = nlohmann::json::parse(r.out);
        REQUIRE(j["d"] == 2);
        auto orig = nlohmann::json::parse(read_file(fixture("exampleA")));
        REQUIRE(j["anchors"] == orig["anchors"]);
    }
    SECTION("k=1 adds a column") {
        run_result r = run("extend " + fixture("exampleA") + " -k 1");
        auto j = nlohmann::json::parse(r.out);
        REQUIRE(j["d"] == 3);
    }
    SECTION("negative k is rejected") {
        REQUIRE(run("extend " + fixture("exampleA") + " -k -2").exit_code == 2);
    }
}

TEST_CASE("compare command") {
    SECTION("conjugate presentations compare equal") {
        run_result r = run("compare " + fixture("sigma_d3") + " " + fixture("sigma_d4"));
        REQUIRE(r.exit_code == 0);
        auto j = nlohmann::json::parse(r.out);
        REQUIRE(j["isomorphic"] == true);
        REQUIRE(j["polynomial_equal"] == true);
    }
    SECTION("a file compares equal to itself") {
        run_result r = run("compare " + fixture("exampleA") + " " + fixture("exampleA"));
        auto j = nlohmann::json::parse(r.out);
        REQUIRE(j["isomorphic"] == true);
        REQUIRE(j["polynomial_equal"] == true);
    }
    SECTION("distinct braids compare different") {
        run_result r = run("compare " + fixture("exampleA") + " " + fixture("pseudo_anosov"));
        auto j = nlohmann::json::parse(r.out);
        REQUIRE(j["isomorphic"] == false);
    }
}

TEST_CASE("selfcheck command") {
    SECTION("a clean fixture directory passes") {
        auto dir = fs::temp_directory_path() / "morseflow_cli_selfcheck";
        fs::create_directories(dir);
        fs::copy_file(fixture("exampleA"), dir / "exampleA.json",
                      fs::copy_options::overwrite_existing);
        fs::copy_file(fixture("sigma_d3"), dir / "sigma_d3.json",
                      fs::copy_options::overwrite_existing);
        run_result r = run("selfcheck --fixtures " + dir.string() + " -v");
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.out.find("FAIL") == std::string::npos);
        REQUIRE(r.out.find("PASS") != std::string::npos);
        SECTION("a corrupted fixture fails") {
            std::ofstream(dir / "broken.json") << "{\"m\": 5, \"d\": 1, \"anchors\": []}";
            REQUIRE(run("selfcheck --fixtures " + dir.string()).exit_code != 0);
        }
        fs::remove_all(dir);
    }
}
