// morseflow: analyze discretized braid skeletons and export the resulting
// order/homology data.  See README.md for the file formats.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "morseflow/analysis.hpp"

namespace fs = std::filesystem;
using namespace morseflow;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write " + path);
    out << content;
}

positive_word parse_word(const std::string& text) {
    positive_word w;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        if (tok.size() < 2 || (tok[0] != 's' && tok[0] != 'S'))
            throw validation_error("bad word token '" + tok + "' (expected s<k>)");
        for (size_t i = 1; i < tok.size(); ++i)
            if (!isdigit(static_cast<unsigned char>(tok[i])))
                throw validation_error("bad word token '" + tok + "' (expected s<k>)");
        w.letters.push_back(std::stoi(tok.substr(1)));
    }
    if (w.letters.empty()) throw validation_error("empty word");
    return w;
}

nlohmann::ordered_json error_json(const std::string& kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    return j;
}

int run(int argc, char** argv) {
    CLI::App app{"discretized parabolic flow analysis on braid skeletons"};
    app.require_subcommand(1);

    std::string field = "gf2";
    app.add_option("--field", field, "coefficient field (only gf2)");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "run the full pipeline on a braid file");
    std::string analyze_input, json_path, dot_dir, lambda_path;
    int64_t cell_budget = 10'000'000;
    bool debug_chain_maps = false;
    analyze_cmd->add_option("input", analyze_input, "braid JSON file")->required();
    analyze_cmd->add_option("--json", json_path, "write the report to a file");
    analyze_cmd->add_option("--dot", dot_dir, "write phase-diagram DOT files to a directory");
    analyze_cmd->add_option("--lambda-table", lambda_path, "write the top-cell lambda grid");
    analyze_cmd->add_option("--cell-budget", cell_budget, "maximum cell count");
    analyze_cmd->add_flag("--debug-chain-maps", debug_chain_maps,
                          "retain reduction chain maps");

    // word2braid
    auto* word_cmd = app.add_subcommand("word2braid", "build a braid file from a positive word");
    std::string word_text, word_out;
    int n_inner = 0;
    word_cmd->add_option("word", word_text, "positive word, e.g. \"s1 s1 s2\"")->required();
    word_cmd->add_option("--n-inner", n_inner, "number of inner strands")->required();
    word_cmd->add_option("-o,--output", word_out, "output braid file (default stdout)");

    // extend
    auto* extend_cmd = app.add_subcommand("extend", "apply the extension operator k times");
    std::string extend_input, extend_out;
    int extend_k_count = 1;
    extend_cmd->add_option("input", extend_input, "braid JSON file")->required();
    extend_cmd->add_option("-k", extend_k_count, "number of extension steps");
    extend_cmd->add_option("-o,--output", extend_out, "output braid file (default stdout)");

    // compare
    auto* compare_cmd =
        app.add_subcommand("compare", "compare the reduced phase diagrams of two braids");
    std::string cmp_a, cmp_b;
    compare_cmd->add_option("a", cmp_a, "first braid file")->required();
    compare_cmd->add_option("b", cmp_b, "second braid file")->required();

    // selfcheck
    auto* self_cmd = app.add_subcommand("selfcheck", "run the property suite on the fixtures");
    std::string fixtures_dir = "fixtures";
    bool verbose = false;
    self_cmd->add_option("--fixtures", fixtures_dir, "fixture directory");
    self_cmd->add_flag("-v,--verbose", verbose, "list each check");

    CLI11_PARSE(app, argc, argv);

    if (field != "gf2") throw validation_error("unsupported field '" + field + "'");

    if (*analyze_cmd) {
        braid_diagram b = load_braid(analyze_input);
        analysis_options opt;
        opt.cell_budget = cell_budget;
        opt.debug_chain_maps = debug_chain_maps;
        analysis_result r;
        try {
            r = analyze(b, opt);
        } catch (const validation_error& e) {
            throw validation_error(analyze_input + ": " + e.what());
        } catch (const invariant_error& e) {
            throw invariant_error(analyze_input + ": " + e.what());
        }
        std::string report = analysis_report(r).dump(2) + "\n";
        if (!json_path.empty())
            write_file(json_path, report);
        else
            std::cout << report;
        if (!lambda_path.empty()) write_file(lambda_path, lambda_table_text(r));
        if (!dot_dir.empty()) {
            fs::create_directories(dot_dir);
            std::string stem = fs::path(analyze_input).stem().string();
            write_file((fs::path(dot_dir) / (stem + "_phase.dot")).string(),
                       diagram_to_dot(r.diagram, false));
            write_file((fs::path(dot_dir) / (stem + "_reduced.dot")).string(),
                       diagram_to_dot(r.diagram, true));
        }
        return 0;
    }

    if (*word_cmd) {
        positive_word w = parse_word(word_text);
        braid_diagram b = word_to_diagram(w, n_inner);
        require_valid(b);
        std::string text = braid_to_json(b).dump(2) + "\n";
        if (!word_out.empty())
            write_file(word_out, text);
        else
            std::cout << text;
        return 0;
    }

    if (*extend_cmd) {
        braid_diagram b = load_braid(extend_input);
        braid_diagram e = extend_k(b, extend_k_count);
        std::string text = braid_to_json(e).dump(2) + "\n";
        if (!extend_out.empty())
            write_file(extend_out, text);
        else
            std::cout << text;
        return 0;
    }

    if (*compare_cmd) {
        analysis_result ra = analyze(load_braid(cmp_a));
        analysis_result rb = analyze(load_braid(cmp_b));
        bool iso = diagram_isomorphic(ra.diagram, rb.diagram);
        bool poly = ra.diagram.total() == rb.diagram.total();
        nlohmann::ordered_json j;
        j["isomorphic"] = iso;
        j["polynomial_equal"] = poly;
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (*self_cmd) {
        selfcheck_report rep;
        selfcheck_order_roundtrips(rep, 50, 0x5eed5eed1234ull);
        std::vector<std::string> files;
        if (!fs::is_directory(fixtures_dir))
            throw validation_error("fixture directory not found: " + fixtures_dir);
        for (const auto& entry : fs::directory_iterator(fixtures_dir))
            if (entry.path().extension() == ".json") files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw validation_error("no fixtures in " + fixtures_dir);
        for (const auto& f : files) {
            braid_diagram b = load_braid(f);
            selfcheck_fixture(rep, fs::path(f).stem().string(), b, 50, 0xfeedc0deull);
        }
        if (verbose)
            for (auto& [name, ok] : rep.checks)
                std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
        std::cout << (rep.ok ? "selfcheck: all checks passed" : "selfcheck: FAILURES") << " ("
                  << rep.checks.size() << " checks)\n";
        return rep.ok ? 0 : 3;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const validation_error& e) {
        std::cerr << error_json("validation", e.what()).dump(2) << "\n";
        return 2;
    } catch (const invariant_error& e) {
        std::cerr << error_json("invariant", e.what()).dump(2) << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << error_json("internal", e.what()).dump(2) << "\n";
        return 3;
    }
}
