#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qtick/render.hpp"

using namespace qtick;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::set<std::string> node_ids(const ProcessGraph& g) {
    std::set<std::string> ids;
    for (const Event& e : g.events) ids.insert(e.id);
    for (const Test& t : g.tests) ids.insert(t.id);
    for (const ComplexNode& c : g.complexes) ids.insert(c.id);
    return ids;
}

// Split DOT text into node statement lines and edge statement lines.
std::pair<std::vector<std::string>, std::vector<std::string>> split_statements(
    const std::string& dot) {
    std::vector<std::string> nodes, edges;
    std::istringstream in(dot);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("  ", 0) != 0) continue;
        if (line.find("->") != std::string::npos) edges.push_back(line);
        else nodes.push_back(line);
    }
    return {nodes, edges};
}

} // namespace

TEST_CASE("golden DOT files are byte-stable") {
    for (const std::string& name : builtin_figure_names()) {
        if (name == "fig5") continue;
        CAPTURE(name);
        std::string dot = to_dot(builtin_figure(name));
        std::string golden = slurp(fs::path(QTICK_FIXTURE_DIR) / "golden" / (name + ".dot"));
        REQUIRE(dot == golden);
        // Same bytes on a second render.
        REQUIRE(to_dot(builtin_figure(name)) == dot);
    }
}

TEST_CASE("fig5 refuses to render") {
    CHECK_THROWS_AS(to_dot(builtin_figure("fig5")), validation_error);
}

TEST_CASE("empty graph renders the fixed header") {
    ProcessGraph g;
    CHECK(to_dot(g) == "// qtick process diagram\ndigraph g {}\n");
}

TEST_CASE("fig1 carries the expected cast and shading") {
    ProcessGraph g = builtin_figure("fig1");
    CHECK(node_ids(g) ==
          std::set<std::string>{"X", "O1", "O2", "A", "B", "C", "Sigma1", "Sigma2"});
    std::string dot = to_dot(g);
    // Shaded: Sigma1, Sigma2, A, O2. Unshaded: X, O1, B, C.
    for (const char* shaded : {"\"A\"", "\"Sigma1\"", "\"Sigma2\"", "\"O2\""}) {
        std::size_t at = dot.find(shaded);
        REQUIRE(at != std::string::npos);
        std::size_t eol = dot.find('\n', at);
        CHECK(dot.substr(at, eol - at).find("fillcolor=gray80") != std::string::npos);
    }
    for (const char* plain : {"\"X\"", "\"O1\"", "\"B\"", "\"C\""}) {
        std::size_t at = dot.find(plain);
        REQUIRE(at != std::string::npos);
        std::size_t eol = dot.find('\n', at);
        CHECK(dot.substr(at, eol - at).find("filled") == std::string::npos);
    }
}

TEST_CASE("fig6a and fig6b differ only in edge wiring") {
    std::string a = to_dot(builtin_figure("fig6a"));
    std::string b = to_dot(builtin_figure("fig6b"));
    auto [nodes_a, edges_a] = split_statements(a);
    auto [nodes_b, edges_b] = split_statements(b);
    CHECK(nodes_a == nodes_b);
    CHECK(edges_a != edges_b);
    CHECK(edges_a.size() == edges_b.size());
}

TEST_CASE("fig2b inserts exactly the null test and its outcome") {
    auto ids_a = node_ids(builtin_figure("fig2a"));
    auto ids_b = node_ids(builtin_figure("fig2b"));
    std::set<std::string> extra;
    for (const std::string& id : ids_b)
        if (!ids_a.count(id)) extra.insert(id);
    CHECK(extra == std::set<std::string>{"sigma", "psiprime"});
    for (const std::string& id : ids_a) CHECK(ids_b.count(id) == 1);
}

TEST_CASE("every golden file passes the DOT well-formedness check") {
    int checked = 0;
    for (const auto& entry : fs::directory_iterator(fs::path(QTICK_FIXTURE_DIR) / "golden")) {
        if (entry.path().extension() != ".dot") continue;
        CAPTURE(entry.path().string());
        std::string verdict = check_dot(slurp(entry.path()));
        CAPTURE(verdict);
        REQUIRE(verdict.empty());
        ++checked;
    }
    CHECK(checked >= 9);
}

TEST_CASE("check_dot flags malformed text") {
    CHECK(!check_dot("graph g { }").empty());
    CHECK(!check_dot("digraph g { \"a\" [x=1; }").empty());
    CHECK(!check_dot("digraph g { \"a\" -> ; }").empty());
    CHECK(!check_dot("digraph g {").empty());
    CHECK(check_dot("digraph g {}").empty());
    CHECK(check_dot("// c\ndigraph g { a -> b [dir=forward]; }").empty());
}

TEST_CASE("unknown figure name") {
    CHECK_THROWS_AS(builtin_figure("fig9"), validation_error);
}

TEST_CASE("edge labels render only when present") {
    std::string dot = to_dot(builtin_figure("fig7"));
    CHECK(dot.find("label=\"N\"") != std::string::npos);
    std::string plain = to_dot(builtin_figure("fig3"));
    CHECK(plain.find("label=") == std::string::npos);
}
