#include "qtick/render.hpp"

#include <algorithm>
#include <cctype>

#include "qtick/epr.hpp"

namespace qtick {

namespace {

std::string quote(const std::string& id) {
    std::string out = "\"";
    for (char c : id) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

struct NodeLine {
    std::string id;
    std::string attrs;
};

void append_fill(std::string& attrs, Stage stage) {
    if (stage == Stage::Active) attrs += ",style=filled,fillcolor=gray80";
}

} // namespace

std::string to_dot(const ProcessGraph& g) {
    ValidationReport report = validate_graph(g);
    if (!report.empty()) {
        std::string msg = "graph failed validation:";
        for (const Violation& v : report) {
            msg += "\n  [" + std::string(to_string(v.kind)) + "] " + v.node + ": " + v.message;
        }
        throw validation_error(msg);
    }

    std::string out = "// qtick process diagram\n";
    bool empty = g.events.empty() && g.tests.empty() && g.complexes.empty() && g.edges.empty();
    if (empty) {
        out += "digraph g {}\n";
        return out;
    }

    std::vector<NodeLine> nodes;
    for (const Event& e : g.events) {
        std::string attrs = "shape=circle,width=0.9";
        append_fill(attrs, e.stage);
        nodes.push_back({e.id, attrs});
    }
    for (const Test& t : g.tests) {
        std::string attrs = "shape=circle,width=0.45";
        append_fill(attrs, t.stage);
        nodes.push_back({t.id, attrs});
    }
    for (const ComplexNode& c : g.complexes) {
        std::string attrs = "shape=doublecircle";
        append_fill(attrs, c.stage);
        nodes.push_back({c.id, attrs});
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const NodeLine& a, const NodeLine& b) { return a.id < b.id; });

    out += "digraph g {\n";
    for (const NodeLine& n : nodes) out += "  " + quote(n.id) + " [" + n.attrs + "];\n";
    for (const GraphEdge& e : g.edges) {
        std::string attrs;
        switch (e.kind) {
            case EdgeKind::StateFlow: attrs = "dir=forward"; break;
            case EdgeKind::InfoFlow: attrs = "dir=none"; break;
            case EdgeKind::ComplexFlow: attrs = "dir=forward,color=\"black:black\""; break;
        }
        if (!e.label.empty()) attrs += ",label=" + quote(e.label);
        out += "  " + quote(e.from) + " -> " + quote(e.to) + " [" + attrs + "];\n";
    }
    out += "}\n";
    return out;
}

// ---------------------------------------------------------------------------
// Built-in figures
// ---------------------------------------------------------------------------

namespace {

HermitianOperator identity2() {
    return HermitianOperator(ComplexMatrix::identity(2));
}

StateVector up() { return StateVector({1.0, 0.0}); }
StateVector down() { return StateVector({0.0, 1.0}); }

Event resolved_event(std::string id, StateVector state, std::vector<int> dims, Stage stage) {
    Event e;
    e.id = std::move(id);
    e.state = std::move(state);
    e.factor_dims = std::move(dims);
    e.stage = stage;
    return e;
}

Event future_event(std::string id, std::vector<int> dims) {
    Event e;
    e.id = std::move(id);
    e.factor_dims = std::move(dims);
    e.stage = Stage::Future;
    return e;
}

Test make_test(std::string id, std::vector<HermitianOperator> ops, Stage stage) {
    Test t;
    t.id = std::move(id);
    t.operators = std::move(ops);
    t.stage = stage;
    return t;
}

GraphEdge state_edge(std::string from, std::string to) {
    return GraphEdge{std::move(from), std::move(to), EdgeKind::StateFlow, ""};
}

GraphEdge info_edge(std::string from, std::string to) {
    return GraphEdge{std::move(from), std::move(to), EdgeKind::InfoFlow, ""};
}

GraphEdge complex_edge(std::string from, std::string to, std::string label = "") {
    return GraphEdge{std::move(from), std::move(to), EdgeKind::ComplexFlow, std::move(label)};
}

// A typical process: O1 informs Sigma1 testing X with resolved outcome A;
// O2 and Sigma1 inform Sigma2 testing A, outcome pending as the product
// events B and C.
ProcessGraph fig1() {
    ProcessGraph g;
    AxisVector z(0.0, 0.0, 1.0);
    g.events.push_back(resolved_event("X", tensor(up(), up()), {2, 2}, Stage::Past));
    g.events.push_back(resolved_event("A", tensor(up(), down()), {2, 2}, Stage::Active));
    g.events.push_back(future_event("B", {2}));
    g.events.push_back(future_event("C", {2}));
    g.tests.push_back(make_test("Sigma1", {sigma_total(z)}, Stage::Active));
    g.tests.push_back(make_test("Sigma2", {sigma_total(z)}, Stage::Active));
    g.complexes.push_back(ComplexNode{"O1", Stage::Past});
    g.complexes.push_back(ComplexNode{"O2", Stage::Active});
    g.edges.push_back(info_edge("O1", "Sigma1"));
    g.edges.push_back(state_edge("X", "Sigma1"));
    g.edges.push_back(state_edge("Sigma1", "A"));
    g.edges.push_back(info_edge("Sigma1", "Sigma2"));
    g.edges.push_back(info_edge("O2", "Sigma2"));
    g.edges.push_back(state_edge("A", "Sigma2"));
    g.edges.push_back(state_edge("Sigma2", "B"));
    g.edges.push_back(state_edge("Sigma2", "C"));
    return g;
}

// An observer prepares psi, runs on, and only later tests it.
ProcessGraph fig2a() {
    ProcessGraph g;
    g.events.push_back(resolved_event("psi", up(), {2}, Stage::Active));
    g.events.push_back(future_event("phi", {2}));
    g.tests.push_back(make_test("sigma0", {pauli_z()}, Stage::Past));
    g.tests.push_back(make_test("Lambda", {pauli_z()}, Stage::Active));
    g.complexes.push_back(ComplexNode{"Sigma0", Stage::Past});
    g.complexes.push_back(ComplexNode{"O0", Stage::Past});
    g.complexes.push_back(ComplexNode{"O1", Stage::Past});
    g.complexes.push_back(ComplexNode{"O2", Stage::Active});
    g.edges.push_back(complex_edge("Sigma0", "O0"));
    g.edges.push_back(info_edge("O0", "sigma0"));
    g.edges.push_back(state_edge("sigma0", "psi"));
    g.edges.push_back(complex_edge("O0", "O1"));
    g.edges.push_back(complex_edge("O1", "O2"));
    g.edges.push_back(info_edge("O2", "Lambda"));
    g.edges.push_back(state_edge("psi", "Lambda"));
    g.edges.push_back(state_edge("Lambda", "phi"));
    return g;
}

// Same process with the null test spelled out: psi passes through sigma and
// comes out as psiprime in the same ray.
ProcessGraph fig2b() {
    ProcessGraph g;
    g.events.push_back(resolved_event("psi", up(), {2}, Stage::Past));
    g.events.push_back(resolved_event("psiprime", up(), {2}, Stage::Active));
    g.events.push_back(future_event("phi", {2}));
    g.tests.push_back(make_test("sigma0", {pauli_z()}, Stage::Past));
    g.tests.push_back(make_test("sigma", {pauli_z()}, Stage::Past));
    g.tests.push_back(make_test("Lambda", {pauli_z()}, Stage::Active));
    g.complexes.push_back(ComplexNode{"Sigma0", Stage::Past});
    g.complexes.push_back(ComplexNode{"O0", Stage::Past});
    g.complexes.push_back(ComplexNode{"O1", Stage::Past});
    g.complexes.push_back(ComplexNode{"O2", Stage::Active});
    g.edges.push_back(complex_edge("Sigma0", "O0"));
    g.edges.push_back(info_edge("O0", "sigma0"));
    g.edges.push_back(state_edge("sigma0", "psi"));
    g.edges.push_back(complex_edge("O0", "O1"));
    g.edges.push_back(info_edge("O1", "sigma"));
    g.edges.push_back(state_edge("psi", "sigma"));
    g.edges.push_back(state_edge("sigma", "psiprime"));
    g.edges.push_back(complex_edge("O1", "O2"));
    g.edges.push_back(info_edge("O2", "Lambda"));
    g.edges.push_back(state_edge("psiprime", "Lambda"));
    g.edges.push_back(state_edge("Lambda", "phi"));
    return g;
}

// The toy universe in flight: each test is built from the previous test and
// its recorded eigenvalue.
ProcessGraph fig3() {
    ProcessGraph g;
    g.events.push_back(resolved_event("E0", up(), {2}, Stage::Past));
    g.events.push_back(resolved_event("E1", up(), {2}, Stage::Active));
    g.events.push_back(future_event("E2", {2}));
    g.tests.push_back(make_test("Sigma1", {pauli_z()}, Stage::Active));
    g.tests.push_back(make_test("Sigma2", {pauli_x()}, Stage::Active));
    g.edges.push_back(state_edge("E0", "Sigma1"));
    g.edges.push_back(state_edge("Sigma1", "E1"));
    g.edges.push_back(info_edge("Sigma1", "Sigma2"));
    g.edges.push_back(state_edge("E1", "Sigma2"));
    g.edges.push_back(state_edge("Sigma2", "E2"));
    return g;
}

// A single local test on the pion pair state, observer informed.
ProcessGraph fig4() {
    ProcessGraph g;
    AxisVector z(0.0, 0.0, 1.0);
    g.events.push_back(resolved_event("pi", make_singlet(), {2, 2}, Stage::Active));
    g.events.push_back(future_event("phi", {4}));
    g.tests.push_back(make_test("SigmaA", {sigma_total(z)}, Stage::Active));
    g.complexes.push_back(ComplexNode{"O", Stage::Active});
    g.edges.push_back(state_edge("pi", "SigmaA"));
    g.edges.push_back(info_edge("O", "SigmaA"));
    g.edges.push_back(state_edge("SigmaA", "phi"));
    return g;
}

// The forbidden classical-EPR picture: the entangled pair feeding two tests.
ProcessGraph fig5() {
    ProcessGraph g;
    g.events.push_back(resolved_event("pi", make_singlet(), {2, 2}, Stage::Active));
    g.events.push_back(future_event("f1", {4}));
    g.events.push_back(future_event("f2", {4}));
    g.tests.push_back(make_test("Sigma1", {tensor(pauli_z(), identity2())}, Stage::Active));
    g.tests.push_back(make_test("Sigma2", {tensor(identity2(), pauli_z())}, Stage::Active));
    g.complexes.push_back(ComplexNode{"O1", Stage::Active});
    g.complexes.push_back(ComplexNode{"O2", Stage::Active});
    g.edges.push_back(info_edge("O1", "Sigma1"));
    g.edges.push_back(info_edge("O2", "Sigma2"));
    g.edges.push_back(state_edge("pi", "Sigma1"));
    g.edges.push_back(state_edge("pi", "Sigma2"));
    g.edges.push_back(state_edge("Sigma1", "f1"));
    g.edges.push_back(state_edge("Sigma2", "f2"));
    return g;
}

// The two-tick EPR topologies, shown completed so that they share one node
// set and differ only in how Sigma1/Sigma2 are wired. "mid" is the
// intermediate factor handed from the first test to the second.
ProcessGraph fig6(bool electron_first) {
    ProcessGraph g;
    AxisVector z(0.0, 0.0, 1.0);
    g.events.push_back(resolved_event("pi", make_singlet(), {2, 2}, Stage::Past));
    g.events.push_back(resolved_event("e", electron_first ? up() : down(), {2}, Stage::Active));
    g.events.push_back(resolved_event("mid", down(), {2}, Stage::Past));
    g.events.push_back(resolved_event("p", electron_first ? down() : up(), {2}, Stage::Active));
    Test first = make_test(electron_first ? "Sigma1" : "Sigma2",
                           {electron_first ? tensor(pauli_z(), identity2())
                                           : tensor(identity2(), pauli_z()),
                            sigma_total(z)},
                           Stage::Past);
    Test second = make_test(electron_first ? "Sigma2" : "Sigma1", {pauli_z()}, Stage::Past);
    if (electron_first) {
        g.tests.push_back(first);
        g.tests.push_back(second);
    } else {
        g.tests.push_back(second);
        g.tests.push_back(first);
    }
    g.complexes.push_back(ComplexNode{"O1", Stage::Past});
    g.complexes.push_back(ComplexNode{"O2", Stage::Past});
    if (electron_first) {
        g.edges.push_back(state_edge("pi", "Sigma1"));
        g.edges.push_back(info_edge("O1", "Sigma1"));
        g.edges.push_back(state_edge("Sigma1", "e"));
        g.edges.push_back(state_edge("Sigma1", "mid"));
        g.edges.push_back(state_edge("mid", "Sigma2"));
        g.edges.push_back(info_edge("O2", "Sigma2"));
        g.edges.push_back(state_edge("Sigma2", "p"));
    } else {
        g.edges.push_back(state_edge("pi", "Sigma2"));
        g.edges.push_back(info_edge("O2", "Sigma2"));
        g.edges.push_back(state_edge("Sigma2", "p"));
        g.edges.push_back(state_edge("Sigma2", "mid"));
        g.edges.push_back(state_edge("mid", "Sigma1"));
        g.edges.push_back(info_edge("O1", "Sigma1"));
        g.edges.push_back(state_edge("Sigma1", "e"));
    }
    return g;
}

// Decay seen on both levels: the observer complex crosses N ticks while the
// decay itself takes exactly one.
ProcessGraph fig7() {
    ProcessGraph g;
    g.events.push_back(resolved_event("psi", up(), {2}, Stage::Active));
    g.events.push_back(future_event("phi", {2}));
    g.tests.push_back(make_test("sigma_i", {pauli_z()}, Stage::Past));
    g.tests.push_back(make_test("Lambda", {pauli_z()}, Stage::Active));
    g.complexes.push_back(ComplexNode{"O0", Stage::Past});
    g.complexes.push_back(ComplexNode{"ON", Stage::Active});
    g.edges.push_back(info_edge("O0", "sigma_i"));
    g.edges.push_back(state_edge("sigma_i", "psi"));
    g.edges.push_back(complex_edge("O0", "ON", "N"));
    g.edges.push_back(info_edge("ON", "Lambda"));
    g.edges.push_back(state_edge("psi", "Lambda"));
    g.edges.push_back(state_edge("Lambda", "phi"));
    return g;
}

} // namespace

const std::vector<std::string>& builtin_figure_names() {
    static const std::vector<std::string> names{"fig1",  "fig2a", "fig2b", "fig3", "fig4",
                                                "fig5",  "fig6a", "fig6b", "fig7"};
    return names;
}

ProcessGraph builtin_figure(const std::string& name) {
    ProcessGraph g = [&] {
        if (name == "fig1") return fig1();
        if (name == "fig2a") return fig2a();
        if (name == "fig2b") return fig2b();
        if (name == "fig3") return fig3();
        if (name == "fig4") return fig4();
        if (name == "fig5") return fig5();
        if (name == "fig6a") return fig6(true);
        if (name == "fig6b") return fig6(false);
        if (name == "fig7") return fig7();
        throw validation_error("unknown figure '" + name + "'");
    }();
    populate_info_sources(g);
    return g;
}

// ---------------------------------------------------------------------------
// Minimal DOT well-formedness check
// ---------------------------------------------------------------------------

namespace {

struct DotScanner {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        for (;;) {
            while (pos < text.size() &&
                   std::isspace(static_cast<unsigned char>(text[pos])))
                ++pos;
            if (pos + 1 < text.size() && text[pos] == '/' && text[pos + 1] == '/') {
                while (pos < text.size() && text[pos] != '\n') ++pos;
                continue;
            }
            return;
        }
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    bool peek(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    // quoted string or bareword
    bool id() {
        skip_ws();
        if (pos >= text.size()) return false;
        if (text[pos] == '"') {
            ++pos;
            while (pos < text.size() && text[pos] != '"') {
                if (text[pos] == '\\') ++pos;
                ++pos;
            }
            if (pos >= text.size()) return false;
            ++pos;
            return true;
        }
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                text[pos] == '.' || text[pos] == '-'))
            ++pos;
        return pos > start;
    }

    bool attr_block() {
        if (!eat('[')) return true; // optional
        if (eat(']')) return true;
        for (;;) {
            if (!id()) return false;
            if (!eat('=')) return false;
            if (!id()) return false;
            if (eat(',')) continue;
            return eat(']');
        }
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }
};

} // namespace

std::string check_dot(const std::string& text) {
    DotScanner s{text};
    s.skip_ws();
    const std::string kw = "digraph";
    if (text.compare(s.pos, kw.size(), kw) != 0) return "missing 'digraph' header";
    s.pos += kw.size();
    if (!s.id()) return "missing graph name";
    if (!s.eat('{')) return "missing '{'";
    while (!s.peek('}')) {
        if (s.at_end()) return "unbalanced braces";
        if (!s.id()) return "malformed statement id";
        s.skip_ws();
        if (s.pos + 1 < s.text.size() && s.text[s.pos] == '-' && s.text[s.pos + 1] == '>') {
            s.pos += 2;
            if (!s.id()) return "malformed edge target";
        }
        if (!s.attr_block()) return "malformed attribute block";
        if (!s.eat(';')) return "missing ';'";
    }
    s.eat('}');
    if (!s.at_end()) return "trailing content after '}'";
    return "";
}

} // namespace qtick
