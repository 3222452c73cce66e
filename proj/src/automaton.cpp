#include "qtick/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace qtick {

namespace {

constexpr double kClusterTol = 1e-9;
constexpr double kProbFloor = 1e-14;

} // namespace

const char* to_string(Stage s) {
    switch (s) {
        case Stage::Past: return "past";
        case Stage::Active: return "active";
        case Stage::Future: return "future";
    }
    return "?";
}

const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::StateFlow: return "state";
        case EdgeKind::InfoFlow: return "info";
        case EdgeKind::ComplexFlow: return "complex";
    }
    return "?";
}

const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::EntangledMultiTest: return "entangled-multi-test";
        case ViolationKind::FanoutExceedsFactors: return "fanout-exceeds-factors";
        case ViolationKind::EdgeEndpoint: return "edge-endpoint";
        case ViolationKind::FutureOutgoingEdge: return "future-outgoing-edge";
        case ViolationKind::StagingMismatch: return "staging-mismatch";
        case ViolationKind::UnresolvedState: return "unresolved-state";
        case ViolationKind::Cycle: return "cycle";
    }
    return "?";
}

std::size_t Event::dim() const {
    std::size_t d = 1;
    for (int f : factor_dims) d *= static_cast<std::size_t>(f);
    return d;
}

Event* ProcessGraph::find_event(const std::string& id) {
    for (Event& e : events)
        if (e.id == id) return &e;
    return nullptr;
}

const Event* ProcessGraph::find_event(const std::string& id) const {
    for (const Event& e : events)
        if (e.id == id) return &e;
    return nullptr;
}

Test* ProcessGraph::find_test(const std::string& id) {
    for (Test& t : tests)
        if (t.id == id) return &t;
    return nullptr;
}

const Test* ProcessGraph::find_test(const std::string& id) const {
    for (const Test& t : tests)
        if (t.id == id) return &t;
    return nullptr;
}

const ComplexNode* ProcessGraph::find_complex(const std::string& id) const {
    for (const ComplexNode& c : complexes)
        if (c.id == id) return &c;
    return nullptr;
}

std::vector<Outcome> enumerate_outcomes(const HermitianOperator& h, const StateVector& psi) {
    if (h.dim() != psi.dim()) throw validation_error("enumerate_outcomes: dimension mismatch");
    EigenDecomposition eig = eig_hermitian(h);
    const std::size_t n = h.dim();

    std::vector<Outcome> out;
    std::size_t k = 0;
    while (k < n) {
        // Cluster of eigenvalues within 1e-9 of each other (chained gaps).
        std::size_t end = k + 1;
        while (end < n && eig.eigenvalues[end] - eig.eigenvalues[end - 1] <= kClusterTol) ++end;

        // Lueders: project psi onto the eigenspace.
        std::vector<cxd> proj(n, cxd(0.0, 0.0));
        for (std::size_t j = k; j < end; ++j) {
            const StateVector& v = eig.eigenvectors[j];
            cxd coeff = inner(v, psi);
            for (std::size_t i = 0; i < n; ++i) proj[i] += coeff * v[i];
        }
        double p = 0.0;
        for (const cxd& a : proj) p += std::norm(a);
        if (p >= kProbFloor) {
            double inv = 1.0 / std::sqrt(p);
            for (cxd& a : proj) a *= inv;
            double lambda_mean = 0.0;
            for (std::size_t j = k; j < end; ++j) lambda_mean += eig.eigenvalues[j];
            lambda_mean /= static_cast<double>(end - k);
            out.push_back(Outcome{lambda_mean, StateVector::unnormalized(std::move(proj)), p});
        }
        k = end;
    }
    return out;
}

std::vector<Outcome> enumerate_outcomes(const std::vector<HermitianOperator>& ops,
                                        const StateVector& psi) {
    if (ops.empty()) throw validation_error("enumerate_outcomes: empty operator list");
    for (const HermitianOperator& op : ops) {
        if (op.dim() != ops.front().dim())
            throw validation_error("enumerate_outcomes: operators must share one dimension");
    }
    for (std::size_t i = 0; i + 1 < ops.size(); ++i) {
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            ComplexMatrix comm = sub(mul(ops[i].matrix(), ops[j].matrix()),
                                     mul(ops[j].matrix(), ops[i].matrix()));
            if (max_abs(comm) > 1e-10)
                throw validation_error("enumerate_outcomes: operators do not commute");
        }
    }

    std::vector<Outcome> outcomes = enumerate_outcomes(ops.front(), psi);
    for (std::size_t k = 1; k < ops.size(); ++k) {
        std::vector<Outcome> refined;
        for (const Outcome& o : outcomes) {
            for (const Outcome& sub : enumerate_outcomes(ops[k], o.state)) {
                double p = o.probability * sub.probability;
                if (p >= kProbFloor)
                    refined.push_back(Outcome{o.eigenvalue, sub.state, p});
            }
        }
        outcomes = std::move(refined);
    }
    return outcomes;
}

QTickRecord perform_test(const Test& test, const StateVector& psi, double draw) {
    std::vector<Outcome> outcomes = enumerate_outcomes(test.operators, psi);
    if (outcomes.empty()) throw numeric_error("perform_test: no outcome above probability floor");
    std::size_t chosen = outcomes.size() - 1;
    double cum = 0.0;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        cum += outcomes[k].probability;
        if (draw < cum) {
            chosen = k;
            break;
        }
    }
    const Outcome& o = outcomes[chosen];
    return QTickRecord{test.id, test.info_sources, o.eigenvalue, o.state, o.probability, draw};
}

QTickRecord perform_test(const Test& test, const StateVector& psi, SeededRng& rng) {
    return perform_test(test, psi, rng.next_double());
}

QTickRecord null_test(const StateVector& psi, const std::string& id) {
    // The outcome is psi itself: the free phase carries no information and is
    // fixed to zero. Eigenvalue 1 under the state's own ray projector.
    return QTickRecord{id, {}, 1.0, psi, 1.0, 0.0};
}

namespace {

enum class NodeKind { Event, Test, Complex };

struct NodeRef {
    NodeKind kind;
    std::size_t index;
};

// True when the state is a product across every sequential cut of the
// declared factor dimensions.
bool is_product_across(const StateVector& state, const std::vector<int>& factor_dims) {
    if (factor_dims.size() <= 1) return true;
    std::size_t left = 1;
    std::size_t total = state.dim();
    for (std::size_t k = 0; k + 1 < factor_dims.size(); ++k) {
        left *= static_cast<std::size_t>(factor_dims[k]);
        if (schmidt_rank(state, left, total / left) > 1) return false;
    }
    return true;
}

struct GraphIndex {
    std::map<std::string, NodeRef> nodes;
    // Outgoing edge indices per node id.
    std::map<std::string, std::vector<std::size_t>> out;

    explicit GraphIndex(const ProcessGraph& g) {
        for (std::size_t i = 0; i < g.events.size(); ++i)
            insert(g.events[i].id, {NodeKind::Event, i});
        for (std::size_t i = 0; i < g.tests.size(); ++i)
            insert(g.tests[i].id, {NodeKind::Test, i});
        for (std::size_t i = 0; i < g.complexes.size(); ++i)
            insert(g.complexes[i].id, {NodeKind::Complex, i});
        for (std::size_t i = 0; i < g.edges.size(); ++i) {
            const GraphEdge& e = g.edges[i];
            if (!nodes.count(e.from))
                throw structural_error("edge references unknown node id '" + e.from + "'");
            if (!nodes.count(e.to))
                throw structural_error("edge references unknown node id '" + e.to + "'");
            out[e.from].push_back(i);
        }
    }

    void insert(const std::string& id, NodeRef ref) {
        if (!nodes.emplace(id, ref).second)
            throw structural_error("duplicate node id '" + id + "'");
    }
};

// A test is unresolved while any of its outgoing state edges targets an
// unresolved event (or it has no outcome edge at all but that case counts
// as resolved: there is nothing pending).
bool test_unresolved(const ProcessGraph& g, const GraphIndex& ix, const Test& t) {
    auto it = ix.out.find(t.id);
    if (it == ix.out.end()) return false;
    for (std::size_t ei : it->second) {
        const GraphEdge& e = g.edges[ei];
        if (e.kind != EdgeKind::StateFlow) continue;
        const Event* ev = g.find_event(e.to);
        if (ev && !ev->resolved()) return true;
    }
    return false;
}

bool informs_unresolved_test(const ProcessGraph& g, const GraphIndex& ix,
                             const std::string& id) {
    auto it = ix.out.find(id);
    if (it == ix.out.end()) return false;
    for (std::size_t ei : it->second) {
        const GraphEdge& e = g.edges[ei];
        if (e.kind == EdgeKind::ComplexFlow) continue;
        const Test* t = g.find_test(e.to);
        if (t && test_unresolved(g, ix, *t)) return true;
    }
    return false;
}

bool has_edge_into_any_test(const ProcessGraph& g, const GraphIndex& ix, const std::string& id) {
    auto it = ix.out.find(id);
    if (it == ix.out.end()) return false;
    for (std::size_t ei : it->second) {
        const GraphEdge& e = g.edges[ei];
        if (e.kind != EdgeKind::ComplexFlow && g.find_test(e.to)) return true;
    }
    return false;
}

} // namespace

ValidationReport validate_graph(const ProcessGraph& g) {
    GraphIndex ix(g); // throws structural_error on unknown/duplicate ids
    ValidationReport report;

    auto kind_of = [&](const std::string& id) { return ix.nodes.at(id).kind; };

    // (c) edge-kind endpoint rules.
    for (const GraphEdge& e : g.edges) {
        NodeKind from = kind_of(e.from), to = kind_of(e.to);
        switch (e.kind) {
            case EdgeKind::StateFlow:
                if (!((from == NodeKind::Event && to == NodeKind::Test) ||
                      (from == NodeKind::Test && to == NodeKind::Event))) {
                    report.push_back({ViolationKind::EdgeEndpoint, e.from + "->" + e.to,
                                      "state-flow edges connect event->test or test->event only"});
                }
                break;
            case EdgeKind::InfoFlow:
                // Information flows into tests, from anything that carries
                // resolved classical content (events, prior tests, complexes).
                if (to != NodeKind::Test) {
                    report.push_back({ViolationKind::EdgeEndpoint, e.from + "--" + e.to,
                                      "info-flow edges terminate at tests"});
                }
                break;
            case EdgeKind::ComplexFlow:
                if (from != NodeKind::Complex && to != NodeKind::Complex) {
                    report.push_back({ViolationKind::EdgeEndpoint, e.from + "=>" + e.to,
                                      "complex-flow edges must touch a complex"});
                }
                break;
        }
    }

    // Stage / resolution marker consistency.
    for (const Event& ev : g.events) {
        if (ev.stage == Stage::Future && ev.resolved()) {
            report.push_back({ViolationKind::UnresolvedState, ev.id,
                              "future event carries a concrete state"});
        }
        if (ev.stage != Stage::Future && !ev.resolved()) {
            report.push_back({ViolationKind::UnresolvedState, ev.id,
                              "non-future event lacks a state"});
        }
        if (ev.resolved() && ev.state->dim() != ev.dim()) {
            report.push_back({ViolationKind::UnresolvedState, ev.id,
                              "state dimension does not match declared factors"});
        }
    }
    for (const Test& t : g.tests) {
        if (t.stage == Stage::Future) {
            report.push_back({ViolationKind::UnresolvedState, t.id, "tests are past or active"});
        }
        if (t.operators.empty()) {
            report.push_back({ViolationKind::UnresolvedState, t.id, "test has no operators"});
        }
        for (const HermitianOperator& op : t.operators) {
            if (op.dim() != t.operators.front().dim()) {
                report.push_back({ViolationKind::UnresolvedState, t.id,
                                  "test operators do not share one dimension"});
                break;
            }
        }
    }

    // (d) future events must have no outgoing edges.
    for (const Event& ev : g.events) {
        if (ev.stage != Stage::Future) continue;
        auto it = ix.out.find(ev.id);
        if (it != ix.out.end() && !it->second.empty()) {
            report.push_back({ViolationKind::FutureOutgoingEdge, ev.id,
                              "future event has outgoing edges"});
        }
    }

    // (a) entanglement-principle veto and (b) fan-out bound.
    for (const Event& ev : g.events) {
        if (!ev.resolved()) continue;
        std::size_t state_out = 0;
        auto it = ix.out.find(ev.id);
        if (it != ix.out.end()) {
            for (std::size_t ei : it->second)
                if (g.edges[ei].kind == EdgeKind::StateFlow) ++state_out;
        }
        if (state_out < 2) continue;
        if (!is_product_across(*ev.state, ev.factor_dims)) {
            report.push_back({ViolationKind::EntangledMultiTest, ev.id,
                              "entangled event feeds more than one test"});
        } else if (state_out > ev.factor_dims.size()) {
            report.push_back({ViolationKind::FanoutExceedsFactors, ev.id,
                              "product event has more outgoing state edges than factors"});
        }
    }

    // (e) staging against the active-present rule.
    for (const Test& t : g.tests) {
        bool expect_active = test_unresolved(g, ix, t) || informs_unresolved_test(g, ix, t.id);
        if (expect_active && t.stage != Stage::Active) {
            report.push_back({ViolationKind::StagingMismatch, t.id,
                              "test with unresolved duties must be active"});
        }
        if (!expect_active && t.stage == Stage::Active) {
            report.push_back({ViolationKind::StagingMismatch, t.id,
                              "test with no unresolved duties must be past"});
        }
    }
    for (const Event& ev : g.events) {
        if (ev.stage == Stage::Future) continue;
        bool informs = informs_unresolved_test(g, ix, ev.id);
        bool consumed = has_edge_into_any_test(g, ix, ev.id);
        // Active present: informs an unresolved test, or is a frontier
        // outcome not yet consumed by any test.
        bool expect_active = informs || !consumed;
        if (expect_active && ev.stage != Stage::Active) {
            report.push_back({ViolationKind::StagingMismatch, ev.id,
                              "event in the active present must be shaded"});
        }
        if (!expect_active && ev.stage == Stage::Active) {
            report.push_back({ViolationKind::StagingMismatch, ev.id,
                              "event outside the active present must be unshaded"});
        }
    }
    for (const ComplexNode& c : g.complexes) {
        // Complexes are emergent aggregates; only a past complex still
        // informing an unresolved test is flagged.
        if (c.stage == Stage::Past && informs_unresolved_test(g, ix, c.id)) {
            report.push_back({ViolationKind::StagingMismatch, c.id,
                              "past complex informs an unresolved test"});
        }
        if (c.stage == Stage::Future) {
            report.push_back({ViolationKind::StagingMismatch, c.id,
                              "complexes are past or active"});
        }
    }

    // Acyclicity over state-flow + complex-flow edges.
    {
        std::map<std::string, int> color; // 0 unvisited, 1 on stack, 2 done
        bool cycle = false;
        auto visit = [&](auto&& self, const std::string& id) -> void {
            color[id] = 1;
            auto it = ix.out.find(id);
            if (it != ix.out.end()) {
                for (std::size_t ei : it->second) {
                    if (cycle) return;
                    const GraphEdge& e = g.edges[ei];
                    if (e.kind == EdgeKind::InfoFlow) continue;
                    int c = color[e.to];
                    if (c == 1) {
                        cycle = true;
                        return;
                    }
                    if (c == 0) self(self, e.to);
                }
            }
            color[id] = 2;
        };
        for (const auto& [id, ref] : ix.nodes) {
            (void)ref;
            if (!cycle && color[id] == 0) visit(visit, id);
        }
        if (cycle) {
            report.push_back({ViolationKind::Cycle, "",
                              "cycle over state-flow/complex-flow edges"});
        }
    }

    return report;
}

std::pair<StateVector, StateVector> factor_split(const StateVector& state, std::size_t dim_a,
                                                 std::size_t dim_b) {
    if (dim_a * dim_b != state.dim()) throw validation_error("factor_split: dimension mismatch");
    // Amplitude matrix M[i][j] = a[i*dim_b + j] = u_i v_j for a product state.
    // Take the column of largest norm as u (up to scale), then v = u^dag M.
    std::size_t best_j = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < dim_b; ++j) {
        double n = 0.0;
        for (std::size_t i = 0; i < dim_a; ++i) n += std::norm(state[i * dim_b + j]);
        if (n > best) {
            best = n;
            best_j = j;
        }
    }
    std::vector<cxd> u(dim_a);
    for (std::size_t i = 0; i < dim_a; ++i) u[i] = state[i * dim_b + best_j];
    double un = 0.0;
    for (const cxd& a : u) un += std::norm(a);
    un = std::sqrt(un);
    if (!(un > 0.0)) throw validation_error("factor_split: zero state");
    for (cxd& a : u) a /= un;
    u = phase_fixed(std::move(u));

    std::vector<cxd> v(dim_b, cxd(0.0, 0.0));
    for (std::size_t j = 0; j < dim_b; ++j)
        for (std::size_t i = 0; i < dim_a; ++i) v[j] += std::conj(u[i]) * state[i * dim_b + j];

    // Residual check: || state - u (x) v ||.
    double resid = 0.0;
    for (std::size_t i = 0; i < dim_a; ++i)
        for (std::size_t j = 0; j < dim_b; ++j)
            resid += std::norm(state[i * dim_b + j] - u[i] * v[j]);
    if (std::sqrt(resid) > 1e-9)
        throw validation_error("factor_split: state is not a product across this cut");

    return {StateVector::unnormalized(std::move(u)).normalized(),
            StateVector::unnormalized(std::move(v)).normalized()};
}

void populate_info_sources(ProcessGraph& g) {
    for (Test& t : g.tests) {
        t.info_sources.clear();
        for (const GraphEdge& e : g.edges) {
            if (e.to == t.id && e.kind != EdgeKind::ComplexFlow)
                t.info_sources.push_back(e.from);
        }
    }
}

ProcessGraph advance_stage(const ProcessGraph& g, const QTickRecord& record) {
    ProcessGraph out = g;
    GraphIndex ix(out);

    Test* test = out.find_test(record.test_id);
    if (!test) throw structural_error("advance_stage: unknown test '" + record.test_id + "'");
    if (test->stage != Stage::Active)
        throw state_error("advance_stage: test '" + record.test_id + "' is not active");

    // Outcome events, in edge declaration order.
    std::vector<Event*> targets;
    auto it = ix.out.find(test->id);
    if (it != ix.out.end()) {
        for (std::size_t ei : it->second) {
            const GraphEdge& e = out.edges[ei];
            if (e.kind != EdgeKind::StateFlow) continue;
            Event* ev = out.find_event(e.to);
            if (ev) targets.push_back(ev);
        }
    }
    if (targets.empty())
        throw state_error("advance_stage: test '" + record.test_id + "' has no outcome events");
    for (Event* ev : targets) {
        if (ev->resolved())
            throw state_error("advance_stage: outcome '" + ev->id + "' is already resolved");
    }

    std::size_t total = 1;
    for (Event* ev : targets) total *= ev->dim();
    if (total != record.outcome_state.dim())
        throw validation_error("advance_stage: outcome dimension does not match target events");

    if (targets.size() == 1) {
        targets[0]->state = record.outcome_state;
        targets[0]->stage = Stage::Active;
    } else {
        // Distribute the product outcome over the factor events left to right.
        StateVector rest = record.outcome_state;
        for (std::size_t k = 0; k + 1 < targets.size(); ++k) {
            std::size_t right_dim = rest.dim() / targets[k]->dim();
            auto [head, tail] = factor_split(rest, targets[k]->dim(), right_dim);
            targets[k]->state = head;
            targets[k]->stage = Stage::Active;
            rest = tail;
        }
        targets.back()->state = rest;
        targets.back()->stage = Stage::Active;
    }

    // Re-index with the resolution applied, then age the inputs (events and
    // informing tests) and the test itself.
    GraphIndex ix2(out);
    for (const GraphEdge& e : out.edges) {
        if (e.to != test->id) continue;
        if (e.kind == EdgeKind::ComplexFlow) continue;
        if (Event* src = out.find_event(e.from)) {
            src->stage = informs_unresolved_test(out, ix2, src->id) ? Stage::Active : Stage::Past;
        } else if (Test* src_test = out.find_test(e.from)) {
            bool active = test_unresolved(out, ix2, *src_test) ||
                          informs_unresolved_test(out, ix2, src_test->id);
            src_test->stage = active ? Stage::Active : Stage::Past;
        }
    }
    bool self_active = test_unresolved(out, ix2, *test) ||
                       informs_unresolved_test(out, ix2, test->id);
    test->stage = self_active ? Stage::Active : Stage::Past;

    return out;
}

} // namespace qtick
