#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtick/qla.hpp"
#include "qtick/rng.hpp"

namespace qtick {

enum class Stage { Past, Active, Future };
enum class EdgeKind { StateFlow, InfoFlow, ComplexFlow };

const char* to_string(Stage s);
const char* to_string(EdgeKind k);

// A factor state of the universe. Future events carry no state (unresolved);
// Past and Active events carry a concrete one.
struct Event {
    std::string id;
    std::optional<StateVector> state;
    std::vector<int> factor_dims{2};
    Stage stage = Stage::Active;

    bool resolved() const { return state.has_value(); }
    std::size_t dim() const;
};

// A test: one Hermitian operator, or a commuting family whose outcomes are
// the simultaneous eigenstates (as the EPR constrained test pairs a primary
// operator with a null sub-operator).
struct Test {
    std::string id;
    std::vector<HermitianOperator> operators;
    std::vector<std::string> info_sources;
    Stage stage = Stage::Active;
};

// An aggregate of events and tests (an emergent observer, the rest of the
// universe) treated as one node.
struct ComplexNode {
    std::string id;
    Stage stage = Stage::Active;
};

struct GraphEdge {
    std::string from;
    std::string to;
    EdgeKind kind;
    std::string label; // optional annotation, rendered when nonempty
};

struct ProcessGraph {
    std::vector<Event> events;
    std::vector<Test> tests;
    std::vector<ComplexNode> complexes;
    std::vector<GraphEdge> edges;

    Event* find_event(const std::string& id);
    const Event* find_event(const std::string& id) const;
    Test* find_test(const std::string& id);
    const Test* find_test(const std::string& id) const;
    const ComplexNode* find_complex(const std::string& id) const;
};

enum class ViolationKind {
    EntangledMultiTest,   // entangled event with two or more outgoing state edges
    FanoutExceedsFactors, // product event with more outgoing state edges than factors
    EdgeEndpoint,         // edge kind incompatible with its endpoints
    FutureOutgoingEdge,   // future event with any outgoing edge
    StagingMismatch,      // shading does not match the active-present rule
    UnresolvedState,      // stage / resolution marker inconsistency
    Cycle,                // cycle over state-flow + complex-flow edges
};

const char* to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::string node; // offending node or edge description
    std::string message;
};

using ValidationReport = std::vector<Violation>;

// One candidate outcome of a test on a state.
struct Outcome {
    double eigenvalue;
    StateVector state;
    double probability;
};

// One tick of the fundamental clock: which test fired, what came out, and
// the single uniform draw that selected it (stored for exact replay).
struct QTickRecord {
    std::string test_id;
    std::vector<std::string> input_event_ids;
    double outcome_eigenvalue;
    StateVector outcome_state;
    double outcome_probability;
    double rng_draw;
};

// Eigenvalues clustered at 1e-9; per cluster the Lueders rule gives
// probability |P psi|^2 and state P psi / |P psi|. Entries below the 1e-14
// probability floor are dropped. Ascending eigenvalue order.
std::vector<Outcome> enumerate_outcomes(const HermitianOperator& h, const StateVector& psi);

// Commuting-family refinement: outcomes are joint eigenspace projections,
// ordered by (first operator's eigenvalue, then refinement order); the
// reported eigenvalue is the first operator's.
std::vector<Outcome> enumerate_outcomes(const std::vector<HermitianOperator>& ops,
                                        const StateVector& psi);

// Samples one outcome by inverse CDF over the enumeration order using a
// single uniform draw.
QTickRecord perform_test(const Test& test, const StateVector& psi, SeededRng& rng);
QTickRecord perform_test(const Test& test, const StateVector& psi, double draw);

// Probability-one test: the outcome is the input state exactly (the
// arbitrary phase is fixed to zero).
QTickRecord null_test(const StateVector& psi, const std::string& id = "null");

// Empty report = valid. Unknown node ids referenced by edges raise a
// structural_error instead of being reported.
ValidationReport validate_graph(const ProcessGraph& g);

// Applies a record: the test's unresolved outcome events receive the
// outcome state (split into factors if the test has several outcome edges),
// inputs age to Past unless they still inform an unresolved test, and the
// test itself ages unless it informs one.
ProcessGraph advance_stage(const ProcessGraph& g, const QTickRecord& record);

// Factor a product state across (dim_a, dim_b); validation_error if the
// state is not a product across that cut (residual above 1e-9).
std::pair<StateVector, StateVector> factor_split(const StateVector& state, std::size_t dim_a,
                                                 std::size_t dim_b);

// Fill every test's info_sources from its incoming state/info edges.
void populate_info_sources(ProcessGraph& g);

} // namespace qtick
