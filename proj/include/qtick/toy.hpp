#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qtick/automaton.hpp"
#include "qtick/qla.hpp"

namespace qtick {

struct Su2Params {
    AxisVector axis;
    double angle;
};

enum class InitialState { PlusEigenstate, MinusEigenstate, Explicit };

// The self-referential two-dimensional universe: one active event, whose
// next test is built from the current test, its recorded eigenvalue, and
// two fixed SU(2) laws.
struct ToyConfig {
    AxisVector axis_a{0.0, 0.0, 1.0};
    int lambda0 = +1;
    InitialState initial_state_choice = InitialState::PlusEigenstate;
    std::optional<StateVector> explicit_state; // used when Explicit
    Su2Params u_params{AxisVector(1.0, 0.0, 0.0), 1.0};
    Su2Params v_params{AxisVector(0.0, 1.0, 0.0), 1.4142135623730951};
    unsigned steps = 10;
    std::uint64_t seed = 42;
};

struct ToyLaws {
    UnitaryOperator u;
    UnitaryOperator v;
};

ToyLaws laws_from(const ToyConfig& cfg);

struct ToyState {
    unsigned n = 0;
    HermitianOperator sigma_n;
    StateVector psi_n;
    int lambda_n;
};

// Branching record of eigenvalue sequences with path probabilities. Nodes
// are stored breadth-first; children expand -1 before +1.
struct HistoryNode {
    std::int32_t parent; // -1 for the root
    std::int8_t lambda;
    double probability;          // path probability from the root
    std::vector<cxd> psi;        // event state at this node
    std::vector<cxd> sigma;      // 2x2 test operator, row-major
    unsigned depth;
};

struct HistoryLeaf {
    std::vector<int> lambdas; // eigenvalue sequence (lambda_1 .. lambda_depth)
    double probability;
};

struct HistoryTree {
    std::vector<HistoryNode> nodes; // nodes[0] is the root (depth 0)
    unsigned depth = 0;
    std::size_t pruned_branches = 0;

    std::vector<HistoryLeaf> leaves() const;
};

// sigma_0 = sigma . a, psi_0 = the lambda0 eigenvector (phase-fixed), or the
// validated explicit state.
ToyState init_toy(const ToyConfig& cfg);

// Builds sigma_{n+1} by the lambda_n-selected conjugation (U when +1, V when
// -1) and samples the next eigenvalue with one uniform draw. lambda_n enters
// as explicit classical data, never re-derived from psi_n.
std::pair<ToyState, QTickRecord> step_toy(const ToyState& s, const ToyLaws& laws, SeededRng& rng);

struct ToyRun {
    std::vector<QTickRecord> ticks;
    ToyState final_state;
};

ToyRun run_toy(const ToyConfig& cfg);
ToyRun run_toy(const ToyConfig& cfg, SeededRng& rng);

inline constexpr unsigned kMaxTreeDepth = 20;

// Exhaustive expansion of both branches at every level, exact path
// probabilities; branches below the 1e-14 floor are pruned and counted.
HistoryTree enumerate_tree(const ToyConfig& cfg, unsigned depth);

// SO(3) rotation matrix induced by an SU(2) element: R[i][j] = tr(sigma_i W
// sigma_j W^dagger) / 2. The axis shadow of the toy dynamics.
std::array<std::array<double, 3>, 3> rotation_of(const UnitaryOperator& w);

} // namespace qtick
