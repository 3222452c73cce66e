#pragma once

#include <optional>

#include "qtick/qla.hpp"

namespace qtick {

// A decay/transition check: initial state psi, final test Lambda with a
// target eigenvalue, and the evolution either as one total operator or as N
// repetitions of an elementary step.
struct DecayProblem {
    StateVector psi;
    HermitianOperator lambda_op;
    double target_eigenvalue;
    std::optional<UnitaryOperator> u_total;
    std::optional<UnitaryOperator> u_step;
    unsigned n_steps = 0;

    static DecayProblem with_total(StateVector psi, HermitianOperator lambda_op,
                                   double target_eigenvalue, UnitaryOperator u_total);
    static DecayProblem with_steps(StateVector psi, HermitianOperator lambda_op,
                                   double target_eigenvalue, UnitaryOperator u_step,
                                   unsigned n_steps);

    UnitaryOperator total() const;
};

// P = |P_lambda U psi|^2 with P_lambda the projector onto the target
// eigenspace of Lambda.
double schrodinger_prob(const DecayProblem& p);

// Conjugates Lambda by the total evolution, extracts the target eigenspace
// of the conjugated operator numerically, and projects the frozen state.
double heisenberg_prob(const DecayProblem& p);

// Builds Lambda_N by N successive single-step conjugations (no shortcuts),
// then proceeds as heisenberg_prob. Requires the step form.
double qtick_prob(const DecayProblem& p);

struct PictureReport {
    double schrodinger;
    double heisenberg;
    std::optional<double> qtick;
    double max_delta;
    bool breach; // any pairwise delta above tolerance
};

PictureReport compare_pictures(const DecayProblem& p);

} // namespace qtick
