#include "qtick/pictures.hpp"

#include <algorithm>
#include <cmath>

namespace qtick {

namespace {

constexpr double kSpectrumTol = 1e-9;

void check_target(const HermitianOperator& lambda_op, double target) {
    EigenDecomposition eig = eig_hermitian(lambda_op);
    for (double v : eig.eigenvalues)
        if (std::abs(v - target) <= kSpectrumTol) return;
    throw validation_error("decay: target eigenvalue is not in the spectrum");
}

// |P_lambda psi|^2 for the target eigenspace of op.
double projected_weight(const HermitianOperator& op, double target, const StateVector& psi) {
    EigenDecomposition eig = eig_hermitian(op);
    double p = 0.0;
    bool found = false;
    for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
        if (std::abs(eig.eigenvalues[k] - target) > kSpectrumTol) continue;
        found = true;
        p += std::norm(inner(eig.eigenvectors[k], psi));
    }
    if (!found) throw numeric_error("decay: target eigenvalue missing from conjugated spectrum");
    return std::clamp(p, 0.0, 1.0);
}

} // namespace

DecayProblem DecayProblem::with_total(StateVector psi, HermitianOperator lambda_op,
                                      double target_eigenvalue, UnitaryOperator u_total) {
    if (psi.dim() != lambda_op.dim() || psi.dim() != u_total.dim())
        throw validation_error("decay: dimension mismatch");
    check_target(lambda_op, target_eigenvalue);
    return DecayProblem{std::move(psi), std::move(lambda_op), target_eigenvalue,
                        std::move(u_total), std::nullopt, 0};
}

DecayProblem DecayProblem::with_steps(StateVector psi, HermitianOperator lambda_op,
                                      double target_eigenvalue, UnitaryOperator u_step,
                                      unsigned n_steps) {
    if (psi.dim() != lambda_op.dim() || psi.dim() != u_step.dim())
        throw validation_error("decay: dimension mismatch");
    if (n_steps == 0) throw validation_error("decay: step count must be positive");
    check_target(lambda_op, target_eigenvalue);
    return DecayProblem{std::move(psi), std::move(lambda_op), target_eigenvalue, std::nullopt,
                        std::move(u_step), n_steps};
}

UnitaryOperator DecayProblem::total() const {
    if (u_total) return *u_total;
    if (!u_step) throw validation_error("decay: no evolution operator");
    return pow(*u_step, n_steps);
}

double schrodinger_prob(const DecayProblem& p) {
    StateVector evolved = apply(p.total(), p.psi);
    return projected_weight(p.lambda_op, p.target_eigenvalue, evolved);
}

double heisenberg_prob(const DecayProblem& p) {
    UnitaryOperator u = p.total();
    // Lambda(t_f) = U^dag Lambda U; the state stays frozen.
    ComplexMatrix m = mul(mul(adjoint(u.matrix()), p.lambda_op.matrix()), u.matrix());
    HermitianOperator conj_op(scaled(add(m, adjoint(m)), 0.5));
    return projected_weight(conj_op, p.target_eigenvalue, p.psi);
}

double qtick_prob(const DecayProblem& p) {
    if (!p.u_step) throw validation_error("decay: q-tick picture needs the (U_step, N) form");
    const ComplexMatrix& u = p.u_step->matrix();
    ComplexMatrix u_dag = adjoint(u);
    // Lambda_N accumulated one elementary time step at a time.
    ComplexMatrix m = p.lambda_op.matrix();
    for (unsigned k = 0; k < p.n_steps; ++k) {
        m = mul(mul(u_dag, m), u);
        m = scaled(add(m, adjoint(m)), 0.5);
    }
    return projected_weight(HermitianOperator(std::move(m)), p.target_eigenvalue, p.psi);
}

PictureReport compare_pictures(const DecayProblem& p) {
    PictureReport rep{};
    rep.schrodinger = schrodinger_prob(p);
    rep.heisenberg = heisenberg_prob(p);
    rep.max_delta = std::abs(rep.schrodinger - rep.heisenberg);
    if (p.u_step) {
        rep.qtick = qtick_prob(p);
        rep.max_delta = std::max({rep.max_delta, std::abs(*rep.qtick - rep.schrodinger),
                                  std::abs(*rep.qtick - rep.heisenberg)});
    }
    rep.breach = rep.max_delta > 1e-9;
    return rep;
}

} // namespace qtick
