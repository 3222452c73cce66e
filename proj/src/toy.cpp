#include "qtick/toy.hpp"

#include <array>
#include <cmath>

namespace qtick {

namespace {

constexpr double kProbFloor = 1e-14;

HermitianOperator sigma_from_raw(const std::vector<cxd>& raw) {
    return HermitianOperator(ComplexMatrix(2, raw));
}

HermitianOperator next_sigma(const HermitianOperator& sigma, int lambda, const ToyLaws& laws) {
    // (1/2)(1+lambda) U Sigma U^dag + (1/2)(1-lambda) V Sigma V^dag; exactly
    // one branch contributes since lambda = +-1.
    return conjugated(lambda == +1 ? laws.u : laws.v, sigma);
}

} // namespace

ToyLaws laws_from(const ToyConfig& cfg) {
    return ToyLaws{su2_from(cfg.u_params.axis, cfg.u_params.angle),
                   su2_from(cfg.v_params.axis, cfg.v_params.angle)};
}

ToyState init_toy(const ToyConfig& cfg) {
    if (cfg.lambda0 != +1 && cfg.lambda0 != -1)
        throw validation_error("toy: lambda0 must be +1 or -1");
    if (cfg.initial_state_choice == InitialState::PlusEigenstate && cfg.lambda0 != +1)
        throw validation_error("toy: plus-eigenstate start requires lambda0 = +1");
    if (cfg.initial_state_choice == InitialState::MinusEigenstate && cfg.lambda0 != -1)
        throw validation_error("toy: minus-eigenstate start requires lambda0 = -1");

    HermitianOperator sigma0 = pauli_dot(cfg.axis_a);

    StateVector psi0 = [&] {
        if (cfg.initial_state_choice == InitialState::Explicit) {
            if (!cfg.explicit_state) throw validation_error("toy: explicit state missing");
            const StateVector& s = *cfg.explicit_state;
            if (s.dim() != 2) throw validation_error("toy: explicit state must be 2-dimensional");
            StateVector residual = apply(sigma0, s);
            double err = 0.0;
            for (std::size_t i = 0; i < 2; ++i)
                err += std::norm(residual[i] - static_cast<double>(cfg.lambda0) * s[i]);
            if (std::sqrt(err) > 1e-10)
                throw validation_error(
                    "toy: explicit state is not the lambda0 eigenstate of sigma.a");
            return s;
        }
        EigenDecomposition eig = eig_hermitian(sigma0);
        // Eigenvalues ascend: index 0 is -1, index 1 is +1.
        return eig.eigenvectors[cfg.lambda0 == +1 ? 1 : 0].normalized();
    }();

    return ToyState{0, sigma0, psi0, cfg.lambda0};
}

std::pair<ToyState, QTickRecord> step_toy(const ToyState& s, const ToyLaws& laws,
                                          SeededRng& rng) {
    HermitianOperator sigma1 = next_sigma(s.sigma_n, s.lambda_n, laws);
    Test test{"Sigma" + std::to_string(s.n + 1), {sigma1}, {}, Stage::Active};
    QTickRecord rec = perform_test(test, s.psi_n, rng);
    int lambda1 = rec.outcome_eigenvalue > 0.0 ? +1 : -1;
    ToyState next{s.n + 1, sigma1, rec.outcome_state, lambda1};
    return {next, rec};
}

ToyRun run_toy(const ToyConfig& cfg) {
    SeededRng rng(cfg.seed);
    return run_toy(cfg, rng);
}

ToyRun run_toy(const ToyConfig& cfg, SeededRng& rng) {
    ToyLaws laws = laws_from(cfg);
    ToyState state = init_toy(cfg);
    std::vector<QTickRecord> ticks;
    ticks.reserve(cfg.steps);
    for (unsigned n = 0; n < cfg.steps; ++n) {
        auto [next, rec] = step_toy(state, laws, rng);
        ticks.push_back(std::move(rec));
        state = std::move(next);
    }
    return ToyRun{std::move(ticks), std::move(state)};
}

std::vector<HistoryLeaf> HistoryTree::leaves() const {
    std::vector<HistoryLeaf> out;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].depth != depth) continue;
        HistoryLeaf leaf;
        leaf.probability = nodes[i].probability;
        std::int32_t cur = static_cast<std::int32_t>(i);
        while (cur > 0) {
            leaf.lambdas.push_back(nodes[cur].lambda);
            cur = nodes[cur].parent;
        }
        std::reverse(leaf.lambdas.begin(), leaf.lambdas.end());
        out.push_back(std::move(leaf));
    }
    return out;
}

HistoryTree enumerate_tree(const ToyConfig& cfg, unsigned depth) {
    if (depth > kMaxTreeDepth)
        throw validation_error("enumerate_tree: depth beyond the 2^20 cap");
    ToyLaws laws = laws_from(cfg);
    ToyState root = init_toy(cfg);

    HistoryTree tree;
    tree.depth = depth;
    tree.nodes.push_back(HistoryNode{-1, static_cast<std::int8_t>(root.lambda_n), 1.0,
                                     root.psi_n.amplitudes(), root.sigma_n.matrix().entries(),
                                     0});

    std::size_t level_begin = 0, level_end = 1;
    for (unsigned d = 0; d < depth; ++d) {
        for (std::size_t idx = level_begin; idx < level_end; ++idx) {
            // Copy out: push_back below may reallocate the node vector.
            const HistoryNode parent = tree.nodes[idx];
            HermitianOperator sigma =
                next_sigma(sigma_from_raw(parent.sigma), parent.lambda, laws);
            StateVector psi = StateVector::unnormalized(parent.psi);
            // Outcomes ascend (-1 before +1): the fixed expansion order. Each
            // node has exactly two candidate branches (eigenvalues +-1);
            // candidates already below the floor inside the enumeration count
            // as pruned as well.
            std::vector<Outcome> outcomes = enumerate_outcomes(sigma, psi);
            tree.pruned_branches += 2 - outcomes.size();
            for (const Outcome& o : outcomes) {
                double p = parent.probability * o.probability;
                if (p < kProbFloor) {
                    ++tree.pruned_branches;
                    continue;
                }
                tree.nodes.push_back(HistoryNode{
                    static_cast<std::int32_t>(idx),
                    static_cast<std::int8_t>(o.eigenvalue > 0.0 ? +1 : -1), p,
                    o.state.amplitudes(), sigma.matrix().entries(), d + 1});
            }
        }
        level_begin = level_end;
        level_end = tree.nodes.size();
    }
    return tree;
}

std::array<std::array<double, 3>, 3> rotation_of(const UnitaryOperator& w) {
    const std::array<HermitianOperator, 3> sigmas{pauli_x(), pauli_y(), pauli_z()};
    std::array<std::array<double, 3>, 3> r{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            ComplexMatrix m = mul(sigmas[static_cast<std::size_t>(i)].matrix(),
                                  mul(w.matrix(), mul(sigmas[static_cast<std::size_t>(j)].matrix(),
                                                      adjoint(w.matrix()))));
            cxd tr = m.at(0, 0) + m.at(1, 1);
            r[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 0.5 * tr.real();
        }
    }
    return r;
}

} // namespace qtick
