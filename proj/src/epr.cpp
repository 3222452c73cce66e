#include "qtick/epr.hpp"

#include <cmath>
#include <thread>

#include "qtick/rng.hpp"

namespace qtick {

namespace {

HermitianOperator identity2() {
    return HermitianOperator(ComplexMatrix::identity(2));
}

// sigma.b acting on the tested particle's slot of the pair space.
HermitianOperator one_sided(const AxisVector& b, TestedParticle tested) {
    return tested == TestedParticle::Electron ? tensor(pauli_dot(b), identity2())
                                              : tensor(identity2(), pauli_dot(b));
}

} // namespace

const char* to_string(EprTopology t) {
    return t == EprTopology::ElectronFirst ? "electron_first" : "positron_first";
}

double JointTable::sum() const {
    return p[0][0] + p[0][1] + p[1][0] + p[1][1];
}

StateVector make_singlet() {
    const double r = 1.0 / std::sqrt(2.0);
    return StateVector({0.0, r, -r, 0.0});
}

HermitianOperator sigma_total(const AxisVector& a) {
    HermitianOperator left = tensor(pauli_dot(a), identity2());
    HermitianOperator right = tensor(identity2(), pauli_dot(a));
    return HermitianOperator(add(left.matrix(), right.matrix()));
}

HermitianOperator s_squared() {
    const std::array<HermitianOperator, 3> sigmas{pauli_x(), pauli_y(), pauli_z()};
    ComplexMatrix total(4);
    for (const HermitianOperator& s : sigmas) {
        ComplexMatrix comp = add(tensor(s, identity2()).matrix(), tensor(identity2(), s).matrix());
        total = add(total, mul(comp, comp));
    }
    return HermitianOperator(std::move(total));
}

ConstrainedTest constrained_test(const AxisVector& b, TestedParticle tested) {
    HermitianOperator primary = one_sided(b, tested);
    HermitianOperator null_op = sigma_total(b);

    EigenDecomposition eig = eig_hermitian(primary);

    // Place the solved outcome per primary eigenvalue; eig the 4x4 primary,
    // restrict the null operator to each two-dimensional +-1 eigenspace, and
    // keep the eigenvalue-zero vector.
    std::array<std::pair<double, StateVector>, 2> outcomes{
        std::pair<double, StateVector>{-1.0, make_singlet()},
        std::pair<double, StateVector>{+1.0, make_singlet()}};

    for (int which = 0; which < 2; ++which) {
        const double target = which == 0 ? -1.0 : +1.0;
        std::vector<const StateVector*> basis;
        for (std::size_t k = 0; k < eig.eigenvalues.size(); ++k) {
            if (std::abs(eig.eigenvalues[k] - target) <= 1e-9) basis.push_back(&eig.eigenvectors[k]);
        }
        if (basis.size() != 2)
            throw numeric_error("constrained_test: primary eigenspace is not two-dimensional");

        // Restriction of the null operator to the eigenspace.
        ComplexMatrix restricted(2);
        for (std::size_t i = 0; i < 2; ++i) {
            StateVector mapped = apply(null_op, *basis[i]);
            for (std::size_t j = 0; j < 2; ++j) restricted.at(j, i) = inner(*basis[j], mapped);
        }
        restricted = scaled(add(restricted, adjoint(restricted)), 0.5);
        EigenDecomposition sub = eig_hermitian(HermitianOperator(std::move(restricted)));

        bool found = false;
        for (std::size_t k = 0; k < sub.eigenvalues.size(); ++k) {
            if (std::abs(sub.eigenvalues[k]) > 1e-9) continue;
            std::vector<cxd> amp(4, cxd(0.0, 0.0));
            for (std::size_t i = 0; i < 2; ++i)
                for (std::size_t x = 0; x < 4; ++x) amp[x] += sub.eigenvectors[k][i] * (*basis[i])[x];
            amp = phase_fixed(std::move(amp));
            outcomes[static_cast<std::size_t>(which)] = {
                target, StateVector::unnormalized(std::move(amp)).normalized()};
            found = true;
            break;
        }
        if (!found)
            throw numeric_error("constrained_test: no eigenvalue-zero vector in the eigenspace");
    }

    return ConstrainedTest{std::move(primary), std::move(null_op), std::move(outcomes)};
}

namespace {

EprRunRecord run_once(const EprConfig& cfg, const ConstrainedTest& ct,
                      const StateVector& singlet, SeededRng& rng) {
    const bool electron_first = cfg.topology == EprTopology::ElectronFirst;
    const AxisVector& second_axis = electron_first ? cfg.axis_c : cfg.axis_b;

    // Tick 1: constrained test on the first particle, applied to the pair.
    Test tick1{electron_first ? "Sigma1" : "Sigma2", {ct.primary_op, ct.null_op}, {},
               Stage::Active};
    QTickRecord rec1 = perform_test(tick1, singlet, rng);
    int first_sign = rec1.outcome_eigenvalue > 0.0 ? +1 : -1;

    // The outcome is a product; split it into the two factor events.
    auto [electron_state, positron_state] = factor_split(rec1.outcome_state, 2, 2);
    const StateVector& remaining = electron_first ? positron_state : electron_state;

    // Tick 2: plain single-particle test on the remaining factor.
    Test tick2{electron_first ? "Sigma2" : "Sigma1", {pauli_dot(second_axis)}, {},
               Stage::Active};
    QTickRecord rec2 = perform_test(tick2, remaining, rng);
    int second_sign = rec2.outcome_eigenvalue > 0.0 ? +1 : -1;

    EprRunRecord rr;
    rr.electron_sign = electron_first ? first_sign : second_sign;
    rr.positron_sign = electron_first ? second_sign : first_sign;
    rr.tick_order = {tick1.id, tick2.id};
    rr.ticks = {std::move(rec1), std::move(rec2)};
    return rr;
}

} // namespace

std::vector<EprRunRecord> run_epr(const EprConfig& cfg, unsigned threads) {
    if (cfg.runs == 0) throw validation_error("epr: runs must be positive");
    StateVector singlet = make_singlet();
    const bool electron_first = cfg.topology == EprTopology::ElectronFirst;
    ConstrainedTest ct = constrained_test(
        electron_first ? cfg.axis_b : cfg.axis_c,
        electron_first ? TestedParticle::Electron : TestedParticle::Positron);
    std::vector<EprRunRecord> records(cfg.runs,
                                      EprRunRecord{0, 0, {"", ""}, {}});

    auto work = [&](unsigned begin, unsigned end) {
        for (unsigned r = begin; r < end; ++r) {
            SeededRng rng(derive_seed(cfg.seed, r));
            records[r] = run_once(cfg, ct, singlet, rng);
        }
    };

    if (threads <= 1 || cfg.runs < 2) {
        work(0, cfg.runs);
        return records;
    }

    unsigned n = std::min(threads, cfg.runs);
    std::vector<std::thread> pool;
    pool.reserve(n);
    unsigned chunk = (cfg.runs + n - 1) / n;
    for (unsigned t = 0; t < n; ++t) {
        unsigned begin = t * chunk;
        unsigned end = std::min(cfg.runs, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(work, begin, end);
    }
    for (std::thread& th : pool) th.join();
    return records;
}

JointTable exact_joint(const AxisVector& b, const AxisVector& c, EprTopology topology) {
    const bool electron_first = topology == EprTopology::ElectronFirst;
    const AxisVector& first_axis = electron_first ? b : c;
    const AxisVector& second_axis = electron_first ? c : b;
    const TestedParticle first_particle =
        electron_first ? TestedParticle::Electron : TestedParticle::Positron;

    StateVector singlet = make_singlet();
    ConstrainedTest ct = constrained_test(first_axis, first_particle);

    JointTable table;
    std::vector<Outcome> tick1 =
        enumerate_outcomes(std::vector<HermitianOperator>{ct.primary_op, ct.null_op}, singlet);
    for (const Outcome& o1 : tick1) {
        int first_sign = o1.eigenvalue > 0.0 ? +1 : -1;
        auto [electron_state, positron_state] = factor_split(o1.state, 2, 2);
        const StateVector& remaining = electron_first ? positron_state : electron_state;
        for (const Outcome& o2 : enumerate_outcomes(pauli_dot(second_axis), remaining)) {
            int second_sign = o2.eigenvalue > 0.0 ? +1 : -1;
            int se = electron_first ? first_sign : second_sign;
            int sp = electron_first ? second_sign : first_sign;
            table.p[se > 0 ? 0 : 1][sp > 0 ? 0 : 1] += o1.probability * o2.probability;
        }
    }
    return table;
}

double correlation(const AxisVector& b, const AxisVector& c) {
    JointTable t = exact_joint(b, c, EprTopology::ElectronFirst);
    return t.at(+1, +1) - t.at(+1, -1) - t.at(-1, +1) + t.at(-1, -1);
}

double chsh(const AxisVector& b, const AxisVector& b2, const AxisVector& c,
            const AxisVector& c2) {
    return correlation(b, c) - correlation(b, c2) + correlation(b2, c) + correlation(b2, c2);
}

} // namespace qtick
