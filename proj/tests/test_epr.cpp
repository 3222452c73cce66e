#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qtick/epr.hpp"
#include "qtick/json_io.hpp"
#include "support.hpp"

using namespace qtick;
using test::fidelity;
using test::random_axis;
using test::state_distance;

namespace {

StateVector up() { return StateVector({1.0, 0.0}); }
StateVector down() { return StateVector({0.0, 1.0}); }

AxisVector tilted(double theta) {
    return AxisVector(std::sin(theta), 0.0, std::cos(theta));
}

} // namespace

TEST_CASE("make_singlet amplitudes and norm") {
    StateVector s = make_singlet();
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(s[0] == cxd(0.0, 0.0));
    CHECK(s[1] == cxd(r, 0.0));
    CHECK(s[2] == cxd(-r, 0.0));
    CHECK(s[3] == cxd(0.0, 0.0));
    CHECK(std::abs(s.norm() - 1.0) <= 1e-15);
}

TEST_CASE("the singlet is annihilated by sigma_total along any axis") {
    SeededRng rng(2);
    for (int k = 0; k < 100; ++k) {
        AxisVector a = random_axis(rng);
        StateVector mapped = apply(sigma_total(a), make_singlet());
        CHECK(mapped.norm() <= 1e-12);
    }
}

TEST_CASE("singlet keeps its form in any rotated basis") {
    SeededRng rng(4);
    const double r = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < 50; ++k) {
        AxisVector a = random_axis(rng);
        EigenDecomposition eig = eig_hermitian(pauli_dot(a));
        const StateVector& minus_a = eig.eigenvectors[0];
        const StateVector& plus_a = eig.eigenvectors[1];
        // (|+a>(x)|-a> - |-a>(x)|+a>)/sqrt(2)
        StateVector lhs = tensor(plus_a, minus_a);
        StateVector rhs = tensor(minus_a, plus_a);
        std::vector<cxd> amp(4);
        for (std::size_t i = 0; i < 4; ++i) amp[i] = r * (lhs[i] - rhs[i]);
        StateVector rebuilt = StateVector::unnormalized(std::move(amp));
        CHECK(fidelity(rebuilt.normalized(), make_singlet()) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sigma_total along z is diagonal (2,0,0,-2)") {
    HermitianOperator s = sigma_total(AxisVector(0, 0, 1));
    CHECK(s.at(0, 0) == cxd(2.0, 0.0));
    CHECK(s.at(1, 1) == cxd(0.0, 0.0));
    CHECK(s.at(2, 2) == cxd(0.0, 0.0));
    CHECK(s.at(3, 3) == cxd(-2.0, 0.0));
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (i != j) CHECK(std::abs(s.at(i, j)) == 0.0);
}

TEST_CASE("s_squared frozen values") {
    HermitianOperator s2 = s_squared();
    // Singlet eigenvalue 0.
    CHECK(apply(s2, make_singlet()).norm() <= 1e-12);
    // Triplet |up up> eigenvalue 8, from expanding the three squared terms
    // by hand: z contributes 4, x and y contribute 2 each.
    StateVector uu = tensor(up(), up());
    StateVector mapped = apply(s2, uu);
    double resid = 0.0;
    for (std::size_t i = 0; i < 4; ++i) resid += std::norm(mapped[i] - 8.0 * uu[i]);
    CHECK(std::sqrt(resid) <= 1e-12);
}

TEST_CASE("s_squared commutes with sigma_total for random axes") {
    SeededRng rng(6);
    HermitianOperator s2 = s_squared();
    for (int k = 0; k < 50; ++k) {
        HermitianOperator st = sigma_total(random_axis(rng));
        ComplexMatrix comm =
            sub(mul(s2.matrix(), st.matrix()), mul(st.matrix(), s2.matrix()));
        CHECK(max_abs(comm) <= 1e-12);
    }
}

TEST_CASE("constrained_test along z reproduces the product outcomes") {
    ConstrainedTest ct = constrained_test(AxisVector(0, 0, 1), TestedParticle::Electron);
    CHECK(ct.outcomes[0].first == doctest::Approx(-1.0));
    CHECK(ct.outcomes[1].first == doctest::Approx(+1.0));
    CHECK(fidelity(ct.outcomes[1].second, tensor(up(), down())) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity(ct.outcomes[0].second, tensor(down(), up())) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // Singlet probabilities: one half each.
    for (const auto& [eigenvalue, state] : ct.outcomes) {
        (void)eigenvalue;
        CHECK(std::norm(inner(state, make_singlet())) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("constrained_test solves both constraints for random axes") {
    SeededRng rng(8);
    for (int k = 0; k < 100; ++k) {
        AxisVector b = random_axis(rng);
        for (TestedParticle particle : {TestedParticle::Electron, TestedParticle::Positron}) {
            ConstrainedTest ct = constrained_test(b, particle);
            // Reference outcomes from the 2x2 eigenbasis, built independently
            // of the 4x4 solve.
            EigenDecomposition eig = eig_hermitian(pauli_dot(b));
            const StateVector& minus_b = eig.eigenvectors[0];
            const StateVector& plus_b = eig.eigenvectors[1];
            StateVector expect_plus = particle == TestedParticle::Electron
                                          ? tensor(plus_b, minus_b)
                                          : tensor(minus_b, plus_b);
            StateVector expect_minus = particle == TestedParticle::Electron
                                           ? tensor(minus_b, plus_b)
                                           : tensor(plus_b, minus_b);
            REQUIRE(fidelity(ct.outcomes[1].second, expect_plus) >= 1.0 - 1e-10);
            REQUIRE(fidelity(ct.outcomes[0].second, expect_minus) >= 1.0 - 1e-10);

            for (const auto& [eigenvalue, state] : ct.outcomes) {
                // Primary constraint.
                StateVector pv = apply(ct.primary_op, state);
                double resid = 0.0;
                for (std::size_t i = 0; i < 4; ++i)
                    resid += std::norm(pv[i] - eigenvalue * state[i]);
                REQUIRE(std::sqrt(resid) <= 1e-10);
                // Null constraint: eigenvalue zero.
                REQUIRE(apply(ct.null_op, state).norm() <= 1e-10);
                // Product outcome.
                REQUIRE(schmidt_rank(state, 2, 2) == 1);
                // Singlet probability one half.
                REQUIRE(std::norm(inner(state, make_singlet())) ==
                        doctest::Approx(0.5).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("constrained outcome is not an s_squared eigenstate") {
    SeededRng rng(10);
    HermitianOperator s2 = s_squared();
    for (int k = 0; k < 20; ++k) {
        ConstrainedTest ct = constrained_test(random_axis(rng), TestedParticle::Electron);
        for (const auto& [eigenvalue, state] : ct.outcomes) {
            (void)eigenvalue;
            StateVector mapped = apply(s2, state);
            // Best possible eigenvalue fit still leaves a large residual.
            double mu = inner(state, mapped).real();
            double resid = 0.0;
            for (std::size_t i = 0; i < 4; ++i) resid += std::norm(mapped[i] - mu * state[i]);
            CHECK(std::sqrt(resid) > 0.1);
        }
    }
}

TEST_CASE("exact_joint frozen tables") {
    AxisVector z(0, 0, 1);
    JointTable t = exact_joint(z, z, EprTopology::ElectronFirst);
    CHECK(t.at(+1, -1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.at(-1, +1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.at(+1, +1) <= 1e-14);
    CHECK(t.at(-1, -1) <= 1e-14);
    CHECK(t.sum() == doctest::Approx(1.0).epsilon(1e-14));

    // P(+,+) = sin^2(theta/2)/2 for an angle theta between the axes.
    for (double theta : {0.3, 1.1, 2.0, 2.8}) {
        JointTable tt = exact_joint(z, tilted(theta), EprTopology::ElectronFirst);
        double expect = 0.5 * std::sin(theta / 2.0) * std::sin(theta / 2.0);
        CHECK(tt.at(+1, +1) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(tt.sum() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("exact_joint is independent of topology") {
    SeededRng rng(12);
    for (int k = 0; k < 100; ++k) {
        AxisVector b = random_axis(rng);
        AxisVector c = random_axis(rng);
        JointTable ef = exact_joint(b, c, EprTopology::ElectronFirst);
        JointTable pf = exact_joint(b, c, EprTopology::PositronFirst);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) REQUIRE(std::abs(ef.p[i][j] - pf.p[i][j]) <= 1e-14);
    }
}

TEST_CASE("correlation equals -b.c") {
    AxisVector z(0, 0, 1);
    CHECK(correlation(z, z) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(correlation(z, AxisVector(1, 0, 0))) <= 1e-12);
    CHECK(correlation(z, tilted(2.0 * M_PI / 3.0)) == doctest::Approx(0.5).epsilon(1e-12));

    SeededRng rng(14);
    for (int k = 0; k < 200; ++k) {
        AxisVector b = random_axis(rng);
        AxisVector c = random_axis(rng);
        REQUIRE(std::abs(correlation(b, c) + b.dot(c)) <= 1e-12);
    }
}

TEST_CASE("chsh reaches the Tsirelson value at the standard settings") {
    AxisVector b = tilted(0.0);
    AxisVector b2 = tilted(M_PI / 2.0);
    AxisVector c = tilted(M_PI / 4.0);
    AxisVector c2 = tilted(3.0 * M_PI / 4.0);
    CHECK(std::abs(std::abs(chsh(b, b2, c, c2)) - 2.0 * std::sqrt(2.0)) <= 1e-9);

    // Degenerate choice collapses to 2E.
    CHECK(chsh(b, b, c, c) == doctest::Approx(2.0 * correlation(b, c)).epsilon(1e-12));

    SeededRng rng(16);
    for (int k = 0; k < 100; ++k) {
        double s = chsh(random_axis(rng), random_axis(rng), random_axis(rng), random_axis(rng));
        REQUIRE(std::abs(s) <= 2.0 * std::sqrt(2.0) + 1e-9);
    }
}

TEST_CASE("run_epr: perfect anticorrelation when axes agree") {
    EprConfig cfg;
    cfg.axis_b = AxisVector(0, 0, 1);
    cfg.axis_c = AxisVector(0, 0, 1);
    cfg.runs = 500;
    cfg.seed = 1;
    for (EprTopology topo : {EprTopology::ElectronFirst, EprTopology::PositronFirst}) {
        cfg.topology = topo;
        auto records = run_epr(cfg);
        REQUIRE(records.size() == 500);
        for (const EprRunRecord& r : records) {
            REQUIRE(r.electron_sign == -r.positron_sign);
            REQUIRE(r.ticks.size() == 2);
        }
    }
}

TEST_CASE("run_epr: orthogonal axes give the uniform table") {
    EprConfig cfg;
    cfg.axis_b = AxisVector(0, 0, 1);
    cfg.axis_c = AxisVector(1, 0, 0);
    cfg.runs = 20000;
    cfg.seed = 7;
    auto records = run_epr(cfg);
    std::array<std::array<int, 2>, 2> counts{};
    for (const EprRunRecord& r : records)
        ++counts[r.electron_sign > 0 ? 0 : 1][r.positron_sign > 0 ? 0 : 1];
    double sigma = std::sqrt(0.25 * 0.75 / cfg.runs);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(counts[i][j] / static_cast<double>(cfg.runs) - 0.25) <= 3.0 * sigma);
}

TEST_CASE("run_epr: the two topologies agree statistically") {
    EprConfig cfg;
    cfg.axis_b = tilted(0.7);
    cfg.axis_c = tilted(1.9);
    cfg.runs = 20000;
    cfg.seed = 77;
    JointTable exact = exact_joint(cfg.axis_b, cfg.axis_c, EprTopology::ElectronFirst);
    for (EprTopology topo : {EprTopology::ElectronFirst, EprTopology::PositronFirst}) {
        cfg.topology = topo;
        auto records = run_epr(cfg);
        std::array<std::array<int, 2>, 2> counts{};
        for (const EprRunRecord& r : records)
            ++counts[r.electron_sign > 0 ? 0 : 1][r.positron_sign > 0 ? 0 : 1];
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                double p = exact.p[i][j];
                double freq = counts[i][j] / static_cast<double>(cfg.runs);
                double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-12) / cfg.runs);
                REQUIRE(std::abs(freq - p) <= 3.5 * sigma);
            }
        }
    }
}

TEST_CASE("tick-1 outcomes are product states and runs replay deterministically") {
    EprConfig cfg;
    cfg.axis_b = tilted(0.9);
    cfg.axis_c = tilted(2.1);
    cfg.runs = 200;
    cfg.seed = 3;
    auto records = run_epr(cfg);
    for (const EprRunRecord& r : records) {
        REQUIRE(r.ticks.size() == 2);
        CHECK(schmidt_rank(r.ticks[0].outcome_state, 2, 2) == 1);
    }
    auto again = run_epr(cfg);
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(records[i].electron_sign == again[i].electron_sign);
        CHECK(records[i].positron_sign == again[i].positron_sign);
        CHECK(records[i].ticks[0].rng_draw == again[i].ticks[0].rng_draw);
    }
}

TEST_CASE("parallel run_epr reproduces the serial records") {
    EprConfig cfg;
    cfg.axis_b = tilted(0.5);
    cfg.axis_c = tilted(1.3);
    cfg.runs = 501;
    cfg.seed = 11;
    auto serial = run_epr(cfg, 1);
    auto parallel = run_epr(cfg, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        REQUIRE(serial[i].electron_sign == parallel[i].electron_sign);
        REQUIRE(serial[i].positron_sign == parallel[i].positron_sign);
        REQUIRE(serial[i].ticks[1].rng_draw == parallel[i].ticks[1].rng_draw);
    }
}

TEST_CASE("monte-carlo correlation converges to the exact value") {
    EprConfig cfg;
    cfg.axis_b = tilted(0.4);
    cfg.axis_c = tilted(1.5);
    cfg.seed = 2024;
    double exact = correlation(cfg.axis_b, cfg.axis_c);
    for (unsigned runs : {1000u, 10000u, 100000u}) {
        cfg.runs = runs;
        auto records = run_epr(cfg, 4);
        double sum = 0.0;
        for (const EprRunRecord& r : records) sum += r.electron_sign * r.positron_sign;
        double e_hat = sum / runs;
        REQUIRE(std::abs(e_hat - exact) <= 4.0 / std::sqrt(static_cast<double>(runs)));
    }
}

TEST_CASE("epr JSON shape") {
    EprConfig cfg;
    cfg.axis_b = AxisVector(0, 0, 1);
    cfg.axis_c = AxisVector(1, 0, 0);
    cfg.runs = 100;
    cfg.seed = 5;
    auto records = run_epr(cfg);
    json doc = epr_run_json(cfg, records, false);
    CHECK(doc.contains("config"));
    CHECK(doc["exact"].contains("table"));
    CHECK(doc["exact"].contains("E"));
    CHECK(doc["sampled"].contains("counts"));
    CHECK(doc["sampled"].contains("E_hat"));
    CHECK(doc["sampled"].contains("stderr"));
    CHECK(!doc.contains("runs"));
    json with_runs = epr_run_json(cfg, records, true);
    CHECK(with_runs["runs"].size() == 100);
}
