#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qtick/pictures.hpp"
#include "support.hpp"

using namespace qtick;
using test::random_axis;
using test::random_hermitian;
using test::random_state;
using test::random_unitary;

namespace {

StateVector up() { return StateVector({1.0, 0.0}); }

UnitaryOperator identity(std::size_t dim) {
    return UnitaryOperator(ComplexMatrix::identity(dim));
}

DecayProblem random_problem(SeededRng& rng, std::size_t dim, unsigned n_steps) {
    HermitianOperator lambda_op = random_hermitian(rng, dim);
    EigenDecomposition eig = eig_hermitian(lambda_op);
    std::size_t pick = rng.next_u64() % dim;
    return DecayProblem::with_steps(random_state(rng, dim), lambda_op, eig.eigenvalues[pick],
                                    random_unitary(rng, dim), n_steps);
}

} // namespace

TEST_CASE("schrodinger picture frozen cases") {
    DecayProblem trivial =
        DecayProblem::with_total(up(), pauli_z(), +1.0, identity(2));
    CHECK(schrodinger_prob(trivial) == doctest::Approx(1.0).epsilon(1e-12));

    SeededRng rng(3);
    for (int k = 0; k < 20; ++k) {
        StateVector psi = random_state(rng, 2);
        // With U = I the answer is the overlap with the target eigenvector.
        DecayProblem p = DecayProblem::with_total(psi, pauli_z(), -1.0, identity(2));
        double expect = std::norm(psi[1]);
        CHECK(schrodinger_prob(p) == doctest::Approx(expect).epsilon(1e-12));
    }

    // Rabi: P(flip) = sin^2(theta/2).
    for (double theta : {0.2, 0.9, 1.7, 2.8}) {
        DecayProblem p = DecayProblem::with_total(up(), pauli_z(), -1.0,
                                                  su2_from(AxisVector(1, 0, 0), theta));
        CHECK(schrodinger_prob(p) ==
              doctest::Approx(std::sin(theta / 2.0) * std::sin(theta / 2.0)).epsilon(1e-12));
    }
}

TEST_CASE("heisenberg picture equals schrodinger") {
    SeededRng rng(5);
    for (int k = 0; k < 200; ++k) {
        std::size_t dim = (k % 2 == 0) ? 2 : 4;
        HermitianOperator lambda_op = random_hermitian(rng, dim);
        EigenDecomposition eig = eig_hermitian(lambda_op);
        DecayProblem p = DecayProblem::with_total(random_state(rng, dim), lambda_op,
                                                  eig.eigenvalues[rng.next_u64() % dim],
                                                  random_unitary(rng, dim));
        REQUIRE(std::abs(schrodinger_prob(p) - heisenberg_prob(p)) <= 1e-12);
    }
}

TEST_CASE("qtick picture accumulates step conjugations") {
    // N = 1 coincides with the heisenberg route.
    SeededRng rng(7);
    for (int k = 0; k < 50; ++k) {
        DecayProblem p = random_problem(rng, 4, 1);
        CHECK(std::abs(qtick_prob(p) - heisenberg_prob(p)) <= 1e-12);
    }

    // A rotation split into N slices reproduces the Rabi value.
    const double theta = 1.3;
    for (unsigned n : {10u, 100u, 1000u}) {
        DecayProblem p = DecayProblem::with_steps(
            up(), pauli_z(), -1.0, su2_from(AxisVector(1, 0, 0), theta / n), n);
        CHECK(std::abs(qtick_prob(p) - std::sin(theta / 2.0) * std::sin(theta / 2.0)) <= 1e-9);
    }

    // Random steps, N = 1000: q-tick equals schrodinger within 1e-9.
    for (int k = 0; k < 20; ++k) {
        DecayProblem p = random_problem(rng, (k % 2) ? 2 : 4, 1000);
        REQUIRE(std::abs(qtick_prob(p) - schrodinger_prob(p)) <= 1e-9);
    }
}

TEST_CASE("compare_pictures reports three equal probabilities") {
    DecayProblem trivial = DecayProblem::with_steps(up(), pauli_z(), +1.0, identity(2), 3);
    PictureReport rep = compare_pictures(trivial);
    CHECK(rep.schrodinger == doctest::Approx(1.0));
    CHECK(rep.heisenberg == doctest::Approx(1.0));
    REQUIRE(rep.qtick.has_value());
    CHECK(*rep.qtick == doctest::Approx(1.0));
    CHECK(rep.max_delta <= 1e-12);
    CHECK(!rep.breach);

    SeededRng rng(9);
    for (int k = 0; k < 100; ++k) {
        DecayProblem p = random_problem(rng, 4, 100);
        PictureReport r = compare_pictures(p);
        REQUIRE(r.max_delta <= 1e-9);
        REQUIRE(!r.breach);
        REQUIRE(r.schrodinger >= 0.0);
        REQUIRE(r.schrodinger <= 1.0);
    }
}

TEST_CASE("eigenspace probabilities over all clusters sum to one") {
    SeededRng rng(11);
    for (int k = 0; k < 50; ++k) {
        std::size_t dim = (k % 2) ? 2 : 4;
        HermitianOperator lambda_op = random_hermitian(rng, dim);
        StateVector psi = random_state(rng, dim);
        UnitaryOperator u = random_unitary(rng, dim);
        EigenDecomposition eig = eig_hermitian(lambda_op);
        double sum = 0.0;
        for (std::size_t e = 0; e < dim; ++e) {
            DecayProblem p =
                DecayProblem::with_total(psi, lambda_op, eig.eigenvalues[e], u);
            sum += schrodinger_prob(p);
        }
        // Non-degenerate random spectra: every eigenvalue once.
        REQUIRE(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("construction validates the problem") {
    CHECK_THROWS_AS(DecayProblem::with_total(up(), pauli_z(), 0.5, identity(2)),
                    validation_error);
    CHECK_THROWS_AS(DecayProblem::with_steps(up(), pauli_z(), 1.0, identity(2), 0),
                    validation_error);
    DecayProblem total_only = DecayProblem::with_total(up(), pauli_z(), 1.0, identity(2));
    CHECK_THROWS_AS(qtick_prob(total_only), validation_error);
    PictureReport rep = compare_pictures(total_only);
    CHECK(!rep.qtick.has_value());
}
