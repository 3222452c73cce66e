#pragma once

#include <cmath>
#include <vector>

#include "qtick/qla.hpp"
#include "qtick/rng.hpp"

namespace qtick::test {

inline AxisVector random_axis(SeededRng& rng) {
    // Marsaglia: uniform on the sphere.
    double z = 2.0 * rng.next_double() - 1.0;
    double phi = 2.0 * M_PI * rng.next_double();
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return AxisVector::normalized(r * std::cos(phi), r * std::sin(phi), z);
}

inline StateVector random_state(SeededRng& rng, std::size_t dim) {
    std::vector<cxd> amps(dim);
    for (cxd& a : amps) a = cxd(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
    return StateVector::unnormalized(std::move(amps)).normalized();
}

inline HermitianOperator random_hermitian(SeededRng& rng, std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        m.at(i, i) = 2.0 * rng.next_double() - 1.0;
        for (std::size_t j = i + 1; j < dim; ++j) {
            cxd v(2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0);
            m.at(i, j) = v;
            m.at(j, i) = std::conj(v);
        }
    }
    return HermitianOperator(std::move(m));
}

// Generic unitary: eigenbasis of a random Hermitian matrix with random
// phases on the diagonal, V diag(e^{i t}) V^dagger.
inline UnitaryOperator random_unitary(SeededRng& rng, std::size_t dim) {
    EigenDecomposition eig = eig_hermitian(random_hermitian(rng, dim));
    ComplexMatrix u(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        double theta = 2.0 * M_PI * rng.next_double();
        cxd phase(std::cos(theta), std::sin(theta));
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                u.at(i, j) += phase * eig.eigenvectors[k][i] * std::conj(eig.eigenvectors[k][j]);
    }
    return UnitaryOperator(std::move(u));
}

inline double state_distance(const StateVector& a, const StateVector& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) d += std::norm(a[i] - b[i]);
    return std::sqrt(d);
}

// |<a|b>|^2
inline double fidelity(const StateVector& a, const StateVector& b) {
    return std::norm(inner(a, b));
}

} // namespace qtick::test
