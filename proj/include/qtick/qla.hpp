#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qtick/errors.hpp"

namespace qtick {

using cxd = std::complex<double>;

// Hilbert-space dimensions are capped so the dense Jacobi solver stays
// trivially fast; the processes here need dim <= 4.
inline constexpr std::size_t kMaxDim = 64;

// Unit three-vector: a quantization axis.
class AxisVector {
public:
    AxisVector(double x, double y, double z);
    static AxisVector normalized(double x, double y, double z);

    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }
    double dot(const AxisVector& other) const {
        return x_ * other.x_ + y_ * other.y_ + z_ * other.z_;
    }

private:
    double x_, y_, z_;
};

// Normalized complex amplitude vector. The checked constructor enforces
// sum |a_k|^2 = 1 within 1e-12; unnormalized() exists for intermediate
// projections (matrix-vector products, eigenspace projections).
class StateVector {
public:
    explicit StateVector(std::vector<cxd> amplitudes);
    static StateVector unnormalized(std::vector<cxd> amplitudes);

    std::size_t dim() const { return amps_.size(); }
    const std::vector<cxd>& amplitudes() const { return amps_; }
    cxd operator[](std::size_t i) const { return amps_[i]; }

    double norm() const;
    StateVector normalized() const;

private:
    struct unchecked_tag {};
    StateVector(std::vector<cxd> amplitudes, unchecked_tag);
    std::vector<cxd> amps_;
};

// <a|b>
cxd inner(const StateVector& a, const StateVector& b);

// Dense complex square matrix, row-major.
class ComplexMatrix {
public:
    explicit ComplexMatrix(std::size_t dim);
    ComplexMatrix(std::size_t dim, std::vector<cxd> entries);
    static ComplexMatrix identity(std::size_t dim);

    std::size_t dim() const { return dim_; }
    cxd& at(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
    const cxd& at(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }
    const std::vector<cxd>& entries() const { return a_; }

private:
    std::size_t dim_;
    std::vector<cxd> a_;
};

ComplexMatrix mul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix scaled(const ComplexMatrix& a, cxd factor);
ComplexMatrix adjoint(const ComplexMatrix& a);
std::vector<cxd> matvec(const ComplexMatrix& a, const std::vector<cxd>& v);
double max_abs(const ComplexMatrix& a);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
bool is_hermitian(const ComplexMatrix& a, double tol);
bool is_unitary(const ComplexMatrix& a, double tol);

// A test operator. Hermiticity is checked at construction (1e-12).
class HermitianOperator {
public:
    explicit HermitianOperator(ComplexMatrix m);
    std::size_t dim() const { return m_.dim(); }
    const ComplexMatrix& matrix() const { return m_; }
    cxd at(std::size_t i, std::size_t j) const { return m_.at(i, j); }

private:
    ComplexMatrix m_;
};

// An evolution operator. U * U^dagger = I is checked at construction (1e-12).
class UnitaryOperator {
public:
    explicit UnitaryOperator(ComplexMatrix m);
    std::size_t dim() const { return m_.dim(); }
    const ComplexMatrix& matrix() const { return m_; }
    cxd at(std::size_t i, std::size_t j) const { return m_.at(i, j); }

private:
    ComplexMatrix m_;
};

UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b);
UnitaryOperator pow(const UnitaryOperator& u, unsigned n);

// Real spectrum plus orthonormal eigenbasis; eigenvectors[k] pairs with
// eigenvalues[k]. Eigenvalues ascend; each eigenvector's first component of
// magnitude > 1e-8 is made real and positive so decompositions compare
// across runs.
struct EigenDecomposition {
    std::vector<double> eigenvalues;
    std::vector<StateVector> eigenvectors;
};

HermitianOperator pauli_x();
HermitianOperator pauli_y();
HermitianOperator pauli_z();

// x*sigma_x + y*sigma_y + z*sigma_z; traceless, eigenvalues {-1, +1}.
HermitianOperator pauli_dot(const AxisVector& axis);

// exp(-i*angle*(sigma.axis)/2) = cos(angle/2) I - i sin(angle/2) (sigma.axis).
UnitaryOperator su2_from(const AxisVector& axis, double angle);

// Cyclic Jacobi with fixed row-major pivot order; converged when every
// off-diagonal magnitude is below 1e-14, capped at 100 sweeps (numeric_error
// past the cap). Deterministic: ties in the ascending eigenvalue sort break
// lexicographically on the phase-fixed amplitudes.
EigenDecomposition eig_hermitian(const HermitianOperator& h);

// Kronecker products. Composite index = i_a * dim_b + i_b: the left factor
// is the slow index (the electron is the left factor throughout).
StateVector tensor(const StateVector& a, const StateVector& b);
HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
UnitaryOperator tensor(const UnitaryOperator& a, const UnitaryOperator& b);

// Number of singular values of the dim_a x dim_b amplitude matrix above
// 1e-10; rank 1 iff the state is a product across that split.
int schmidt_rank(const StateVector& state, std::size_t dim_a, std::size_t dim_b);

// Matrix-vector product, no renormalization.
StateVector apply(const HermitianOperator& a, const StateVector& v);
StateVector apply(const UnitaryOperator& a, const StateVector& v);

// W H W^dagger, re-symmetrized against roundoff drift.
HermitianOperator conjugated(const UnitaryOperator& w, const HermitianOperator& h);

// First component of magnitude > 1e-8 made real-positive.
std::vector<cxd> phase_fixed(std::vector<cxd> v);

} // namespace qtick
