#include "qtick/qla.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace qtick {

namespace {

void check_finite(const std::vector<cxd>& values, const char* what) {
    for (const cxd& v : values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw validation_error(std::string(what) + ": non-finite entry");
        }
    }
}

void check_dim(std::size_t dim, const char* what) {
    if (dim == 0 || dim > kMaxDim) {
        throw validation_error(std::string(what) + ": dimension must be in [1, " +
                               std::to_string(kMaxDim) + "]");
    }
}

// Lexicographic (re, im) comparison, used only to break exact eigenvalue ties.
bool lex_less(const std::vector<cxd>& a, const std::vector<cxd>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
    }
    return false;
}

} // namespace

AxisVector::AxisVector(double x, double y, double z) : x_(x), y_(y), z_(z) {
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
        throw validation_error("axis: non-finite component");
    }
    double n2 = x * x + y * y + z * z;
    if (std::abs(n2 - 1.0) > 1e-12) {
        throw validation_error("axis: not unit-norm");
    }
}

AxisVector AxisVector::normalized(double x, double y, double z) {
    double n = std::sqrt(x * x + y * y + z * z);
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw validation_error("axis: cannot normalize zero or non-finite vector");
    }
    return AxisVector(x / n, y / n, z / n);
}

StateVector::StateVector(std::vector<cxd> amplitudes)
    : StateVector(std::move(amplitudes), unchecked_tag{}) {
    double n2 = 0.0;
    for (const cxd& a : amps_) n2 += std::norm(a);
    if (std::abs(n2 - 1.0) > 1e-12) {
        throw validation_error("state: not normalized");
    }
}

StateVector::StateVector(std::vector<cxd> amplitudes, unchecked_tag)
    : amps_(std::move(amplitudes)) {
    check_dim(amps_.size(), "state");
    check_finite(amps_, "state");
}

StateVector StateVector::unnormalized(std::vector<cxd> amplitudes) {
    return StateVector(std::move(amplitudes), unchecked_tag{});
}

double StateVector::norm() const {
    double n2 = 0.0;
    for (const cxd& a : amps_) n2 += std::norm(a);
    return std::sqrt(n2);
}

StateVector StateVector::normalized() const {
    double n = norm();
    if (!(n > 0.0)) throw validation_error("state: cannot normalize zero vector");
    std::vector<cxd> out(amps_);
    for (cxd& a : out) a /= n;
    return StateVector(std::move(out), unchecked_tag{});
}

cxd inner(const StateVector& a, const StateVector& b) {
    if (a.dim() != b.dim()) throw validation_error("inner: dimension mismatch");
    cxd s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, cxd(0.0, 0.0)) {
    check_dim(dim, "matrix");
}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<cxd> entries)
    : dim_(dim), a_(std::move(entries)) {
    check_dim(dim, "matrix");
    if (a_.size() != dim * dim) throw validation_error("matrix: entry count != dim*dim");
    check_finite(a_, "matrix");
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1.0;
    return m;
}

ComplexMatrix mul(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw validation_error("mul: dimension mismatch");
    std::size_t n = a.dim();
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            cxd aik = a.at(i, k);
            if (aik == cxd(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < n; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    }
    return c;
}

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw validation_error("add: dimension mismatch");
    ComplexMatrix c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) c.at(i, j) = a.at(i, j) + b.at(i, j);
    return c;
}

ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b) {
    return add(a, scaled(b, cxd(-1.0, 0.0)));
}

ComplexMatrix scaled(const ComplexMatrix& a, cxd factor) {
    ComplexMatrix c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) c.at(i, j) = a.at(i, j) * factor;
    return c;
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
    ComplexMatrix c(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) c.at(i, j) = std::conj(a.at(j, i));
    return c;
}

std::vector<cxd> matvec(const ComplexMatrix& a, const std::vector<cxd>& v) {
    if (v.size() != a.dim()) throw validation_error("matvec: dimension mismatch");
    std::vector<cxd> out(a.dim(), cxd(0.0, 0.0));
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) out[i] += a.at(i, j) * v[j];
    return out;
}

double max_abs(const ComplexMatrix& a) {
    double m = 0.0;
    for (const cxd& v : a.entries()) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw validation_error("max_abs_diff: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i)
        m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
    return m;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j)
            if (std::abs(a.at(i, j) - std::conj(a.at(j, i))) > tol) return false;
    return true;
}

bool is_unitary(const ComplexMatrix& a, double tol) {
    return max_abs_diff(mul(a, adjoint(a)), ComplexMatrix::identity(a.dim())) <= tol;
}

HermitianOperator::HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {
    if (!is_hermitian(m_, 1e-12)) throw validation_error("operator: not Hermitian");
}

UnitaryOperator::UnitaryOperator(ComplexMatrix m) : m_(std::move(m)) {
    if (!is_unitary(m_, 1e-12)) throw validation_error("operator: not unitary");
}

UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b) {
    return UnitaryOperator(mul(a.matrix(), b.matrix()));
}

UnitaryOperator pow(const UnitaryOperator& u, unsigned n) {
    ComplexMatrix acc = ComplexMatrix::identity(u.dim());
    ComplexMatrix base = u.matrix();
    while (n > 0) {
        if (n & 1u) acc = mul(acc, base);
        n >>= 1u;
        if (n > 0) base = mul(base, base);
    }
    // One Newton-Schulz polar step, 0.5 A (3I - A^dag A): long products drift
    // off the unitary manifold by a few eps multiples, which would trip the
    // constructor's 1e-12 invariant.
    ComplexMatrix three_i = scaled(ComplexMatrix::identity(u.dim()), 3.0);
    acc = scaled(mul(acc, sub(three_i, mul(adjoint(acc), acc))), 0.5);
    return UnitaryOperator(std::move(acc));
}

HermitianOperator pauli_x() {
    return HermitianOperator(ComplexMatrix(2, {0.0, 1.0, 1.0, 0.0}));
}

HermitianOperator pauli_y() {
    return HermitianOperator(ComplexMatrix(2, {0.0, cxd(0.0, -1.0), cxd(0.0, 1.0), 0.0}));
}

HermitianOperator pauli_z() {
    return HermitianOperator(ComplexMatrix(2, {1.0, 0.0, 0.0, -1.0}));
}

HermitianOperator pauli_dot(const AxisVector& axis) {
    ComplexMatrix m(2);
    m.at(0, 0) = axis.z();
    m.at(0, 1) = cxd(axis.x(), -axis.y());
    m.at(1, 0) = cxd(axis.x(), axis.y());
    m.at(1, 1) = -axis.z();
    return HermitianOperator(std::move(m));
}

UnitaryOperator su2_from(const AxisVector& axis, double angle) {
    double c = std::cos(angle / 2.0);
    double s = std::sin(angle / 2.0);
    ComplexMatrix m(2);
    // cos(t/2) I - i sin(t/2) (sigma . axis)
    m.at(0, 0) = cxd(c, -s * axis.z());
    m.at(0, 1) = cxd(-s * axis.y(), -s * axis.x());
    m.at(1, 0) = cxd(s * axis.y(), -s * axis.x());
    m.at(1, 1) = cxd(c, s * axis.z());
    return UnitaryOperator(std::move(m));
}

std::vector<cxd> phase_fixed(std::vector<cxd> v) {
    for (const cxd& a : v) {
        double mag = std::abs(a);
        if (mag > 1e-8) {
            cxd factor = std::conj(a) / mag;
            for (cxd& x : v) x *= factor;
            break;
        }
    }
    return v;
}

EigenDecomposition eig_hermitian(const HermitianOperator& h) {
    const std::size_t n = h.dim();
    ComplexMatrix a = h.matrix();
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double tol = 1e-14;
    const int max_sweeps = 100;
    bool converged = (n == 1);

    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a.at(p, q)));
        if (off < tol) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cxd apq = a.at(p, q);
                const double absb = std::abs(apq);
                if (absb == 0.0) continue;
                const cxd phi = apq / absb; // e^{i phase}
                const double app = a.at(p, p).real();
                const double aqq = a.at(q, q).real();
                // Zeroing (p,q) solves t^2 - 2 tau t - 1 = 0; take the
                // smaller-magnitude root for stability.
                const double tau = (aqq - app) / (2.0 * absb);
                const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cxd s_phi = s * phi;             // s e^{i phase}
                const cxd s_phi_c = s * std::conj(phi); // s e^{-i phase}

                // Columns p, q of A and V (right-multiplication by the rotation).
                for (std::size_t i = 0; i < n; ++i) {
                    const cxd aip = a.at(i, p), aiq = a.at(i, q);
                    a.at(i, p) = c * aip + s_phi_c * aiq;
                    a.at(i, q) = -s_phi * aip + c * aiq;
                    const cxd vip = v.at(i, p), viq = v.at(i, q);
                    v.at(i, p) = c * vip + s_phi_c * viq;
                    v.at(i, q) = -s_phi * vip + c * viq;
                }
                // Rows p, q of A (left-multiplication by the adjoint rotation).
                for (std::size_t j = 0; j < n; ++j) {
                    const cxd apj = a.at(p, j), aqj = a.at(q, j);
                    a.at(p, j) = c * apj + s_phi * aqj;
                    a.at(q, j) = -s_phi_c * apj + c * aqj;
                }
                a.at(p, q) = 0.0;
                a.at(q, p) = 0.0;
                a.at(p, p) = a.at(p, p).real();
                a.at(q, q) = a.at(q, q).real();
            }
        }
    }

    if (!converged) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a.at(p, q)));
        if (off >= tol) throw numeric_error("eig: Jacobi did not converge in 100 sweeps");
    }

    struct Pair {
        double value;
        std::vector<cxd> vec;
    };
    std::vector<Pair> pairs(n);
    for (std::size_t k = 0; k < n; ++k) {
        pairs[k].value = a.at(k, k).real();
        pairs[k].vec.resize(n);
        for (std::size_t i = 0; i < n; ++i) pairs[k].vec[i] = v.at(i, k);
        pairs[k].vec = phase_fixed(std::move(pairs[k].vec));
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        if (x.value != y.value) return x.value < y.value;
        return lex_less(x.vec, y.vec);
    });

    EigenDecomposition out;
    out.eigenvalues.reserve(n);
    out.eigenvectors.reserve(n);
    for (Pair& p : pairs) {
        out.eigenvalues.push_back(p.value);
        out.eigenvectors.push_back(StateVector::unnormalized(std::move(p.vec)));
    }
    return out;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    check_dim(a.dim() * b.dim(), "tensor");
    std::vector<cxd> out(a.dim() * b.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < b.dim(); ++j) out[i * b.dim() + j] = a[i] * b[j];
    return StateVector::unnormalized(std::move(out));
}

namespace {

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_dim(a.dim() * b.dim(), "tensor");
    std::size_t n = a.dim() * b.dim();
    ComplexMatrix c(n);
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            for (std::size_t k = 0; k < b.dim(); ++k)
                for (std::size_t l = 0; l < b.dim(); ++l)
                    c.at(i * b.dim() + k, j * b.dim() + l) = a.at(i, j) * b.at(k, l);
    return c;
}

} // namespace

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(kron(a.matrix(), b.matrix()));
}

UnitaryOperator tensor(const UnitaryOperator& a, const UnitaryOperator& b) {
    return UnitaryOperator(kron(a.matrix(), b.matrix()));
}

int schmidt_rank(const StateVector& state, std::size_t dim_a, std::size_t dim_b) {
    if (dim_a * dim_b != state.dim()) {
        throw validation_error("schmidt_rank: dim_a * dim_b != state dimension");
    }
    // One-sided Jacobi SVD of the dim_a x dim_b amplitude matrix: rotate
    // column pairs until mutually orthogonal, then the singular values are
    // the column norms. Accurate for tiny singular values, which the 1e-10
    // threshold needs (a Gram-matrix route would bottom out near sqrt(eps)).
    std::vector<std::vector<cxd>> cols(dim_b, std::vector<cxd>(dim_a));
    for (std::size_t j = 0; j < dim_b; ++j)
        for (std::size_t i = 0; i < dim_a; ++i) cols[j][i] = state[i * dim_b + j];

    auto col_dot = [&](std::size_t p, std::size_t q) {
        cxd s = 0.0;
        for (std::size_t i = 0; i < dim_a; ++i) s += std::conj(cols[p][i]) * cols[q][i];
        return s;
    };

    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < dim_b; ++p) {
            for (std::size_t q = p + 1; q < dim_b; ++q) {
                double gpp = col_dot(p, p).real();
                double gqq = col_dot(q, q).real();
                cxd gpq = col_dot(p, q);
                double absb = std::abs(gpq);
                if (absb <= 1e-15 * std::sqrt(gpp * gqq) || absb == 0.0) continue;
                rotated = true;
                const cxd phi = gpq / absb;
                const double tau = (gqq - gpp) / (2.0 * absb);
                const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                              : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cxd s_phi = s * phi;
                const cxd s_phi_c = s * std::conj(phi);
                for (std::size_t i = 0; i < dim_a; ++i) {
                    const cxd cp = cols[p][i], cq = cols[q][i];
                    cols[p][i] = c * cp + s_phi_c * cq;
                    cols[q][i] = -s_phi * cp + c * cq;
                }
            }
        }
        if (!rotated) break;
    }

    int rank = 0;
    for (std::size_t j = 0; j < dim_b; ++j) {
        if (std::sqrt(col_dot(j, j).real()) > 1e-10) ++rank;
    }
    return rank;
}

StateVector apply(const HermitianOperator& a, const StateVector& v) {
    return StateVector::unnormalized(matvec(a.matrix(), v.amplitudes()));
}

StateVector apply(const UnitaryOperator& a, const StateVector& v) {
    return StateVector::unnormalized(matvec(a.matrix(), v.amplitudes()));
}

HermitianOperator conjugated(const UnitaryOperator& w, const HermitianOperator& h) {
    ComplexMatrix m = mul(mul(w.matrix(), h.matrix()), adjoint(w.matrix()));
    return HermitianOperator(scaled(add(m, adjoint(m)), 0.5));
}

} // namespace qtick
