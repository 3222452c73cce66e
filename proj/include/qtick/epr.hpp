#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qtick/automaton.hpp"
#include "qtick/qla.hpp"

namespace qtick {

enum class EprTopology { ElectronFirst, PositronFirst };
enum class TestedParticle { Electron, Positron };

const char* to_string(EprTopology t);

struct EprConfig {
    AxisVector axis_b{0.0, 0.0, 1.0}; // observer O1, electron
    AxisVector axis_c{0.0, 0.0, 1.0}; // observer O2, positron
    EprTopology topology = EprTopology::ElectronFirst;
    unsigned runs = 1;
    std::uint64_t seed = 0;
};

// The first-tick test: a primary single-particle operator plus the null
// sub-operator that forces total-spin conservation. Outcomes are the two
// simultaneous eigenstates, both product states.
struct ConstrainedTest {
    HermitianOperator primary_op; // (sigma.b (x) I) or (I (x) sigma.b)
    HermitianOperator null_op;    // sigma_total(b)
    // (eigenvalue, product state) pairs, eigenvalue -1 entry first.
    std::array<std::pair<double, StateVector>, 2> outcomes;
};

struct EprRunRecord {
    int electron_sign;
    int positron_sign;
    std::pair<std::string, std::string> tick_order;
    std::vector<QTickRecord> ticks; // exactly two
};

// P(electron_sign, positron_sign); index 0 = +1, index 1 = -1.
struct JointTable {
    std::array<std::array<double, 2>, 2> p{};

    double at(int electron_sign, int positron_sign) const {
        return p[electron_sign > 0 ? 0 : 1][positron_sign > 0 ? 0 : 1];
    }
    double sum() const;
};

// (|ud> - |du>)/sqrt(2): amplitudes (0, 1/sqrt(2), -1/sqrt(2), 0) with the
// electron as the left (slow) factor.
StateVector make_singlet();

// (sigma.a)(x)I + I(x)(sigma.a), 4x4.
HermitianOperator sigma_total(const AxisVector& a);

// Sum_i (sigma_i (x) I + I (x) sigma_i)^2. Singlet eigenvalue 0, triplet 8.
HermitianOperator s_squared();

// Solves the two eigenvalue constraints numerically: diagonalize the primary
// operator, restrict the null operator to each +-1 eigenspace, and pick the
// eigenvalue-zero vector (tolerance 1e-9).
ConstrainedTest constrained_test(const AxisVector& b, TestedParticle tested);

// Two q-ticks per run: the constrained test on the first particle splits
// the singlet into factor events; the remaining factor then meets the other
// observer's plain single-particle test.
std::vector<EprRunRecord> run_epr(const EprConfig& cfg, unsigned threads = 1);

// Exhaustive enumeration over both ticks' outcome sets; the analytic oracle
// for run_epr. Independent of topology to 1e-14.
JointTable exact_joint(const AxisVector& b, const AxisVector& c, EprTopology topology);

// E = sum s_e s_p P(s_e, s_p); equals -b.c.
double correlation(const AxisVector& b, const AxisVector& c);

// S = E(b,c) - E(b,c') + E(b',c) + E(b',c').
double chsh(const AxisVector& b, const AxisVector& b2, const AxisVector& c,
            const AxisVector& c2);

} // namespace qtick
