// Acceptance suite: every release gate in one binary, one line per check.
// Exit status is the number of failed checks.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qtick/epr.hpp"
#include "qtick/pictures.hpp"
#include "qtick/render.hpp"
#include "qtick/toy.hpp"
#include "qtick/udl.hpp"
#include "support.hpp"

using namespace qtick;
using test::fidelity;
using test::random_axis;
using test::random_hermitian;
using test::random_state;
using test::random_unitary;

namespace {

int failures = 0;

void report(int index, bool ok, const std::string& label, const std::string& detail = "") {
    std::printf("[%2d] %s  %s%s%s\n", index, ok ? "PASS" : "FAIL", label.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 1. Default incommensurate laws: exactly 2^n unpruned leaves for n = 1..12,
//    leaf probabilities summing to one within 1e-12 at every depth.
void criterion_branch_count() {
    ToyConfig cfg;
    bool ok = true;
    std::string detail;
    for (unsigned depth = 1; depth <= 12 && ok; ++depth) {
        HistoryTree tree = enumerate_tree(cfg, depth);
        auto leaves = tree.leaves();
        double mass = 0.0;
        for (const auto& leaf : leaves) mass += leaf.probability;
        if (leaves.size() != (1ull << depth) || tree.pruned_branches != 0 ||
            std::abs(mass - 1.0) > 1e-12) {
            ok = false;
            detail = "depth " + std::to_string(depth) + ": " + std::to_string(leaves.size()) +
                     " leaves, mass err " + std::to_string(std::abs(mass - 1.0));
        }
    }
    report(1, ok, "toy branch count 2^n with unit mass (n=1..12)", detail);
}

// 2. Along every branch to depth 8 the test operator keeps eigenvalues
//    {-1,+1} and the recorded state solves its eigenvalue equation.
void criterion_branch_eigenstructure() {
    ToyConfig cfg;
    HistoryTree tree = enumerate_tree(cfg, 8);
    bool ok = true;
    for (const HistoryNode& node : tree.nodes) {
        HermitianOperator sigma{ComplexMatrix(2, node.sigma)};
        EigenDecomposition eig = eig_hermitian(sigma);
        if (std::abs(eig.eigenvalues[0] + 1.0) > 1e-10 ||
            std::abs(eig.eigenvalues[1] - 1.0) > 1e-10) {
            ok = false;
            break;
        }
        StateVector psi = StateVector::unnormalized(node.psi);
        StateVector mapped = apply(sigma, psi);
        double resid = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            resid += std::norm(mapped[i] - static_cast<double>(node.lambda) * psi[i]);
        if (std::sqrt(resid) > 1e-10) {
            ok = false;
            break;
        }
    }
    report(2, ok, "toy eigenstructure holds on every branch to depth 8");
}

// 3. The numerically solved constrained test matches the product-state
//    solution up to phase; singlet outcome probabilities are one half.
void criterion_constrained_test() {
    SeededRng rng(301);
    bool ok = true;
    std::string detail;
    StateVector singlet = make_singlet();
    for (int k = 0; k < 100 && ok; ++k) {
        AxisVector b = random_axis(rng);
        ConstrainedTest ct = constrained_test(b, TestedParticle::Electron);
        EigenDecomposition eig = eig_hermitian(pauli_dot(b));
        StateVector expect_plus = tensor(eig.eigenvectors[1], eig.eigenvectors[0]);
        StateVector expect_minus = tensor(eig.eigenvectors[0], eig.eigenvectors[1]);
        double f_plus = fidelity(ct.outcomes[1].second, expect_plus);
        double f_minus = fidelity(ct.outcomes[0].second, expect_minus);
        if (f_plus < 1.0 - 1e-10 || f_minus < 1.0 - 1e-10) {
            ok = false;
            detail = "fidelity " + std::to_string(std::min(f_plus, f_minus));
        }
        for (const auto& [eigenvalue, state] : ct.outcomes) {
            (void)eigenvalue;
            if (std::abs(std::norm(inner(state, singlet)) - 0.5) > 1e-12) {
                ok = false;
                detail = "singlet probability off";
            }
        }
    }
    report(3, ok, "constrained test solves the product outcomes, half/half on the singlet",
           detail);
}

// 4. E(b,c) = -b.c to 1e-12 on 1000 random pairs; CHSH at the standard
//    coplanar settings reaches 2 sqrt(2) within 1e-9.
void criterion_correlation() {
    SeededRng rng(401);
    bool ok = true;
    std::string detail;
    for (int k = 0; k < 1000 && ok; ++k) {
        AxisVector b = random_axis(rng);
        AxisVector c = random_axis(rng);
        double err = std::abs(correlation(b, c) + b.dot(c));
        if (err > 1e-12) {
            ok = false;
            detail = "correlation err " + std::to_string(err);
        }
    }
    auto tilt = [](double theta) { return AxisVector(std::sin(theta), 0.0, std::cos(theta)); };
    double s = chsh(tilt(0.0), tilt(M_PI / 2.0), tilt(M_PI / 4.0), tilt(3.0 * M_PI / 4.0));
    if (std::abs(std::abs(s) - 2.0 * std::sqrt(2.0)) > 1e-9) {
        ok = false;
        detail = "CHSH " + std::to_string(s);
    }
    report(4, ok, "correlation law E = -b.c and CHSH = 2*sqrt(2)", detail);
}

// 5. Both topologies produce the same exact table to 1e-14; sampled
//    frequencies at 1e5 runs sit within three binomial standard errors.
void criterion_topology_equivalence() {
    SeededRng rng(501);
    bool ok = true;
    std::string detail;
    for (int k = 0; k < 100 && ok; ++k) {
        AxisVector b = random_axis(rng);
        AxisVector c = random_axis(rng);
        JointTable ef = exact_joint(b, c, EprTopology::ElectronFirst);
        JointTable pf = exact_joint(b, c, EprTopology::PositronFirst);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (std::abs(ef.p[i][j] - pf.p[i][j]) > 1e-14) {
                    ok = false;
                    detail = "table mismatch";
                }
    }

    EprConfig cfg;
    cfg.axis_b = AxisVector::normalized(0.3, 0.2, 0.93);
    cfg.axis_c = AxisVector::normalized(-0.5, 0.8, 0.1);
    cfg.runs = 100000;
    cfg.seed = 20250505;
    JointTable exact = exact_joint(cfg.axis_b, cfg.axis_c, EprTopology::ElectronFirst);
    for (EprTopology topo : {EprTopology::ElectronFirst, EprTopology::PositronFirst}) {
        cfg.topology = topo;
        auto records = run_epr(cfg, 4);
        std::array<std::array<double, 2>, 2> counts{};
        for (const EprRunRecord& r : records)
            counts[r.electron_sign > 0 ? 0 : 1][r.positron_sign > 0 ? 0 : 1] += 1.0;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                double p = exact.p[i][j];
                double freq = counts[i][j] / cfg.runs;
                double se = std::sqrt(std::max(p * (1.0 - p), 1e-12) / cfg.runs);
                if (std::abs(freq - p) > 3.0 * se) {
                    ok = false;
                    detail = "sampled cell off by " + std::to_string(std::abs(freq - p)) +
                             " (3se = " + std::to_string(3.0 * se) + ")";
                }
            }
        }
    }
    report(5, ok, "6a/6b topology equivalence, exact and sampled", detail);
}

// 6. fig5 fails with exactly the entangled-multi-test violation; every other
//    built-in figure validates cleanly.
void criterion_veto() {
    bool ok = true;
    std::string detail;
    for (const std::string& name : builtin_figure_names()) {
        ValidationReport report_ = validate_graph(builtin_figure(name));
        if (name == "fig5") {
            if (report_.size() != 1 || report_[0].kind != ViolationKind::EntangledMultiTest) {
                ok = false;
                detail = "fig5 produced " + std::to_string(report_.size()) + " violations";
            }
        } else if (!report_.empty()) {
            ok = false;
            detail = name + ": " + report_.front().message;
        }
    }
    report(6, ok, "entanglement-principle veto fires exactly on fig5", detail);
}

// 7. Schrodinger / Heisenberg / q-tick probabilities agree within 1e-9 for
//    1000 random problems, dims 2 and 4, N in {1, 10, 100, 1000}.
void criterion_pictures() {
    SeededRng rng(701);
    const unsigned steps[] = {1, 10, 100, 1000};
    bool ok = true;
    std::string detail;
    for (int k = 0; k < 1000 && ok; ++k) {
        std::size_t dim = (k % 2 == 0) ? 2 : 4;
        HermitianOperator lambda_op = random_hermitian(rng, dim);
        EigenDecomposition eig = eig_hermitian(lambda_op);
        DecayProblem p = DecayProblem::with_steps(
            random_state(rng, dim), lambda_op, eig.eigenvalues[rng.next_u64() % dim],
            random_unitary(rng, dim), steps[k % 4]);
        PictureReport rep = compare_pictures(p);
        if (rep.max_delta > 1e-9) {
            ok = false;
            detail = "delta " + std::to_string(rep.max_delta);
        }
    }
    report(7, ok, "picture equivalence within 1e-9 over 1000 problems", detail);
}

// 8. Null tests return the input with probability exactly one.
void criterion_null_test() {
    SeededRng rng(801);
    bool ok = true;
    for (int k = 0; k < 100; ++k) {
        StateVector psi = random_state(rng, 2 + (k % 3));
        QTickRecord rec = null_test(psi);
        if (rec.outcome_probability != 1.0 ||
            std::abs(fidelity(rec.outcome_state, psi) - 1.0) > 1e-12) {
            ok = false;
            break;
        }
    }
    report(8, ok, "null test returns the input with probability one");
}

// 9. Sampled lambda-sequence frequencies at depth 4 track the enumerated
//    path probabilities within three sigma over 1e5 runs.
void criterion_monte_carlo() {
    ToyConfig cfg;
    cfg.steps = 4;
    HistoryTree tree = enumerate_tree(cfg, 4);
    auto leaves = tree.leaves();

    const int n = 100000;
    std::map<std::vector<int>, int> counts;
    for (int k = 0; k < n; ++k) {
        cfg.seed = derive_seed(9001, static_cast<std::uint64_t>(k));
        ToyRun run = run_toy(cfg);
        std::vector<int> seq;
        for (const QTickRecord& r : run.ticks)
            seq.push_back(r.outcome_eigenvalue > 0.0 ? +1 : -1);
        ++counts[seq];
    }
    bool ok = true;
    std::string detail;
    for (const auto& leaf : leaves) {
        double p = leaf.probability;
        double freq = static_cast<double>(counts[leaf.lambdas]) / n;
        double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
        if (std::abs(freq - p) > 3.0 * sigma) {
            ok = false;
            detail = "path off by " + std::to_string(std::abs(freq - p)) +
                     " (3sigma = " + std::to_string(3.0 * sigma) + ")";
        }
    }
    report(9, ok, "run_toy frequencies match the depth-4 tree within 3 sigma", detail);
}

// 10. UDL round trip on the corpus, a 1e4-input fuzz pass with structured
//     failures only, and byte-stable DOT goldens across consecutive runs.
void criterion_parser_renderer() {
    namespace fs = std::filesystem;
    bool ok = true;
    std::string detail;

    for (const auto& entry : fs::directory_iterator(QTICK_FIXTURE_DIR)) {
        if (entry.path().extension() != ".udl") continue;
        try {
            udl::UdlDocument doc = udl::parse(slurp(entry.path()));
            std::string canon = udl::serialize(doc);
            if (!udl::structurally_equal(doc, udl::parse(canon)) ||
                udl::serialize(udl::parse(canon)) != canon) {
                ok = false;
                detail = "round trip failed: " + entry.path().filename().string();
            }
        } catch (const udl::parse_error& e) {
            ok = false;
            detail = entry.path().filename().string() + ": " + e.what();
        }
    }

    SeededRng rng(20250808);
    const char* vocab[] = {"toy",     "epr",  "decay", "diagram", "event", "test",
                           "complex", "{",    "}",     "(",       ")",     "[",
                           "]",       "=",    "->",    "--",      "=>",    ",",
                           "su2",     "axis", "angle", "1.5",     "+1",    "-3",
                           "1e9",     "#",    "\n",    "name",    "0.5"};
    for (int iter = 0; iter < 10000 && ok; ++iter) {
        std::string input;
        if (iter % 2 == 0) {
            std::size_t len = rng.next_u64() % 4096;
            input.reserve(len);
            for (std::size_t i = 0; i < len; ++i)
                input.push_back(static_cast<char>(rng.next_u64() & 0xff));
        } else {
            std::size_t count = rng.next_u64() % 300;
            for (std::size_t i = 0; i < count; ++i) {
                input += vocab[rng.next_u64() % (sizeof(vocab) / sizeof(vocab[0]))];
                input += ' ';
            }
        }
        try {
            udl::UdlDocument doc = udl::parse(input);
            (void)udl::serialize(doc);
        } catch (const udl::parse_error&) {
            // structured failure
        } catch (...) {
            ok = false;
            detail = "fuzz iteration " + std::to_string(iter) + " escaped the parser errors";
        }
    }

    for (const std::string& name : builtin_figure_names()) {
        if (name == "fig5") continue;
        std::string first = to_dot(builtin_figure(name));
        std::string second = to_dot(builtin_figure(name));
        std::string golden = slurp(fs::path(QTICK_FIXTURE_DIR) / "golden" / (name + ".dot"));
        if (first != second || first != golden) {
            ok = false;
            detail = "DOT instability in " + name;
        }
    }

    report(10, ok, "UDL round trip, fuzz pass, stable DOT goldens", detail);
}

} // namespace

int main() {
    criterion_branch_count();
    criterion_branch_eigenstructure();
    criterion_constrained_test();
    criterion_correlation();
    criterion_topology_equivalence();
    criterion_veto();
    criterion_pictures();
    criterion_null_test();
    criterion_monte_carlo();
    criterion_parser_renderer();
    std::printf("acceptance: %d/10 passed\n", 10 - failures);
    return failures;
}
