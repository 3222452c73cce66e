#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qtick/json_io.hpp"
#include "qtick/render.hpp"
#include "qtick/udl.hpp"

namespace py = pybind11;
using namespace qtick;

namespace {

HermitianOperator hermitian_from_rows(const std::vector<std::vector<cxd>>& rows) {
    std::size_t n = rows.size();
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw validation_error("operator rows must form a square");
        for (std::size_t j = 0; j < n; ++j) m.at(i, j) = rows[i][j];
    }
    return HermitianOperator(std::move(m));
}

UnitaryOperator unitary_from_rows(const std::vector<std::vector<cxd>>& rows) {
    std::size_t n = rows.size();
    ComplexMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw validation_error("operator rows must form a square");
        for (std::size_t j = 0; j < n; ++j) m.at(i, j) = rows[i][j];
    }
    return UnitaryOperator(std::move(m));
}

std::vector<std::vector<cxd>> rows_of(const ComplexMatrix& m) {
    std::vector<std::vector<cxd>> rows(m.dim(), std::vector<cxd>(m.dim()));
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) rows[i][j] = m.at(i, j);
    return rows;
}

EprTopology topology_from(const std::string& name) {
    if (name == "electron_first") return EprTopology::ElectronFirst;
    if (name == "positron_first") return EprTopology::PositronFirst;
    throw validation_error("topology must be electron_first or positron_first");
}

TestedParticle particle_from(const std::string& name) {
    if (name == "electron") return TestedParticle::Electron;
    if (name == "positron") return TestedParticle::Positron;
    throw validation_error("particle must be electron or positron");
}

py::dict record_dict(const QTickRecord& r) {
    py::dict d;
    d["test"] = r.test_id;
    d["inputs"] = r.input_event_ids;
    d["eigenvalue"] = r.outcome_eigenvalue;
    d["probability"] = r.outcome_probability;
    d["draw"] = r.rng_draw;
    d["outcome"] = r.outcome_state.amplitudes();
    return d;
}

const udl::Block& pick_block(const udl::UdlDocument& doc, udl::BlockKind kind,
                             const std::string& name) {
    const udl::Block* block = name.empty() ? doc.find(kind) : doc.find(kind, name);
    if (!block)
        throw validation_error(std::string("document has no matching ") + udl::to_string(kind) +
                               " block");
    return *block;
}

} // namespace

PYBIND11_MODULE(_qtick, m) {
    m.doc() = "quantum automaton toolkit: q-tick engine, toy universe, pair "
              "experiments, picture checks, UDL parsing and DOT rendering";

    // Translators run newest-first: register the base before the derived
    // class so parse errors surface as ParseError, not the generic wrapper.
    py::register_exception<error>(m, "QtickError", PyExc_RuntimeError);
    py::register_exception<udl::parse_error>(m, "ParseError", PyExc_ValueError);

    py::class_<AxisVector>(m, "AxisVector")
        .def(py::init<double, double, double>())
        .def_static("normalized", &AxisVector::normalized)
        .def_property_readonly("x", &AxisVector::x)
        .def_property_readonly("y", &AxisVector::y)
        .def_property_readonly("z", &AxisVector::z)
        .def("dot", &AxisVector::dot);

    py::class_<StateVector>(m, "StateVector")
        .def(py::init<std::vector<cxd>>())
        .def_static("unnormalized", &StateVector::unnormalized)
        .def_property_readonly("dim", &StateVector::dim)
        .def_property_readonly("amplitudes",
                               [](const StateVector& s) { return s.amplitudes(); })
        .def("norm", &StateVector::norm)
        .def("normalized", &StateVector::normalized);

    py::class_<HermitianOperator>(m, "HermitianOperator")
        .def(py::init(&hermitian_from_rows))
        .def_property_readonly("dim", &HermitianOperator::dim)
        .def_property_readonly("rows",
                               [](const HermitianOperator& h) { return rows_of(h.matrix()); });

    py::class_<UnitaryOperator>(m, "UnitaryOperator")
        .def(py::init(&unitary_from_rows))
        .def_property_readonly("dim", &UnitaryOperator::dim)
        .def_property_readonly("rows",
                               [](const UnitaryOperator& u) { return rows_of(u.matrix()); });

    m.def("pauli_x", &pauli_x);
    m.def("pauli_y", &pauli_y);
    m.def("pauli_z", &pauli_z);
    m.def("pauli_dot", &pauli_dot, py::arg("axis"));
    m.def("su2_from", &su2_from, py::arg("axis"), py::arg("angle"));
    m.def(
        "eig_hermitian",
        [](const HermitianOperator& h) {
            EigenDecomposition eig = eig_hermitian(h);
            std::vector<std::vector<cxd>> vectors;
            vectors.reserve(eig.eigenvectors.size());
            for (const StateVector& v : eig.eigenvectors) vectors.push_back(v.amplitudes());
            return py::make_tuple(eig.eigenvalues, vectors);
        },
        py::arg("operator"), "ascending eigenvalues and the matching orthonormal eigenvectors");
    m.def("tensor", py::overload_cast<const StateVector&, const StateVector&>(&tensor));
    m.def("tensor",
          py::overload_cast<const HermitianOperator&, const HermitianOperator&>(&tensor));
    m.def("tensor", py::overload_cast<const UnitaryOperator&, const UnitaryOperator&>(&tensor));
    m.def("schmidt_rank", &schmidt_rank, py::arg("state"), py::arg("dim_a"), py::arg("dim_b"));
    m.def("apply", py::overload_cast<const HermitianOperator&, const StateVector&>(&apply));
    m.def("apply", py::overload_cast<const UnitaryOperator&, const StateVector&>(&apply));

    m.def(
        "enumerate_outcomes",
        [](const HermitianOperator& h, const StateVector& psi) {
            py::list out;
            for (const Outcome& o : enumerate_outcomes(h, psi))
                out.append(py::make_tuple(o.eigenvalue, o.state.amplitudes(), o.probability));
            return out;
        },
        py::arg("operator"), py::arg("state"));
    m.def(
        "perform_test",
        [](const HermitianOperator& h, const StateVector& psi, std::uint64_t seed) {
            SeededRng rng(seed);
            return record_dict(perform_test(Test{"test", {h}, {}, Stage::Active}, psi, rng));
        },
        py::arg("operator"), py::arg("state"), py::arg("seed"));
    m.def(
        "null_test", [](const StateVector& psi) { return record_dict(null_test(psi)); },
        py::arg("state"));

    m.def("make_singlet", &make_singlet);
    m.def("sigma_total", &sigma_total, py::arg("axis"));
    m.def("s_squared", &s_squared);
    m.def(
        "constrained_test",
        [](const AxisVector& b, const std::string& particle) {
            ConstrainedTest ct = constrained_test(b, particle_from(particle));
            py::dict d;
            d["eigenvalues"] =
                std::vector<double>{ct.outcomes[0].first, ct.outcomes[1].first};
            d["outcomes"] = std::vector<std::vector<cxd>>{
                ct.outcomes[0].second.amplitudes(), ct.outcomes[1].second.amplitudes()};
            return d;
        },
        py::arg("axis"), py::arg("particle"));
    m.def(
        "exact_joint",
        [](const AxisVector& b, const AxisVector& c, const std::string& topology) {
            JointTable t = exact_joint(b, c, topology_from(topology));
            return std::vector<std::vector<double>>{{t.p[0][0], t.p[0][1]},
                                                    {t.p[1][0], t.p[1][1]}};
        },
        py::arg("b"), py::arg("c"), py::arg("topology") = "electron_first");
    m.def("correlation", &correlation, py::arg("b"), py::arg("c"));
    m.def("chsh", &chsh, py::arg("b"), py::arg("b2"), py::arg("c"), py::arg("c2"));
    m.def(
        "run_epr",
        [](const AxisVector& b, const AxisVector& c, const std::string& topology,
           unsigned runs, std::uint64_t seed, unsigned threads) {
            EprConfig cfg{b, c, topology_from(topology), runs, seed};
            py::list out;
            for (const EprRunRecord& r : run_epr(cfg, threads))
                out.append(py::make_tuple(r.electron_sign, r.positron_sign));
            return out;
        },
        py::arg("b"), py::arg("c"), py::arg("topology") = "electron_first",
        py::arg("runs") = 1000, py::arg("seed") = 0, py::arg("threads") = 1);

    // UDL-level entry points mirror the command line; aggregates come back
    // as JSON strings.
    m.def("parse_udl", [](const std::string& text) { return udl::serialize(udl::parse(text)); },
          py::arg("text"), "parse and return the canonical form");
    m.def(
        "toy_run",
        [](const std::string& text, const std::string& name,
           std::optional<std::uint64_t> seed) {
            udl::UdlDocument doc = udl::parse(text);
            ToyConfig cfg = udl::toy_config_from(pick_block(doc, udl::BlockKind::Toy, name));
            if (seed) cfg.seed = *seed;
            return toy_run_json(cfg, run_toy(cfg)).dump();
        },
        py::arg("text"), py::arg("name") = "", py::arg("seed") = std::nullopt);
    m.def(
        "toy_enumerate",
        [](const std::string& text, unsigned depth, const std::string& name) {
            udl::UdlDocument doc = udl::parse(text);
            ToyConfig cfg = udl::toy_config_from(pick_block(doc, udl::BlockKind::Toy, name));
            return toy_tree_json(cfg, enumerate_tree(cfg, depth)).dump();
        },
        py::arg("text"), py::arg("depth"), py::arg("name") = "");
    m.def(
        "epr_run_file",
        [](const std::string& text, const std::string& name, std::optional<std::uint64_t> seed,
           bool records, unsigned threads) {
            udl::UdlDocument doc = udl::parse(text);
            EprConfig cfg = udl::epr_config_from(pick_block(doc, udl::BlockKind::Epr, name));
            if (seed) cfg.seed = *seed;
            return epr_run_json(cfg, run_epr(cfg, threads), records).dump();
        },
        py::arg("text"), py::arg("name") = "", py::arg("seed") = std::nullopt,
        py::arg("records") = false, py::arg("threads") = 1);
    m.def(
        "decay_check",
        [](const std::string& text, const std::string& name) {
            udl::UdlDocument doc = udl::parse(text);
            DecayProblem p =
                udl::decay_problem_from(pick_block(doc, udl::BlockKind::Decay, name));
            PictureReport rep = compare_pictures(p);
            py::dict d;
            d["schrodinger"] = rep.schrodinger;
            d["heisenberg"] = rep.heisenberg;
            if (rep.qtick) d["qtick"] = *rep.qtick;
            d["max_delta"] = rep.max_delta;
            return d;
        },
        py::arg("text"), py::arg("name") = "");
    m.def("render_figure",
          [](const std::string& name) { return to_dot(builtin_figure(name)); });
    m.def(
        "render_udl",
        [](const std::string& text, const std::string& name) {
            udl::UdlDocument doc = udl::parse(text);
            return to_dot(udl::graph_from(pick_block(doc, udl::BlockKind::Diagram, name)));
        },
        py::arg("text"), py::arg("name") = "");
    m.def("builtin_figures", [] { return builtin_figure_names(); });

    m.attr("__version__") = "0.1.0";
}
