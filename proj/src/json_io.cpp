#include "qtick/json_io.hpp"

#include <cmath>

namespace qtick {

namespace {

json axis_json(const AxisVector& a) {
    return json::array({a.x(), a.y(), a.z()});
}

json su2_json(const Su2Params& p) {
    return json{{"axis", axis_json(p.axis)}, {"angle", p.angle}};
}

} // namespace

json to_json(const StateVector& s) {
    json out = json::array();
    for (const cxd& a : s.amplitudes()) out.push_back(json::array({a.real(), a.imag()}));
    return out;
}

json to_json(const QTickRecord& r) {
    return json{{"test", r.test_id},
                {"inputs", r.input_event_ids},
                {"eigenvalue", r.outcome_eigenvalue},
                {"probability", r.outcome_probability},
                {"draw", r.rng_draw},
                {"outcome", to_json(r.outcome_state)}};
}

json to_json(const ProcessGraph& g) {
    json events = json::array();
    for (const Event& e : g.events) {
        events.push_back(json{{"id", e.id},
                              {"stage", to_string(e.stage)},
                              {"dims", e.factor_dims},
                              {"amplitudes", e.state ? to_json(*e.state) : json(nullptr)}});
    }
    json tests = json::array();
    for (const Test& t : g.tests) {
        tests.push_back(json{{"id", t.id},
                             {"stage", to_string(t.stage)},
                             {"dim", t.operators.empty() ? 0 : t.operators.front().dim()},
                             {"operators", t.operators.size()}});
    }
    json complexes = json::array();
    for (const ComplexNode& c : g.complexes)
        complexes.push_back(json{{"id", c.id}, {"stage", to_string(c.stage)}});
    json edges = json::array();
    for (const GraphEdge& e : g.edges) {
        json edge{{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}};
        if (!e.label.empty()) edge["label"] = e.label;
        edges.push_back(std::move(edge));
    }
    return json{{"events", std::move(events)},
                {"tests", std::move(tests)},
                {"complexes", std::move(complexes)},
                {"edges", std::move(edges)}};
}

json graph_with_ticks(const ProcessGraph& g, const std::vector<QTickRecord>& ticks) {
    json out = to_json(g);
    json t = json::array();
    for (const QTickRecord& r : ticks) t.push_back(to_json(r));
    out["ticks"] = std::move(t);
    return out;
}

json to_json(const ToyConfig& cfg) {
    return json{{"axis_a", axis_json(cfg.axis_a)},
                {"lambda0", cfg.lambda0},
                {"U", su2_json(cfg.u_params)},
                {"V", su2_json(cfg.v_params)},
                {"steps", cfg.steps},
                {"seed", cfg.seed}};
}

json toy_run_json(const ToyConfig& cfg, const ToyRun& run) {
    json ticks = json::array();
    for (const QTickRecord& r : run.ticks) ticks.push_back(to_json(r));
    return json{{"config", to_json(cfg)},
                {"final", json{{"n", run.final_state.n},
                               {"lambda", run.final_state.lambda_n},
                               {"psi", to_json(run.final_state.psi_n)}}},
                {"ticks", std::move(ticks)}};
}

json toy_tree_json(const ToyConfig& cfg, const HistoryTree& tree) {
    json leaves = json::array();
    for (const HistoryLeaf& leaf : tree.leaves())
        leaves.push_back(json{{"lambdas", leaf.lambdas}, {"prob", leaf.probability}});
    return json{{"config", to_json(cfg)},
                {"depth", tree.depth},
                {"leaves", std::move(leaves)},
                {"pruned", tree.pruned_branches}};
}

json to_json(const EprConfig& cfg) {
    return json{{"axis_b", axis_json(cfg.axis_b)},
                {"axis_c", axis_json(cfg.axis_c)},
                {"topology", to_string(cfg.topology)},
                {"runs", cfg.runs},
                {"seed", cfg.seed}};
}

json to_json(const JointTable& t) {
    // Rows: electron sign (+1 then -1); columns: positron sign.
    return json::array({json::array({t.p[0][0], t.p[0][1]}),
                        json::array({t.p[1][0], t.p[1][1]})});
}

json epr_run_json(const EprConfig& cfg, const std::vector<EprRunRecord>& records,
                  bool include_runs) {
    JointTable exact = exact_joint(cfg.axis_b, cfg.axis_c, cfg.topology);
    double exact_e = exact.at(+1, +1) - exact.at(+1, -1) - exact.at(-1, +1) + exact.at(-1, -1);

    std::array<std::array<unsigned long long, 2>, 2> counts{};
    for (const EprRunRecord& r : records)
        ++counts[r.electron_sign > 0 ? 0 : 1][r.positron_sign > 0 ? 0 : 1];
    const double n = static_cast<double>(records.size());
    double e_hat = (static_cast<double>(counts[0][0]) - static_cast<double>(counts[0][1]) -
                    static_cast<double>(counts[1][0]) + static_cast<double>(counts[1][1])) /
                   n;
    // Standard error of a mean of +-1 observations.
    double se = std::sqrt(std::max(0.0, 1.0 - e_hat * e_hat) / n);

    json out{{"config", to_json(cfg)},
             {"exact", json{{"table", to_json(exact)}, {"E", exact_e}}},
             {"sampled", json{{"counts", json::array({json::array({counts[0][0], counts[0][1]}),
                                                      json::array({counts[1][0], counts[1][1]})})},
                              {"E_hat", e_hat},
                              {"stderr", se}}}};
    if (include_runs) {
        json runs = json::array();
        for (const EprRunRecord& r : records) {
            json ticks = json::array();
            for (const QTickRecord& t : r.ticks) ticks.push_back(to_json(t));
            runs.push_back(json{{"electron", r.electron_sign},
                                {"positron", r.positron_sign},
                                {"order", json::array({r.tick_order.first, r.tick_order.second})},
                                {"ticks", std::move(ticks)}});
        }
        out["runs"] = std::move(runs);
    }
    return out;
}

json decay_report_json(const PictureReport& rep) {
    return json{{"schrodinger", rep.schrodinger},
                {"heisenberg", rep.heisenberg},
                {"qtick", rep.qtick ? json(*rep.qtick) : json(nullptr)},
                {"max_delta", rep.max_delta}};
}

} // namespace qtick
