#pragma once

#include <json.hpp>

#include "qtick/automaton.hpp"
#include "qtick/epr.hpp"
#include "qtick/pictures.hpp"
#include "qtick/toy.hpp"

namespace qtick {

using json = nlohmann::json;

json to_json(const StateVector& s);      // [[re, im], ...]
json to_json(const QTickRecord& r);      // {test, inputs, eigenvalue, probability, draw, outcome}
json to_json(const ProcessGraph& g);     // {events, tests, complexes, edges}
json graph_with_ticks(const ProcessGraph& g, const std::vector<QTickRecord>& ticks);

json to_json(const ToyConfig& cfg);
json toy_run_json(const ToyConfig& cfg, const ToyRun& run);
json toy_tree_json(const ToyConfig& cfg, const HistoryTree& tree);

json to_json(const EprConfig& cfg);
json to_json(const JointTable& t);
json epr_run_json(const EprConfig& cfg, const std::vector<EprRunRecord>& records,
                  bool include_runs);

json decay_report_json(const PictureReport& rep);

} // namespace qtick
