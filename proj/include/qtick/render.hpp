#pragma once

#include <string>
#include <vector>

#include "qtick/automaton.hpp"

namespace qtick {

// Deterministic DOT text for a valid graph: events are large circles, tests
// small circles, complexes doublecircles; active-present nodes are filled
// gray. Nodes emit in id order, edges in declaration order. An invalid graph
// refuses to render: validation_error carrying the report text.
std::string to_dot(const ProcessGraph& g);

// Structural transcriptions of the notation's worked diagrams. "fig5" is the
// forbidden configuration and intentionally fails validation.
ProcessGraph builtin_figure(const std::string& name);

const std::vector<std::string>& builtin_figure_names();

// Minimal DOT well-formedness check: digraph header, balanced braces,
// statement and attribute syntax. Returns an empty string when fine,
// otherwise a diagnostic.
std::string check_dot(const std::string& text);

} // namespace qtick
