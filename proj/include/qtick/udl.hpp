#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qtick/automaton.hpp"
#include "qtick/epr.hpp"
#include "qtick/errors.hpp"
#include "qtick/pictures.hpp"
#include "qtick/toy.hpp"

namespace qtick::udl {

inline constexpr std::size_t kInputCap = 1u << 20; // 1 MiB

struct Span {
    int line = 1; // 1-based
    int col = 1;
};

enum class ErrorKind { Lexical, Syntax, Semantic };

const char* to_string(ErrorKind k);

// Parse failure with position, the offending lexeme, and the expected token
// set; what() renders "line:col: <kind> error: <message>".
class parse_error : public qtick::error {
public:
    parse_error(ErrorKind kind, Span span, std::string lexeme,
                std::vector<std::string> expected, const std::string& message);

    ErrorKind kind() const { return kind_; }
    Span span() const { return span_; }
    const std::string& lexeme() const { return lexeme_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    ErrorKind kind_;
    Span span_;
    std::string lexeme_;
    std::vector<std::string> expected_;
};

struct Triple {
    double x, y, z;
};

struct Su2Expr {
    Triple axis;
    double angle;
};

// Integer literal; sign-ness is kept so serialization round-trips "+1".
struct IntValue {
    std::uint64_t magnitude = 0;
    bool negative = false;
    bool explicit_plus = false;

    std::int64_t as_int64() const;
    std::uint64_t as_uint64() const; // two's-complement wrap for negatives
};

using Value = std::variant<double, IntValue, std::string, Triple, Su2Expr>;

struct Entry {
    std::string key;
    Value value;
    Span key_span;
    Span value_span;
};

enum class UdlNodeKind { Event, Test, Complex };

struct NodeDecl {
    UdlNodeKind kind;
    std::string id;
    std::vector<std::string> attrs;
    Span span;
};

struct EdgeDecl {
    std::string from;
    std::string to;
    EdgeKind kind;
    Span span;
};

enum class BlockKind { Toy, Epr, Decay, Diagram };

const char* to_string(BlockKind k);

struct Block {
    BlockKind kind;
    std::string name;
    Span name_span;
    std::vector<Entry> entries;
    std::vector<NodeDecl> nodes;
    std::vector<EdgeDecl> edges;

    const Entry* find(const std::string& key) const;
};

struct UdlDocument {
    std::vector<Block> blocks;

    const Block* find(BlockKind kind) const;
    const Block* find(BlockKind kind, const std::string& name) const;
};

// Recursive descent over the whole grammar, including the per-kind semantic
// checks (key vocabulary, axis norms, node/edge references).
UdlDocument parse(const std::string& text);

// Canonical form: entries sorted by key, numbers at 17 significant digits,
// node and edge declarations in declaration order. parse(serialize(d))
// structurally equals d, and serialize is byte-idempotent.
std::string serialize(const UdlDocument& doc);

bool structurally_equal(const UdlDocument& a, const UdlDocument& b);

// Block-to-engine builders.
ToyConfig toy_config_from(const Block& b);
EprConfig epr_config_from(const Block& b);
DecayProblem decay_problem_from(const Block& b);
ProcessGraph graph_from(const Block& b);

} // namespace qtick::udl
