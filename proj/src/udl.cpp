#include "qtick/udl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

namespace qtick::udl {

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
    std::string out;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0) out += (i + 1 == expected.size()) ? " or " : ", ";
        out += expected[i];
    }
    return out;
}

std::string describe(ErrorKind kind, Span span, const std::string& lexeme,
                     const std::vector<std::string>& expected, const std::string& message) {
    std::string out = std::to_string(span.line) + ":" + std::to_string(span.col) + ": " +
                      to_string(kind) + " error: " + message;
    if (!lexeme.empty()) out += " (got '" + lexeme + "')";
    if (!expected.empty()) out += ", expected " + join_expected(expected);
    return out;
}

} // namespace

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::Lexical: return "lexical";
        case ErrorKind::Syntax: return "syntax";
        case ErrorKind::Semantic: return "semantic";
    }
    return "?";
}

const char* to_string(BlockKind k) {
    switch (k) {
        case BlockKind::Toy: return "toy";
        case BlockKind::Epr: return "epr";
        case BlockKind::Decay: return "decay";
        case BlockKind::Diagram: return "diagram";
    }
    return "?";
}

parse_error::parse_error(ErrorKind kind, Span span, std::string lexeme,
                         std::vector<std::string> expected, const std::string& message)
    : error(describe(kind, span, lexeme, expected, message)),
      kind_(kind),
      span_(span),
      lexeme_(std::move(lexeme)),
      expected_(std::move(expected)) {}

std::int64_t IntValue::as_int64() const {
    if (negative) {
        if (magnitude > 0x8000000000000000ull)
            throw validation_error("integer out of int64 range");
        return -static_cast<std::int64_t>(magnitude - 1) - 1;
    }
    if (magnitude > 0x7fffffffffffffffull) throw validation_error("integer out of int64 range");
    return static_cast<std::int64_t>(magnitude);
}

std::uint64_t IntValue::as_uint64() const {
    return negative ? ~magnitude + 1 : magnitude;
}

const Entry* Block::find(const std::string& key) const {
    for (const Entry& e : entries)
        if (e.key == key) return &e;
    return nullptr;
}

const Block* UdlDocument::find(BlockKind kind) const {
    for (const Block& b : blocks)
        if (b.kind == kind) return &b;
    return nullptr;
}

const Block* UdlDocument::find(BlockKind kind, const std::string& name) const {
    for (const Block& b : blocks)
        if (b.kind == kind && b.name == name) return &b;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

enum class Tok {
    Ident,
    Number,
    Int,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Equals,
    Comma,
    Arrow,    // ->
    DashDash, // --
    DArrow,   // =>
    End,
};

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::Ident: return "IDENT";
        case Tok::Number: return "NUMBER";
        case Tok::Int: return "INTEGER";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Equals: return "'='";
        case Tok::Comma: return "','";
        case Tok::Arrow: return "'->'";
        case Tok::DashDash: return "'--'";
        case Tok::DArrow: return "'=>'";
        case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok type;
    std::string text;
    Span span{};
    double num = 0.0;   // Number
    IntValue ival{};    // Int
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_ws_and_comments();
            Span here{line_, col_};
            if (pos_ >= text_.size()) {
                out.push_back({Tok::End, "", here});
                return out;
            }
            char c = text_[pos_];
            if (c == '{') { out.push_back(single(Tok::LBrace, here)); continue; }
            if (c == '}') { out.push_back(single(Tok::RBrace, here)); continue; }
            if (c == '(') { out.push_back(single(Tok::LParen, here)); continue; }
            if (c == ')') { out.push_back(single(Tok::RParen, here)); continue; }
            if (c == '[') { out.push_back(single(Tok::LBracket, here)); continue; }
            if (c == ']') { out.push_back(single(Tok::RBracket, here)); continue; }
            if (c == ',') { out.push_back(single(Tok::Comma, here)); continue; }
            if (c == '=') {
                if (peek(1) == '>') { out.push_back(two(Tok::DArrow, here)); continue; }
                out.push_back(single(Tok::Equals, here));
                continue;
            }
            if (c == '-') {
                if (peek(1) == '>') { out.push_back(two(Tok::Arrow, here)); continue; }
                if (peek(1) == '-') { out.push_back(two(Tok::DashDash, here)); continue; }
                out.push_back(lex_number(here));
                continue;
            }
            if (c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
                out.push_back(lex_number(here));
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                out.push_back(lex_ident(here));
                continue;
            }
            throw parse_error(ErrorKind::Lexical, here, std::string(1, c), {},
                              "unexpected character");
        }
    }

private:
    char peek(std::size_t ahead) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    Token single(Tok t, Span here) {
        std::string s(1, text_[pos_]);
        advance();
        return {t, s, here};
    }

    Token two(Tok t, Span here) {
        std::string s = text_.substr(pos_, 2);
        advance();
        advance();
        return {t, s, here};
    }

    Token lex_ident(Span here) {
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') advance();
            else break;
        }
        return {Tok::Ident, text_.substr(start, pos_ - start), here};
    }

    Token lex_number(Span here) {
        std::size_t start = pos_;
        bool negative = false, explicit_plus = false;
        if (text_[pos_] == '+') { explicit_plus = true; advance(); }
        else if (text_[pos_] == '-') { negative = true; advance(); }

        std::size_t digits_start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            advance();
        if (pos_ == digits_start)
            throw parse_error(ErrorKind::Lexical, here, text_.substr(start, pos_ - start + 1),
                              {}, "malformed number: digits required after sign");

        bool is_int = true;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            is_int = false;
            advance();
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                advance();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            is_int = false;
            advance();
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance();
            std::size_t exp_start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                advance();
            if (pos_ == exp_start)
                throw parse_error(ErrorKind::Lexical, here,
                                  text_.substr(start, pos_ - start), {},
                                  "malformed number: unterminated exponent");
        }

        std::string lexeme = text_.substr(start, pos_ - start);
        Token t{is_int ? Tok::Int : Tok::Number, lexeme, here};
        if (is_int) {
            std::uint64_t mag = 0;
            for (std::size_t i = negative || explicit_plus ? 1 : 0; i < lexeme.size(); ++i) {
                unsigned digit = static_cast<unsigned>(lexeme[i] - '0');
                if (mag > (0xffffffffffffffffull - digit) / 10ull)
                    throw parse_error(ErrorKind::Lexical, here, lexeme, {},
                                      "integer literal out of range");
                mag = mag * 10ull + digit;
            }
            t.ival = IntValue{mag, negative, explicit_plus};
            t.num = negative ? -static_cast<double>(mag) : static_cast<double>(mag);
        } else {
            t.num = std::strtod(lexeme.c_str(), nullptr);
            if (!std::isfinite(t.num))
                throw parse_error(ErrorKind::Lexical, here, lexeme, {},
                                  "number out of double range");
        }
        return t;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    UdlDocument run() {
        UdlDocument doc;
        while (cur().type != Tok::End) doc.blocks.push_back(parse_block());
        check_document(doc);
        return doc;
    }

private:
    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t ahead = 1) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    void bump() { if (pos_ + 1 < toks_.size()) ++pos_; }

    [[noreturn]] void fail_syntax(const std::vector<std::string>& expected,
                                  const std::string& message) const {
        throw parse_error(ErrorKind::Syntax, cur().span, cur().text, expected, message);
    }

    Token expect(Tok type) {
        if (cur().type != type) fail_syntax({tok_name(type)}, "unexpected token");
        Token t = cur();
        bump();
        return t;
    }

    static std::optional<BlockKind> block_kind(const std::string& ident) {
        if (ident == "toy") return BlockKind::Toy;
        if (ident == "epr") return BlockKind::Epr;
        if (ident == "decay") return BlockKind::Decay;
        if (ident == "diagram") return BlockKind::Diagram;
        return std::nullopt;
    }

    static std::optional<UdlNodeKind> node_kind(const std::string& ident) {
        if (ident == "event") return UdlNodeKind::Event;
        if (ident == "test") return UdlNodeKind::Test;
        if (ident == "complex") return UdlNodeKind::Complex;
        return std::nullopt;
    }

    Block parse_block() {
        if (cur().type != Tok::Ident)
            fail_syntax({"'toy'", "'epr'", "'decay'", "'diagram'"}, "expected a block kind");
        auto kind = block_kind(cur().text);
        if (!kind)
            fail_syntax({"'toy'", "'epr'", "'decay'", "'diagram'"}, "unknown block kind");
        bump();

        Block block;
        block.kind = *kind;
        Token name = expect(Tok::Ident);
        block.name = name.text;
        block.name_span = name.span;
        expect(Tok::LBrace);
        while (cur().type != Tok::RBrace) {
            if (cur().type == Tok::End)
                fail_syntax({"'}'"}, "unterminated block");
            parse_entry(block);
        }
        expect(Tok::RBrace);
        check_block(block);
        return block;
    }

    void parse_entry(Block& block) {
        if (cur().type != Tok::Ident)
            fail_syntax({"IDENT", "'}'"}, "expected an entry");

        // Node declaration when a node keyword is followed by an identifier.
        auto nk = node_kind(cur().text);
        if (nk && peek().type == Tok::Ident) {
            parse_nodedecl(block, *nk);
            return;
        }

        Token head = cur();
        bump();
        switch (cur().type) {
            case Tok::Equals: {
                bump();
                Entry e;
                e.key = head.text;
                e.key_span = head.span;
                e.value_span = cur().span;
                e.value = parse_value();
                block.entries.push_back(std::move(e));
                return;
            }
            case Tok::Arrow:
            case Tok::DashDash:
            case Tok::DArrow: {
                EdgeKind kind = cur().type == Tok::Arrow      ? EdgeKind::StateFlow
                                : cur().type == Tok::DashDash ? EdgeKind::InfoFlow
                                                              : EdgeKind::ComplexFlow;
                Span span = head.span;
                bump();
                Token to = expect(Tok::Ident);
                block.edges.push_back(EdgeDecl{head.text, to.text, kind, span});
                return;
            }
            default:
                fail_syntax({"'='", "'->'", "'--'", "'=>'"}, "malformed entry");
        }
    }

    void parse_nodedecl(Block& block, UdlNodeKind kind) {
        Span span = cur().span;
        bump(); // node keyword
        Token id = expect(Tok::Ident);
        NodeDecl node{kind, id.text, {}, span};
        if (cur().type == Tok::LBracket) {
            bump();
            while (cur().type == Tok::Ident) {
                node.attrs.push_back(cur().text);
                bump();
            }
            expect(Tok::RBracket);
        }
        block.nodes.push_back(std::move(node));
    }

    Value parse_value() {
        switch (cur().type) {
            case Tok::Number: {
                double v = cur().num;
                bump();
                return v;
            }
            case Tok::Int: {
                IntValue v = cur().ival;
                bump();
                return v;
            }
            case Tok::Ident: {
                if (cur().text == "su2" && peek().type == Tok::LParen) return parse_su2();
                std::string v = cur().text;
                bump();
                return v;
            }
            case Tok::LParen:
                return parse_triple();
            default:
                fail_syntax({"NUMBER", "INTEGER", "IDENT", "'('", "'su2('"},
                            "expected a value");
        }
    }

    double parse_numeric() {
        if (cur().type == Tok::Number || cur().type == Tok::Int) {
            double v = cur().num;
            bump();
            return v;
        }
        fail_syntax({"NUMBER"}, "expected a number");
    }

    Triple parse_triple() {
        expect(Tok::LParen);
        Triple t{};
        t.x = parse_numeric();
        expect(Tok::Comma);
        t.y = parse_numeric();
        expect(Tok::Comma);
        t.z = parse_numeric();
        expect(Tok::RParen);
        return t;
    }

    Su2Expr parse_su2() {
        bump(); // su2
        expect(Tok::LParen);
        Token axis_kw = expect(Tok::Ident);
        if (axis_kw.text != "axis")
            throw parse_error(ErrorKind::Syntax, axis_kw.span, axis_kw.text, {"'axis'"},
                              "su2 expression starts with axis=");
        expect(Tok::Equals);
        Su2Expr e{};
        e.axis = parse_triple();
        expect(Tok::Comma);
        Token angle_kw = expect(Tok::Ident);
        if (angle_kw.text != "angle")
            throw parse_error(ErrorKind::Syntax, angle_kw.span, angle_kw.text, {"'angle'"},
                              "su2 expression needs angle=");
        expect(Tok::Equals);
        e.angle = parse_numeric();
        expect(Tok::RParen);
        return e;
    }

    // ------------------------------------------------------------------
    // Semantic checks
    // ------------------------------------------------------------------

    enum class ValueType { Number, Int, Ident, Triple, Su2 };

    struct KeySpec {
        ValueType type;
        bool required;
    };

    static const std::map<std::string, KeySpec>& keys_for(BlockKind kind) {
        static const std::map<std::string, KeySpec> toy_keys{
            {"axis_a", {ValueType::Triple, true}}, {"lambda0", {ValueType::Int, true}},
            {"U", {ValueType::Su2, true}},         {"V", {ValueType::Su2, true}},
            {"steps", {ValueType::Int, true}},     {"seed", {ValueType::Int, true}},
            {"initial_state", {ValueType::Ident, false}},
            {"normalize", {ValueType::Ident, false}},
        };
        static const std::map<std::string, KeySpec> epr_keys{
            {"axis_b", {ValueType::Triple, true}}, {"axis_c", {ValueType::Triple, true}},
            {"topology", {ValueType::Ident, true}}, {"runs", {ValueType::Int, true}},
            {"seed", {ValueType::Int, true}},       {"normalize", {ValueType::Ident, false}},
        };
        static const std::map<std::string, KeySpec> decay_keys{
            {"psi", {ValueType::Ident, true}},     {"lambda_axis", {ValueType::Triple, true}},
            {"target", {ValueType::Number, true}}, {"U", {ValueType::Su2, true}},
            {"N", {ValueType::Int, true}},         {"normalize", {ValueType::Ident, false}},
        };
        static const std::map<std::string, KeySpec> diagram_keys{};
        switch (kind) {
            case BlockKind::Toy: return toy_keys;
            case BlockKind::Epr: return epr_keys;
            case BlockKind::Decay: return decay_keys;
            case BlockKind::Diagram: return diagram_keys;
        }
        return diagram_keys;
    }

    [[noreturn]] static void fail_semantic(Span span, const std::string& lexeme,
                                           const std::string& message) {
        throw parse_error(ErrorKind::Semantic, span, lexeme, {}, message);
    }

    static bool value_matches(const Value& v, ValueType t) {
        switch (t) {
            case ValueType::Number:
                return std::holds_alternative<double>(v) || std::holds_alternative<IntValue>(v);
            case ValueType::Int: return std::holds_alternative<IntValue>(v);
            case ValueType::Ident: return std::holds_alternative<std::string>(v);
            case ValueType::Triple: return std::holds_alternative<Triple>(v);
            case ValueType::Su2: return std::holds_alternative<Su2Expr>(v);
        }
        return false;
    }

    static bool normalize_flag(const Block& block) {
        const Entry* e = block.find("normalize");
        return e && std::holds_alternative<std::string>(e->value) &&
               std::get<std::string>(e->value) == "true";
    }

    static void check_axis(const Triple& t, Span span, bool normalize) {
        if (normalize) {
            double n2 = t.x * t.x + t.y * t.y + t.z * t.z;
            if (!(n2 > 0.0) || !std::isfinite(n2))
                fail_semantic(span, "", "axis cannot be normalized");
            return;
        }
        double n2 = t.x * t.x + t.y * t.y + t.z * t.z;
        if (std::abs(n2 - 1.0) > 1e-12)
            fail_semantic(span, "", "axis not unit-norm (set normalize = true to rescale)");
    }

    static void check_ident_domain(const Entry& e, std::initializer_list<const char*> allowed) {
        const std::string& v = std::get<std::string>(e.value);
        for (const char* a : allowed)
            if (v == a) return;
        std::string msg = "invalid value for '" + e.key + "'; allowed:";
        for (const char* a : allowed) msg += std::string(" ") + a;
        fail_semantic(e.value_span, v, msg);
    }

    void check_block(const Block& block) {
        const auto& keys = keys_for(block.kind);

        if (block.kind != BlockKind::Diagram) {
            if (!block.nodes.empty())
                fail_semantic(block.nodes.front().span, block.nodes.front().id,
                              "node declarations belong in diagram blocks");
            if (!block.edges.empty())
                fail_semantic(block.edges.front().span, block.edges.front().from,
                              "edge declarations belong in diagram blocks");
        }

        std::set<std::string> seen;
        for (const Entry& e : block.entries) {
            auto it = keys.find(e.key);
            if (it == keys.end())
                fail_semantic(e.key_span, e.key,
                              std::string("unknown key for ") + to_string(block.kind) + " block");
            if (!seen.insert(e.key).second)
                fail_semantic(e.key_span, e.key, "duplicate key");
            if (!value_matches(e.value, it->second.type))
                fail_semantic(e.value_span, "", "wrong value type for '" + e.key + "'");
        }
        for (const auto& [key, spec] : keys) {
            if (spec.required && !seen.count(key))
                fail_semantic(block.name_span, block.name,
                              "missing required key '" + key + "'");
        }

        bool normalize = normalize_flag(block);
        for (const Entry& e : block.entries) {
            if (const Triple* t = std::get_if<Triple>(&e.value)) check_axis(*t, e.value_span, normalize);
            if (const Su2Expr* s = std::get_if<Su2Expr>(&e.value))
                check_axis(s->axis, e.value_span, normalize);
            if (e.key == "lambda0") {
                const IntValue& iv = std::get<IntValue>(e.value);
                if (iv.magnitude != 1)
                    fail_semantic(e.value_span, "", "lambda0 must be +1 or -1");
            }
            if (e.key == "runs" || e.key == "N") {
                const IntValue& iv = std::get<IntValue>(e.value);
                if (iv.negative || iv.magnitude == 0)
                    fail_semantic(e.value_span, "", "'" + e.key + "' must be a positive integer");
            }
            if (e.key == "steps") {
                const IntValue& iv = std::get<IntValue>(e.value);
                if (iv.negative)
                    fail_semantic(e.value_span, "", "'steps' must be non-negative");
            }
            if (e.key == "normalize") check_ident_domain(e, {"true", "false"});
            if (e.key == "topology") check_ident_domain(e, {"electron_first", "positron_first"});
            if (e.key == "initial_state") check_ident_domain(e, {"plus", "minus"});
            if (e.key == "psi") check_ident_domain(e, {"up", "down", "plus", "minus"});
        }

        if (block.kind == BlockKind::Diagram) check_diagram(block);
    }

    static void check_node_attrs(const NodeDecl& n) {
        static const std::set<std::string> stages{"past", "active", "future"};
        static const std::set<std::string> states{"up", "down", "plus", "minus", "singlet"};
        static const std::set<std::string> ops{"sx", "sy", "sz", "stot", "s2"};

        int stage_count = 0, state_count = 0, op_count = 0;
        bool future = false;
        for (const std::string& a : n.attrs) {
            if (stages.count(a)) {
                ++stage_count;
                if (n.kind != UdlNodeKind::Event && a == "future")
                    fail_semantic(n.span, a, "only events can be future");
                future = future || a == "future";
            } else if (states.count(a) && n.kind == UdlNodeKind::Event) {
                ++state_count;
            } else if (ops.count(a) && n.kind == UdlNodeKind::Test) {
                ++op_count;
            } else {
                fail_semantic(n.span, a, "unknown attribute for node '" + n.id + "'");
            }
        }
        if (stage_count > 1 || state_count > 1 || op_count > 1)
            fail_semantic(n.span, n.id, "duplicate attribute category");
        if (n.kind == UdlNodeKind::Event) {
            if (future && state_count > 0)
                fail_semantic(n.span, n.id, "future events carry no state");
            if (!future && state_count == 0)
                fail_semantic(n.span, n.id, "past/active events need a state attribute");
        }
    }

    static void check_diagram(const Block& block) {
        std::set<std::string> ids;
        for (const NodeDecl& n : block.nodes) {
            if (!ids.insert(n.id).second) fail_semantic(n.span, n.id, "duplicate node id");
            check_node_attrs(n);
        }
        for (const EdgeDecl& e : block.edges) {
            if (!ids.count(e.from))
                fail_semantic(e.span, e.from, "edge references undeclared node");
            if (!ids.count(e.to)) fail_semantic(e.span, e.to, "edge references undeclared node");
        }
    }

    void check_document(const UdlDocument& doc) {
        std::set<std::string> names;
        for (const Block& b : doc.blocks) {
            if (!names.insert(b.name).second)
                fail_semantic(b.name_span, b.name, "duplicate block name");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace

UdlDocument parse(const std::string& text) {
    if (text.size() > kInputCap)
        throw parse_error(ErrorKind::Lexical, Span{1, 1}, "", {}, "input exceeds the 1 MiB cap");
    Lexer lexer(text);
    Parser parser(lexer.run());
    return parser.run();
}

// ---------------------------------------------------------------------------
// Serializer
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    std::string out = buf;
    // Keep the lexical kind stable: integral doubles must not re-lex as
    // integer literals.
    if (out.find_first_of(".eE") == std::string::npos) out += ".0";
    return out;
}

std::string fmt_int(const IntValue& v) {
    std::string digits = std::to_string(v.magnitude);
    if (v.negative) return "-" + digits;
    if (v.explicit_plus) return "+" + digits;
    return digits;
}

std::string fmt_triple(const Triple& t) {
    return "(" + fmt_double(t.x) + ", " + fmt_double(t.y) + ", " + fmt_double(t.z) + ")";
}

std::string fmt_value(const Value& v) {
    if (const double* d = std::get_if<double>(&v)) return fmt_double(*d);
    if (const IntValue* i = std::get_if<IntValue>(&v)) return fmt_int(*i);
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    if (const Triple* t = std::get_if<Triple>(&v)) return fmt_triple(*t);
    const Su2Expr& e = std::get<Su2Expr>(v);
    return "su2(axis=" + fmt_triple(e.axis) + ", angle=" + fmt_double(e.angle) + ")";
}

const char* node_keyword(UdlNodeKind k) {
    switch (k) {
        case UdlNodeKind::Event: return "event";
        case UdlNodeKind::Test: return "test";
        case UdlNodeKind::Complex: return "complex";
    }
    return "?";
}

const char* edge_op(EdgeKind k) {
    switch (k) {
        case EdgeKind::StateFlow: return "->";
        case EdgeKind::InfoFlow: return "--";
        case EdgeKind::ComplexFlow: return "=>";
    }
    return "?";
}

} // namespace

std::string serialize(const UdlDocument& doc) {
    std::string out;
    for (std::size_t bi = 0; bi < doc.blocks.size(); ++bi) {
        const Block& b = doc.blocks[bi];
        if (bi > 0) out += "\n";
        out += std::string(to_string(b.kind)) + " " + b.name + " {\n";

        std::vector<const Entry*> sorted;
        sorted.reserve(b.entries.size());
        for (const Entry& e : b.entries) sorted.push_back(&e);
        std::sort(sorted.begin(), sorted.end(),
                  [](const Entry* x, const Entry* y) { return x->key < y->key; });
        for (const Entry* e : sorted) out += "  " + e->key + " = " + fmt_value(e->value) + "\n";

        for (const NodeDecl& n : b.nodes) {
            out += std::string("  ") + node_keyword(n.kind) + " " + n.id;
            if (!n.attrs.empty()) {
                out += " [";
                for (std::size_t i = 0; i < n.attrs.size(); ++i) {
                    if (i > 0) out += " ";
                    out += n.attrs[i];
                }
                out += "]";
            }
            out += "\n";
        }
        for (const EdgeDecl& e : b.edges)
            out += "  " + e.from + " " + edge_op(e.kind) + " " + e.to + "\n";
        out += "}\n";
    }
    return out;
}

namespace {

bool value_equal(const Value& a, const Value& b) {
    if (a.index() != b.index()) {
        // A plain integer and a double spelling of the same quantity stay
        // distinct kinds; no cross-kind equality.
        return false;
    }
    if (const double* x = std::get_if<double>(&a)) return *x == std::get<double>(b);
    if (const IntValue* x = std::get_if<IntValue>(&a)) {
        const IntValue& y = std::get<IntValue>(b);
        return x->magnitude == y.magnitude && x->negative == y.negative;
    }
    if (const std::string* x = std::get_if<std::string>(&a)) return *x == std::get<std::string>(b);
    if (const Triple* x = std::get_if<Triple>(&a)) {
        const Triple& y = std::get<Triple>(b);
        return x->x == y.x && x->y == y.y && x->z == y.z;
    }
    const Su2Expr& x = std::get<Su2Expr>(a);
    const Su2Expr& y = std::get<Su2Expr>(b);
    return x.axis.x == y.axis.x && x.axis.y == y.axis.y && x.axis.z == y.axis.z &&
           x.angle == y.angle;
}

} // namespace

bool structurally_equal(const UdlDocument& a, const UdlDocument& b) {
    if (a.blocks.size() != b.blocks.size()) return false;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        const Block& x = a.blocks[i];
        const Block& y = b.blocks[i];
        if (x.kind != y.kind || x.name != y.name) return false;
        if (x.entries.size() != y.entries.size() || x.nodes.size() != y.nodes.size() ||
            x.edges.size() != y.edges.size())
            return false;

        auto sorted_keys = [](const Block& blk) {
            std::vector<const Entry*> v;
            for (const Entry& e : blk.entries) v.push_back(&e);
            std::sort(v.begin(), v.end(),
                      [](const Entry* p, const Entry* q) { return p->key < q->key; });
            return v;
        };
        auto xs = sorted_keys(x), ys = sorted_keys(y);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (xs[k]->key != ys[k]->key || !value_equal(xs[k]->value, ys[k]->value))
                return false;
        }
        for (std::size_t k = 0; k < x.nodes.size(); ++k) {
            if (x.nodes[k].kind != y.nodes[k].kind || x.nodes[k].id != y.nodes[k].id ||
                x.nodes[k].attrs != y.nodes[k].attrs)
                return false;
        }
        for (std::size_t k = 0; k < x.edges.size(); ++k) {
            if (x.edges[k].from != y.edges[k].from || x.edges[k].to != y.edges[k].to ||
                x.edges[k].kind != y.edges[k].kind)
                return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace {

bool block_normalize(const Block& b) {
    const Entry* e = b.find("normalize");
    return e && std::get<std::string>(e->value) == "true";
}

AxisVector axis_from(const Block& b, const char* key) {
    const Triple& t = std::get<Triple>(b.find(key)->value);
    return block_normalize(b) ? AxisVector::normalized(t.x, t.y, t.z)
                              : AxisVector(t.x, t.y, t.z);
}

Su2Params su2_from_entry(const Block& b, const char* key) {
    const Su2Expr& e = std::get<Su2Expr>(b.find(key)->value);
    AxisVector axis = block_normalize(b)
                          ? AxisVector::normalized(e.axis.x, e.axis.y, e.axis.z)
                          : AxisVector(e.axis.x, e.axis.y, e.axis.z);
    return Su2Params{axis, e.angle};
}

double number_from(const Block& b, const char* key) {
    const Value& v = b.find(key)->value;
    if (const double* d = std::get_if<double>(&v)) return *d;
    const IntValue& i = std::get<IntValue>(v);
    double mag = static_cast<double>(i.magnitude);
    return i.negative ? -mag : mag;
}

StateVector named_state2(const std::string& name) {
    const double r = 1.0 / std::sqrt(2.0);
    if (name == "up") return StateVector({1.0, 0.0});
    if (name == "down") return StateVector({0.0, 1.0});
    if (name == "plus") return StateVector({r, r});
    if (name == "minus") return StateVector({r, -r});
    throw validation_error("unknown state name '" + name + "'");
}

} // namespace

ToyConfig toy_config_from(const Block& b) {
    if (b.kind != BlockKind::Toy) throw validation_error("not a toy block");
    ToyConfig cfg;
    cfg.axis_a = axis_from(b, "axis_a");
    const IntValue& l0 = std::get<IntValue>(b.find("lambda0")->value);
    cfg.lambda0 = l0.negative ? -1 : +1;
    cfg.u_params = su2_from_entry(b, "U");
    cfg.v_params = su2_from_entry(b, "V");
    cfg.steps = static_cast<unsigned>(std::get<IntValue>(b.find("steps")->value).magnitude);
    cfg.seed = std::get<IntValue>(b.find("seed")->value).as_uint64();
    if (const Entry* e = b.find("initial_state")) {
        const std::string& which = std::get<std::string>(e->value);
        cfg.initial_state_choice =
            which == "plus" ? InitialState::PlusEigenstate : InitialState::MinusEigenstate;
    } else {
        cfg.initial_state_choice =
            cfg.lambda0 == +1 ? InitialState::PlusEigenstate : InitialState::MinusEigenstate;
    }
    return cfg;
}

EprConfig epr_config_from(const Block& b) {
    if (b.kind != BlockKind::Epr) throw validation_error("not an epr block");
    EprConfig cfg;
    cfg.axis_b = axis_from(b, "axis_b");
    cfg.axis_c = axis_from(b, "axis_c");
    cfg.topology = std::get<std::string>(b.find("topology")->value) == "electron_first"
                       ? EprTopology::ElectronFirst
                       : EprTopology::PositronFirst;
    cfg.runs = static_cast<unsigned>(std::get<IntValue>(b.find("runs")->value).magnitude);
    cfg.seed = std::get<IntValue>(b.find("seed")->value).as_uint64();
    return cfg;
}

DecayProblem decay_problem_from(const Block& b) {
    if (b.kind != BlockKind::Decay) throw validation_error("not a decay block");
    StateVector psi = named_state2(std::get<std::string>(b.find("psi")->value));
    HermitianOperator lambda_op = pauli_dot(axis_from(b, "lambda_axis"));
    double target = number_from(b, "target");
    Su2Params u = su2_from_entry(b, "U");
    unsigned n = static_cast<unsigned>(std::get<IntValue>(b.find("N")->value).magnitude);
    return DecayProblem::with_steps(std::move(psi), std::move(lambda_op), target,
                                    su2_from(u.axis, u.angle), n);
}

ProcessGraph graph_from(const Block& b) {
    if (b.kind != BlockKind::Diagram) throw validation_error("not a diagram block");
    ProcessGraph g;
    for (const NodeDecl& n : b.nodes) {
        Stage stage = Stage::Active;
        std::string state_name;
        std::string op_name = "sz";
        for (const std::string& a : n.attrs) {
            if (a == "past") stage = Stage::Past;
            else if (a == "active") stage = Stage::Active;
            else if (a == "future") stage = Stage::Future;
            else if (a == "sx" || a == "sy" || a == "sz" || a == "stot" || a == "s2") op_name = a;
            else state_name = a;
        }
        switch (n.kind) {
            case UdlNodeKind::Event: {
                Event ev;
                ev.id = n.id;
                ev.stage = stage;
                if (stage == Stage::Future) {
                    ev.factor_dims = {2};
                } else if (state_name == "singlet") {
                    ev.state = make_singlet();
                    ev.factor_dims = {2, 2};
                } else {
                    ev.state = named_state2(state_name);
                    ev.factor_dims = {2};
                }
                g.events.push_back(std::move(ev));
                break;
            }
            case UdlNodeKind::Test: {
                Test t;
                t.id = n.id;
                t.stage = stage;
                if (op_name == "sx") t.operators.push_back(pauli_x());
                else if (op_name == "sy") t.operators.push_back(pauli_y());
                else if (op_name == "stot") t.operators.push_back(sigma_total(AxisVector(0, 0, 1)));
                else if (op_name == "s2") t.operators.push_back(s_squared());
                else t.operators.push_back(pauli_z());
                g.tests.push_back(std::move(t));
                break;
            }
            case UdlNodeKind::Complex:
                g.complexes.push_back(ComplexNode{n.id, stage});
                break;
        }
    }
    for (const EdgeDecl& e : b.edges) g.edges.push_back(GraphEdge{e.from, e.to, e.kind, ""});
    populate_info_sources(g);
    return g;
}

} // namespace qtick::udl
