#include "letterkit/markup.hpp"

#include <cctype>

#include "letterkit/text.hpp"

namespace letterkit::markup {

namespace {

const char* code_name(ParseErrorCode code) {
    switch (code) {
        case ParseErrorCode::UnbalancedEnvironment: return "UnbalancedEnvironment";
        case ParseErrorCode::UnbracedArgument: return "UnbracedArgument";
        case ParseErrorCode::UnterminatedGroup: return "UnterminatedGroup";
        case ParseErrorCode::BadArgument: return "BadArgument";
    }
    return "ParseError";
}

bool is_ws(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool valid_identifier(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                        c == ':' || c == '.' || c == '-';
        if (!ok) return false;
    }
    return true;
}

class Parser {
public:
    Parser(std::string_view source, const Registry& registry)
        : src_(source), registry_(registry) {}

    std::vector<Item> run() {
        std::vector<Item> items;
        if (registry_.preamble_end_marker) {
            const auto idx = src_.find(*registry_.preamble_end_marker);
            if (idx != std::string_view::npos && idx > 0) {
                Item op;
                op.kind = ItemKind::Opaque;
                op.span = span_start();
                op.text = std::string(src_.substr(0, idx));
                while (pos_ < idx) advance_cp();
                op.span = close_span(op.span);
                items.push_back(std::move(op));
            }
        }
        parse_sequence(items, /*in_arg=*/false);
        return items;
    }

private:
    std::string_view src_;
    const Registry& registry_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    bool eof() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }

    char32_t advance_cp() {
        std::size_t before = pos_;
        char32_t cp = text::decode_utf8(src_, pos_);
        (void)before;
        if (cp == U'\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return cp;
    }

    SourceSpan span_start() const {
        SourceSpan s;
        s.byte_start = pos_;
        s.byte_end = pos_;
        s.line = line_;
        s.column = col_;
        return s;
    }

    SourceSpan close_span(SourceSpan s) const {
        s.byte_end = pos_;
        return s;
    }

    [[noreturn]] void fail(ParseErrorCode code, SourceSpan span, std::string detail) {
        throw ParseError(code, span, std::move(detail));
    }

    // Parses items until EOF, or until an unmatched '}' when in_arg is set
    // (the '}' is left for the caller). Environments and bare groups must
    // balance within the sequence.
    void parse_sequence(std::vector<Item>& items, bool in_arg) {
        std::vector<std::pair<std::string, SourceSpan>> env_stack;
        int bare_depth = 0;
        std::vector<SourceSpan> bare_spans;

        while (!eof()) {
            const char c = peek();
            SourceSpan span = span_start();
            if (c == '}') {
                if (bare_depth > 0) {
                    --bare_depth;
                    bare_spans.pop_back();
                    advance_cp();
                    items.push_back(punct(span, "}"));
                    continue;
                }
                if (in_arg) break;
                advance_cp();
                fail(ParseErrorCode::UnterminatedGroup, close_span(span),
                     "unmatched '}'");
            } else if (c == '{') {
                ++bare_depth;
                bare_spans.push_back(span);
                advance_cp();
                items.push_back(punct(close_span(span), "{"));
            } else if (c == '%') {
                items.push_back(scan_comment());
            } else if (c == '\\') {
                parse_command(items, env_stack);
            } else if (is_ws(c)) {
                items.push_back(scan_whitespace());
            } else {
                items.push_back(scan_word_or_punct());
            }
        }
        if (!env_stack.empty())
            fail(ParseErrorCode::UnbalancedEnvironment, env_stack.back().second,
                 "environment '" + env_stack.back().first + "' not closed");
        if (bare_depth > 0)
            fail(ParseErrorCode::UnterminatedGroup, bare_spans.back(),
                 "group not closed");
        if (eof() && in_arg)
            fail(ParseErrorCode::UnterminatedGroup, span_start(),
                 "argument not closed");
    }

    Item punct(SourceSpan span, std::string txt) {
        Item it;
        it.kind = ItemKind::Punctuation;
        it.text = std::move(txt);
        it.span = span;
        it.span.byte_end = it.span.byte_start + it.text.size();
        return it;
    }

    Item scan_comment() {
        Item it;
        it.kind = ItemKind::Comment;
        it.span = span_start();
        while (!eof() && peek() != '\n') advance_cp();
        it.span = close_span(it.span);
        it.text = std::string(src_.substr(it.span.byte_start,
                                          it.span.byte_end - it.span.byte_start));
        return it;
    }

    Item scan_whitespace() {
        Item it;
        it.kind = ItemKind::Whitespace;
        it.span = span_start();
        while (!eof() && is_ws(peek())) advance_cp();
        it.span = close_span(it.span);
        it.text = std::string(src_.substr(it.span.byte_start,
                                          it.span.byte_end - it.span.byte_start));
        return it;
    }

    Item scan_word_or_punct() {
        SourceSpan span = span_start();
        std::size_t probe = pos_;
        char32_t cp = text::decode_utf8(src_, probe);
        Item it;
        it.span = span;
        if (text::is_word_char(cp)) {
            it.kind = ItemKind::Word;
            while (!eof()) {
                probe = pos_;
                cp = text::decode_utf8(src_, probe);
                if (!text::is_word_char(cp)) break;
                advance_cp();
            }
        } else {
            it.kind = ItemKind::Punctuation;
            advance_cp();
        }
        it.span = close_span(it.span);
        it.text = std::string(src_.substr(it.span.byte_start,
                                          it.span.byte_end - it.span.byte_start));
        return it;
    }

    std::string scan_command_name() {
        std::string name;
        if (eof()) return name;
        if (std::isalpha(static_cast<unsigned char>(peek()))) {
            while (!eof() && std::isalpha(static_cast<unsigned char>(peek()))) {
                name.push_back(peek());
                advance_cp();
            }
        } else {
            std::size_t before = pos_;
            advance_cp();
            name = std::string(src_.substr(before, pos_ - before));
        }
        return name;
    }

    // Reads a braced env name for \begin / \end.
    std::string scan_env_name(SourceSpan at) {
        if (eof() || peek() != '{')
            fail(ParseErrorCode::UnbracedArgument, close_span(at),
                 "environment name must be braced");
        advance_cp();
        std::string name;
        while (!eof() && peek() != '}') {
            name.push_back(peek());
            advance_cp();
        }
        if (eof())
            fail(ParseErrorCode::UnterminatedGroup, close_span(at),
                 "environment name not closed");
        advance_cp();  // '}'
        return name;
    }

    Arg parse_arg(ArgMode mode, const std::string& owner, SourceSpan at) {
        if (eof() || peek() != '{')
            fail(ParseErrorCode::UnbracedArgument, close_span(at),
                 "argument of '" + owner + "' must be braced");
        advance_cp();  // '{'
        Arg arg;
        arg.mode = mode;
        if (mode == ArgMode::Parsed) {
            parse_sequence(arg.items, /*in_arg=*/true);
            if (eof())
                fail(ParseErrorCode::UnterminatedGroup, close_span(at),
                     "argument of '" + owner + "' not closed");
            advance_cp();  // '}'
        } else {
            int depth = 0;
            std::string raw;
            while (!eof()) {
                const char c = peek();
                if (c == '{') ++depth;
                if (c == '}') {
                    if (depth == 0) break;
                    --depth;
                }
                std::size_t before = pos_;
                advance_cp();
                raw += std::string(src_.substr(before, pos_ - before));
            }
            if (eof())
                fail(ParseErrorCode::UnterminatedGroup, close_span(at),
                     "argument of '" + owner + "' not closed");
            advance_cp();  // '}'
            if (mode == ArgMode::Identifier && !valid_identifier(raw))
                fail(ParseErrorCode::BadArgument, close_span(at),
                     "'" + raw + "' is not a valid identifier");
            arg.raw = std::move(raw);
        }
        return arg;
    }

    void parse_command(std::vector<Item>& items,
                       std::vector<std::pair<std::string, SourceSpan>>& env_stack) {
        SourceSpan span = span_start();
        advance_cp();  // '\'
        std::string name = scan_command_name();

        Item it;
        it.span = span;
        if (name == "begin") {
            it.kind = ItemKind::BeginEnv;
            it.name = scan_env_name(span);
            auto spec = registry_.environments.find(it.name);
            if (spec != registry_.environments.end()) {
                for (ArgMode mode : spec->second.arg_modes)
                    it.args.push_back(parse_arg(mode, it.name, span));
            }
            env_stack.emplace_back(it.name, span);
        } else if (name == "end") {
            it.kind = ItemKind::EndEnv;
            it.name = scan_env_name(span);
            if (env_stack.empty() || env_stack.back().first != it.name)
                fail(ParseErrorCode::UnbalancedEnvironment, close_span(span),
                     "\\end{" + it.name + "} does not match an open environment");
            env_stack.pop_back();
        } else {
            it.kind = ItemKind::Command;
            it.name = name;
            auto spec = registry_.commands.find(name);
            if (spec != registry_.commands.end()) {
                for (ArgMode mode : spec->second.arg_modes)
                    it.args.push_back(parse_arg(mode, name, span));
            }
        }
        it.span = close_span(it.span);
        items.push_back(std::move(it));
    }
};

void serialize_item(const Item& it, std::string& out) {
    switch (it.kind) {
        case ItemKind::Command:
            out += '\\';
            out += it.name;
            break;
        case ItemKind::BeginEnv:
            out += "\\begin{";
            out += it.name;
            out += '}';
            break;
        case ItemKind::EndEnv:
            out += "\\end{";
            out += it.name;
            out += '}';
            return;
        default:
            out += it.text;
            return;
    }
    for (const Arg& arg : it.args) {
        out += '{';
        if (arg.mode == ArgMode::Parsed) {
            for (const Item& sub : arg.items) serialize_item(sub, out);
        } else {
            out += arg.raw;
        }
        out += '}';
    }
}

void plain_items(const std::vector<Item>& items, std::string& out) {
    for (const Item& it : items) {
        switch (it.kind) {
            case ItemKind::Word:
                out += it.text;
                break;
            case ItemKind::Punctuation:
                if (it.text == "~" || it.text == "{" || it.text == "}")
                    out += ' ';
                else
                    out += it.text;
                break;
            case ItemKind::Whitespace:
                out += ' ';
                break;
            case ItemKind::Comment:
            case ItemKind::Opaque:
                break;
            case ItemKind::Command:
            case ItemKind::BeginEnv: {
                // The display text of a command is its last Parsed argument.
                const Arg* display = nullptr;
                for (const Arg& arg : it.args)
                    if (arg.mode == ArgMode::Parsed) display = &arg;
                if (display) plain_items(display->items, out);
                break;
            }
            case ItemKind::EndEnv:
                break;
        }
    }
}

}  // namespace

ParseError::ParseError(ParseErrorCode code, SourceSpan span, std::string detail)
    : std::runtime_error(std::string(code_name(code)) + " at line " +
                         std::to_string(span.line) + ":" +
                         std::to_string(span.column) + ": " + detail),
      code_(code),
      span_(span) {}

void register_command(Registry& registry, CommandSpec spec) {
    auto& table = spec.env ? registry.environments : registry.commands;
    table[spec.name] = std::move(spec);
}

Registry default_dialect() {
    using M = ArgMode;
    Registry r;
    register_command(r, {"letter", true, {M::Identifier, M::Identifier, M::Identifier, M::Identifier, M::Raw}});
    register_command(r, {"annotation", true, {M::Identifier}});
    register_command(r, {"klist", true, {}});
    register_command(r, {"xperson", false, {M::Identifier, M::Parsed}});
    register_command(r, {"xlocation", false, {M::Identifier, M::Parsed}});
    register_command(r, {"xl", false, {M::Identifier, M::Parsed}});
    register_command(r, {"ksection", false, {M::Parsed}});
    register_command(r, {"kitem", false, {M::Identifier}});
    register_command(r, {"defperson", false, {M::Identifier, M::Raw}});
    register_command(r, {"deflocation", false, {M::Identifier, M::Raw}});
    return r;
}

ItemStream parse_document(std::string_view source, const Registry& registry,
                          std::string source_name) {
    Parser parser(source, registry);
    ItemStream stream;
    stream.items = parser.run();
    stream.source_name = std::move(source_name);
    return stream;
}

std::string serialize_items(const std::vector<Item>& items) {
    std::string out;
    for (const Item& it : items) serialize_item(it, out);
    return out;
}

std::string serialize_markup(const ItemStream& stream) {
    return serialize_items(stream.items);
}

std::string to_plain_text(const std::vector<Item>& items) {
    std::string raw;
    plain_items(items, raw);
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (c == ' ') {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out += ' ';
        pending_space = false;
        out += c;
    }
    return out;
}

std::string to_plain_text(const ItemStream& stream) {
    return to_plain_text(stream.items);
}

bool items_equal(const std::vector<Item>& a, const std::vector<Item>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Item& x = a[i];
        const Item& y = b[i];
        if (x.kind != y.kind || x.name != y.name || x.args.size() != y.args.size())
            return false;
        if (x.kind != ItemKind::Command && x.kind != ItemKind::BeginEnv &&
            x.kind != ItemKind::EndEnv && x.text != y.text)
            return false;
        for (std::size_t j = 0; j < x.args.size(); ++j) {
            const Arg& p = x.args[j];
            const Arg& q = y.args[j];
            if (p.mode != q.mode || p.raw != q.raw) return false;
            if (!items_equal(p.items, q.items)) return false;
        }
    }
    return true;
}

}  // namespace letterkit::markup
