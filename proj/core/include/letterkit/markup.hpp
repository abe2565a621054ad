#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace letterkit::markup {

struct SourceSpan {
    std::size_t byte_start = 0;
    std::size_t byte_end = 0;  // exclusive
    int line = 1;
    int column = 1;
};

enum class ItemKind {
    Word,
    Punctuation,
    Whitespace,
    Comment,
    Command,
    BeginEnv,
    EndEnv,
    Opaque,
};

enum class ArgMode { Parsed, Raw, Identifier };

struct Arg;

struct Item {
    ItemKind kind = ItemKind::Word;
    std::string text;  // verbatim source slice for non-command items
    std::string name;  // command/environment name
    std::vector<Arg> args;
    SourceSpan span;
};

struct Arg {
    ArgMode mode = ArgMode::Parsed;
    std::string raw;          // Raw / Identifier content
    std::vector<Item> items;  // Parsed content
};

struct ItemStream {
    std::vector<Item> items;
    std::string source_name;
};

struct CommandSpec {
    std::string name;
    bool env = false;
    std::vector<ArgMode> arg_modes;
};

struct Registry {
    std::map<std::string, CommandSpec> commands;
    std::map<std::string, CommandSpec> environments;
    // When set and present in the source, everything before the first
    // occurrence of this marker is kept as a single unparsed Opaque item.
    std::optional<std::string> preamble_end_marker;
};

enum class ParseErrorCode {
    UnbalancedEnvironment,
    UnbracedArgument,
    UnterminatedGroup,
    BadArgument,
};

class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorCode code, SourceSpan span, std::string detail);
    ParseErrorCode code() const { return code_; }
    const SourceSpan& span() const { return span_; }

private:
    ParseErrorCode code_;
    SourceSpan span_;
};

void register_command(Registry& registry, CommandSpec spec);

// letter, annotation, klist environments plus xperson, xlocation, xl,
// ksection, kitem, defperson, deflocation.
Registry default_dialect();

ItemStream parse_document(std::string_view source, const Registry& registry,
                          std::string source_name = {});

std::string serialize_markup(const ItemStream& stream);
std::string serialize_items(const std::vector<Item>& items);

std::string to_plain_text(const ItemStream& stream);
std::string to_plain_text(const std::vector<Item>& items);

// Structural equality ignoring spans.
bool items_equal(const std::vector<Item>& a, const std::vector<Item>& b);

}  // namespace letterkit::markup
