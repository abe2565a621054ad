#include "letterkit/assist.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "letterkit/text.hpp"

namespace letterkit::assist {

using facts::CacheSet;
using facts::FactTriple;
using facts::PersonFacts;

namespace {

[[noreturn]] void fail(AssistErrorCode code, std::string detail, int line = 0,
                       int col = 0) {
    throw AssistError(code, std::move(detail), line, col);
}

// --- term tokenizer ---

enum class TokKind { Atom, Quoted, Integer, LParen, RParen, LBracket, RBracket, Comma, Equals, End };

struct Tok {
    TokKind kind = TokKind::End;
    std::string value;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Tok next() {
        skip_ws();
        Tok t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) return t;
        const char c = src_[pos_];
        switch (c) {
            case '(': return simple(TokKind::LParen);
            case ')': return simple(TokKind::RParen);
            case '[': return simple(TokKind::LBracket);
            case ']': return simple(TokKind::RBracket);
            case ',': return simple(TokKind::Comma);
            case '=': return simple(TokKind::Equals);
            case '.': return simple(TokKind::Comma);  // clause-final '.' acts as separator
            default: break;
        }
        if (c == '\'') {
            advance();
            t.kind = TokKind::Quoted;
            while (pos_ < src_.size()) {
                if (src_[pos_] == '\'') {
                    if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '\'') {
                        t.value.push_back('\'');
                        advance();
                        advance();
                        continue;
                    }
                    advance();
                    return t;
                }
                t.value.push_back(src_[pos_]);
                advance();
            }
            fail(AssistErrorCode::SyntaxError, "unterminated quoted atom", t.line, t.col);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
            t.kind = TokKind::Integer;
            if (c == '-') {
                t.value.push_back(c);
                advance();
            }
            while (pos_ < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                t.value.push_back(src_[pos_]);
                advance();
            }
            return t;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.kind = TokKind::Atom;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_')) {
                t.value.push_back(src_[pos_]);
                advance();
            }
            return t;
        }
        fail(AssistErrorCode::SyntaxError,
             std::string("unexpected character '") + c + "'", line_, col_);
    }

private:
    Tok simple(TokKind kind) {
        Tok t;
        t.kind = kind;
        t.line = line_;
        t.col = col_;
        advance();
        return t;
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '%') {  // comment to end of line
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
                continue;
            }
            if (!std::isspace(static_cast<unsigned char>(c))) break;
            advance();
        }
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class RuleParser {
public:
    explicit RuleParser(std::string_view src) : lex_(src) { shift(); }

    std::vector<AssistanceRule> parse() {
        std::vector<AssistanceRule> rules;
        while (cur_.kind != TokKind::End) {
            if (cur_.kind == TokKind::Comma) {
                shift();
                continue;
            }
            rules.push_back(parse_clause());
        }
        return rules;
    }

private:
    void shift() { cur_ = lex_.next(); }

    void expect(TokKind kind, const char* what) {
        if (cur_.kind != kind)
            fail(AssistErrorCode::SyntaxError, std::string("expected ") + what,
                 cur_.line, cur_.col);
        shift();
    }

    EntityKind parse_kind() {
        if (cur_.kind != TokKind::Atom)
            fail(AssistErrorCode::SyntaxError, "expected entity kind", cur_.line,
                 cur_.col);
        EntityKind kind;
        if (cur_.value == "person")
            kind = EntityKind::Person;
        else if (cur_.value == "location")
            kind = EntityKind::Location;
        else
            fail(AssistErrorCode::SyntaxError,
                 "unknown entity kind '" + cur_.value + "'", cur_.line, cur_.col);
        shift();
        return kind;
    }

    AttrValue parse_value() {
        AttrValue v;
        if (cur_.kind == TokKind::Quoted || cur_.kind == TokKind::Integer) {
            v.value = cur_.value;
            shift();
            return v;
        }
        if (cur_.kind == TokKind::Atom && cur_.value == "lang") {
            shift();
            expect(TokKind::LParen, "'('");
            if (cur_.kind != TokKind::Atom)
                fail(AssistErrorCode::SyntaxError, "expected language tag", cur_.line,
                     cur_.col);
            v.lang = cur_.value;
            shift();
            expect(TokKind::Comma, "','");
            if (cur_.kind != TokKind::Quoted)
                fail(AssistErrorCode::SyntaxError, "expected quoted text", cur_.line,
                     cur_.col);
            v.value = cur_.value;
            shift();
            expect(TokKind::RParen, "')'");
            return v;
        }
        if (cur_.kind == TokKind::Atom) {
            v.value = cur_.value;
            shift();
            return v;
        }
        fail(AssistErrorCode::SyntaxError, "expected a value", cur_.line, cur_.col);
    }

    AttrList parse_attr_list() {
        AttrList attrs;
        expect(TokKind::LBracket, "'['");
        while (cur_.kind != TokKind::RBracket) {
            if (cur_.kind != TokKind::Atom)
                fail(AssistErrorCode::SyntaxError, "expected attribute name",
                     cur_.line, cur_.col);
            std::string name = cur_.value;
            shift();
            expect(TokKind::Equals, "'='");
            attrs.emplace_back(std::move(name), parse_value());
            if (cur_.kind == TokKind::Comma) shift();
        }
        shift();  // ']'
        return attrs;
    }

    std::vector<std::string> parse_word_list() {
        std::vector<std::string> words;
        expect(TokKind::LBracket, "'['");
        while (cur_.kind != TokKind::RBracket) {
            if (cur_.kind != TokKind::Quoted && cur_.kind != TokKind::Atom)
                fail(AssistErrorCode::SyntaxError, "expected a word", cur_.line,
                     cur_.col);
            words.push_back(cur_.value);
            shift();
            if (cur_.kind == TokKind::Comma) shift();
        }
        shift();
        return words;
    }

    ContextCondition parse_condition() {
        ContextCondition cond;
        expect(TokKind::LBracket, "'['");
        while (cur_.kind != TokKind::RBracket) {
            if (cur_.kind != TokKind::Atom)
                fail(AssistErrorCode::SyntaxError, "expected condition name",
                     cur_.line, cur_.col);
            std::string name = cur_.value;
            shift();
            expect(TokKind::Equals, "'='");
            if (name == "near_word_in") {
                cond.near_words = parse_word_list();
            } else if (name == "radius") {
                if (cur_.kind != TokKind::Integer)
                    fail(AssistErrorCode::SyntaxError, "expected integer radius",
                         cur_.line, cur_.col);
                cond.radius = std::stoi(cur_.value);
                shift();
            } else {
                fail(AssistErrorCode::SyntaxError,
                     "unknown condition '" + name + "'", cur_.line, cur_.col);
            }
            if (cur_.kind == TokKind::Comma) shift();
        }
        shift();
        return cond;
    }

    AssistanceRule parse_clause() {
        if (cur_.kind != TokKind::Atom)
            fail(AssistErrorCode::SyntaxError, "expected a clause", cur_.line,
                 cur_.col);
        const std::string head = cur_.value;
        const int line = cur_.line;
        const int col = cur_.col;
        shift();
        expect(TokKind::LParen, "'('");
        AssistanceRule rule;
        if (head == "entity") {
            rule.kind = AssistanceRule::Kind::Bias;
            rule.spec.kind = parse_kind();
            expect(TokKind::Comma, "','");
            rule.spec.constraints = parse_attr_list();
            expect(TokKind::Comma, "','");
            rule.condition = parse_condition();
        } else if (head == "supplement") {
            rule.kind = AssistanceRule::Kind::Supplement;
            rule.spec.kind = parse_kind();
            expect(TokKind::Comma, "','");
            rule.spec.constraints = parse_attr_list();
            expect(TokKind::Comma, "','");
            rule.additions = parse_attr_list();
        } else if (head == "register") {
            rule.kind = AssistanceRule::Kind::Register;
            rule.register_kind = parse_kind();
            expect(TokKind::Comma, "','");
            rule.additions = parse_attr_list();
        } else if (head == "exclude") {
            rule.kind = AssistanceRule::Kind::Exclude;
            if (cur_.kind != TokKind::Quoted && cur_.kind != TokKind::Atom)
                fail(AssistErrorCode::SyntaxError, "expected the excluded word",
                     cur_.line, cur_.col);
            rule.exclude_word = cur_.value;
            shift();
            expect(TokKind::Comma, "','");
            expect(TokKind::LBracket, "'['");
            while (cur_.kind != TokKind::RBracket) {
                if (cur_.kind != TokKind::Atom)
                    fail(AssistErrorCode::SyntaxError, "expected entity kind",
                         cur_.line, cur_.col);
                if (cur_.value == "person")
                    rule.exclude_kinds.push_back(EntityKind::Person);
                else if (cur_.value == "location")
                    rule.exclude_kinds.push_back(EntityKind::Location);
                else
                    fail(AssistErrorCode::SyntaxError,
                         "unknown entity kind '" + cur_.value + "'", cur_.line,
                         cur_.col);
                shift();
                if (cur_.kind == TokKind::Comma) shift();
            }
            shift();
        } else {
            fail(AssistErrorCode::SyntaxError, "unknown clause '" + head + "'", line,
                 col);
        }
        expect(TokKind::RParen, "')'");
        return rule;
    }

    Lexer lex_;
    Tok cur_;
};

std::optional<int> leading_year(std::string_view s) {
    std::size_t j = 0;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == 0) return std::nullopt;
    int v = 0;
    std::from_chars(s.data(), s.data() + j, v);
    return v;
}

bool person_matches(const PersonFacts& p, const AttrList& constraints) {
    for (const auto& [attr, want] : constraints) {
        const auto folded_want = text::fold_name(text::trim(want.value));
        bool match = false;
        if (attr == "name") {
            const auto preferred = p.preferred_name();
            match = text::fold_name(text::trim(preferred)) == folded_want ||
                    facts::last_name_key(preferred) == folded_want;
        } else if (attr == "year_of_birth" || attr == "dateOfBirth") {
            if (const auto* values = p.get("dateOfBirth")) {
                const auto want_year = leading_year(want.value);
                for (const auto& v : *values)
                    if (want_year && leading_year(v.value) == want_year) match = true;
            }
        } else {
            if (const auto* values = p.get(attr)) {
                for (const auto& v : *values)
                    if (text::fold_name(text::trim(v.value)) == folded_want)
                        match = true;
            }
        }
        if (!match) return false;
    }
    return true;
}

std::string describe_spec(const EntitySpecifier& spec) {
    std::string s = spec.kind == EntityKind::Person ? "person[" : "location[";
    for (std::size_t i = 0; i < spec.constraints.size(); ++i) {
        if (i) s += ", ";
        s += spec.constraints[i].first + "='" + spec.constraints[i].second.value + "'";
    }
    s += "]";
    return s;
}

std::string bias_surface(const EntitySpecifier& spec) {
    for (const auto& [attr, value] : spec.constraints)
        if (attr == "name") return facts::last_name_key(value.value);
    return {};
}

}  // namespace

AssistError::AssistError(AssistErrorCode code, std::string detail, int line, int col)
    : std::runtime_error([&] {
          std::string s;
          switch (code) {
              case AssistErrorCode::SyntaxError: s = "SyntaxError"; break;
              case AssistErrorCode::NoMatch: s = "NoMatch"; break;
              case AssistErrorCode::Ambiguous: s = "Ambiguous"; break;
              case AssistErrorCode::InvalidRule: s = "InvalidRule"; break;
              case AssistErrorCode::ResolutionFailed: s = "ResolutionFailed"; break;
          }
          if (line > 0)
              s += " at " + std::to_string(line) + ":" + std::to_string(col);
          return s + ": " + detail;
      }()),
      code_(code),
      line_(line),
      col_(col) {}

std::vector<AssistanceRule> parse_assistance_doc(std::string_view text) {
    return RuleParser(text).parse();
}

std::string resolve_entity_specifier(const EntitySpecifier& spec,
                                     const CacheSet& caches) {
    if (spec.constraints.empty())
        fail(AssistErrorCode::InvalidRule, "specifier without constraints");
    std::vector<std::string> matches;
    if (spec.kind == EntityKind::Person) {
        for (const auto& p : caches.persons)
            if (person_matches(p, spec.constraints)) matches.push_back(p.subject);
    } else {
        for (const auto& rec : caches.locations) {
            bool ok = true;
            for (const auto& [attr, want] : spec.constraints) {
                const auto folded_want = text::fold_name(text::trim(want.value));
                bool match = false;
                if (attr == "name") {
                    if (text::fold_name(text::trim(rec.name)) == folded_want)
                        match = true;
                    for (const auto& alt : rec.alternate_names)
                        if (text::fold_name(text::trim(alt)) == folded_want)
                            match = true;
                } else if (attr == "feature_class") {
                    match = rec.feature_class == want.value;
                }
                if (!match) ok = false;
            }
            if (ok) matches.push_back(rec.geo_id);
        }
    }
    if (matches.empty())
        fail(AssistErrorCode::NoMatch, describe_spec(spec));
    if (matches.size() > 1) {
        std::string list;
        for (const auto& id : matches) list += " " + id;
        fail(AssistErrorCode::Ambiguous, describe_spec(spec) + " matches" + list);
    }
    return matches.front();
}

bool CompiledAssistance::excluded(EntityKind kind,
                                  std::string_view folded_word) const {
    return exclusions.count({kind, std::string(folded_word)}) > 0;
}

CompiledAssistance apply_assistance(const std::vector<AssistanceRule>& rules,
                                    const facts::FactBase& pristine) {
    std::vector<FactTriple> triples = pristine.triples;
    std::vector<std::string> errors;
    int register_counter = 0;

    // Registrations and supplements first so that later bias specifiers can
    // resolve against the adjusted facts.
    for (const auto& rule : rules) {
        if (rule.kind == AssistanceRule::Kind::Register) {
            const std::string id = "local:" + std::to_string(++register_counter);
            for (const auto& [attr, value] : rule.additions) {
                FactTriple t;
                t.subject = id;
                t.predicate = attr == "name" ? "preferredNameForThePerson" : attr;
                t.object.value = value.value;
                t.object.lang = value.lang;
                triples.push_back(std::move(t));
            }
        }
    }
    facts::CacheSet staged = facts::build_caches(triples, pristine.locations);
    for (const auto& rule : rules) {
        if (rule.kind != AssistanceRule::Kind::Supplement) continue;
        try {
            const auto id = resolve_entity_specifier(rule.spec, staged);
            for (const auto& [attr, value] : rule.additions) {
                if (attr == "preferredNameForThePerson" || attr == "name") {
                    errors.push_back("supplement may not change the preferred name of '" +
                                     id + "'");
                    continue;
                }
                FactTriple t;
                t.subject = id;
                t.predicate = attr;
                t.object.value = value.value;
                t.object.lang = value.lang;
                triples.push_back(std::move(t));
            }
        } catch (const AssistError& e) {
            errors.push_back(e.what());
        }
    }

    CompiledAssistance compiled;
    compiled.base = facts::make_fact_base(std::move(triples), pristine.locations);

    for (const auto& rule : rules) {
        switch (rule.kind) {
            case AssistanceRule::Kind::Bias: {
                try {
                    BiasEntry bias;
                    bias.entity_id = resolve_entity_specifier(rule.spec,
                                                              compiled.base.caches);
                    bias.is_location = rule.spec.kind == EntityKind::Location;
                    bias.surface_key = bias_surface(rule.spec);
                    if (bias.surface_key.empty()) {
                        errors.push_back("bias rule needs a name constraint: " +
                                         describe_spec(rule.spec));
                        break;
                    }
                    bias.near_words = rule.condition.near_words;
                    bias.radius = rule.condition.radius;
                    compiled.biases.push_back(std::move(bias));
                } catch (const AssistError& e) {
                    errors.push_back(e.what());
                }
                break;
            }
            case AssistanceRule::Kind::Exclude: {
                for (EntityKind kind : rule.exclude_kinds)
                    compiled.exclusions.insert(
                        {kind, text::fold_name(rule.exclude_word)});
                break;
            }
            default:
                break;
        }
    }

    if (!errors.empty()) {
        std::string joined;
        for (const auto& e : errors) {
            if (!joined.empty()) joined += "; ";
            joined += e;
        }
        fail(AssistErrorCode::ResolutionFailed, joined);
    }
    return compiled;
}

}  // namespace letterkit::assist
