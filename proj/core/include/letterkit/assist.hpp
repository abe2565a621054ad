#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "letterkit/facts.hpp"

namespace letterkit::assist {

enum class EntityKind { Person, Location };

struct AttrValue {
    std::string value;
    std::string lang;  // from lang(tag,'...') terms

    bool operator==(const AttrValue&) const = default;
};

using AttrList = std::vector<std::pair<std::string, AttrValue>>;

struct EntitySpecifier {
    EntityKind kind = EntityKind::Person;
    AttrList constraints;
};

struct ContextCondition {
    std::vector<std::string> near_words;
    int radius = 0;  // 0 = use the NER window radius
};

struct AssistanceRule {
    enum class Kind { Bias, Supplement, Register, Exclude };
    Kind kind = Kind::Bias;
    EntitySpecifier spec;       // Bias, Supplement
    ContextCondition condition; // Bias
    AttrList additions;         // Supplement additions / Register attributes
    EntityKind register_kind = EntityKind::Person;
    std::string exclude_word;
    std::vector<EntityKind> exclude_kinds;
};

enum class AssistErrorCode { SyntaxError, NoMatch, Ambiguous, InvalidRule, ResolutionFailed };

class AssistError : public std::runtime_error {
public:
    AssistError(AssistErrorCode code, std::string detail, int line = 0, int col = 0);
    AssistErrorCode code() const { return code_; }
    int line() const { return line_; }
    int column() const { return col_; }

private:
    AssistErrorCode code_;
    int line_;
    int col_;
};

// Term-style clause syntax:
//   entity(person, [name='Tacitus', professionOrOccupation='Historiker'],
//          [near_word_in=['Römern']]),
//   supplement(person, [name='...'], [attr=lang(de,'...')]),
//   register(person, [name='...', ...]),
//   exclude('Wort', [person, location]),
std::vector<AssistanceRule> parse_assistance_doc(std::string_view text);

// Exactly one entity must satisfy all constraints; NoMatch / Ambiguous otherwise.
std::string resolve_entity_specifier(const EntitySpecifier& spec,
                                     const facts::CacheSet& caches);

struct BiasEntry {
    std::string surface_key;  // folded word the bias applies to
    std::vector<std::string> near_words;
    int radius = 0;
    std::string entity_id;
    bool is_location = false;
};

struct CompiledAssistance {
    facts::FactBase base;  // pristine base plus registrations and supplements
    std::vector<BiasEntry> biases;
    std::set<std::pair<EntityKind, std::string>> exclusions;  // kind, folded word

    bool excluded(EntityKind kind, std::string_view folded_word) const;
};

// Applies the rule set to a pristine fact base; re-application with a new
// rule set fully replaces the previous compiled state.
CompiledAssistance apply_assistance(const std::vector<AssistanceRule>& rules,
                                    const facts::FactBase& pristine);

}  // namespace letterkit::assist
