#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "letterkit/assist.hpp"
#include "letterkit/edition.hpp"
#include "letterkit/facts.hpp"
#include "letterkit/tokens.hpp"

namespace letterkit::ner {

enum class FeatureId {
    IsNoStopword,
    IsNoCommonSubstantive,
    IsCapitalized,
    NameExactness,
    IsInWikipedia,
    DateOfBirthMatchesContext,
    HasOccupationInContext,
    IsLinkedToOthersInContext,
};

const char* feature_name(FeatureId id);

// Lower cost class = cheaper, evaluated earlier. Syntactic features never
// consult the fact store.
bool is_syntactic(FeatureId id);
int cost_class(FeatureId id);

struct FeatureOutcome {
    FeatureId id = FeatureId::NameExactness;
    int outcome = 0;  // 0 = strongest support
    std::string note;
};

using RankKey = std::vector<int>;

struct Candidate {
    std::string entity_id;
    bool is_location = false;
    RankKey rank_key;
    std::vector<FeatureOutcome> explanation;
};

enum class IdentificationKind { Person, Location, Date };

struct Identification {
    tokens::TokenOccurrence occurrence;
    IdentificationKind kind = IdentificationKind::Person;
    Candidate best;
    std::vector<Candidate> alternates;  // sorted by rank key
    std::optional<edition::HistDate> date;
};

struct NerConfig {
    int window_radius = 50;
    int paragraph_radius = 2;
    // Key positions in order; outcomes of earlier features dominate.
    std::vector<FeatureId> feature_priority = {
        FeatureId::NameExactness,
        FeatureId::DateOfBirthMatchesContext,
        FeatureId::HasOccupationInContext,
        FeatureId::IsLinkedToOthersInContext,
        FeatureId::IsInWikipedia,
    };
    // A candidate is accepted when rank_key[i] <= acceptance_prefix[i] for
    // every configured prefix position.
    std::vector<int> acceptance_prefix = {2};
    std::set<std::string> stopwords;            // folded
    std::set<std::string> common_substantives;  // folded
    std::vector<std::string> role_words = {"König",  "Herzog", "Bischof",
                                           "Kaiser", "Graf",   "Fürst"};
    std::vector<std::string> cardinal_cues = {"Nr", "No", "Nummer", "Seite", "S"};
    // Preferred geonames feature classes, best first.
    std::vector<std::string> feature_class_preference = {"P", "A"};
    std::optional<int> creation_year;
};

struct ContextWindow {
    std::vector<std::string> folded_words;  // window tokens, normalized
    std::set<std::string> nearby_identified;
    std::optional<int> creation_year;
};

ContextWindow build_context(const std::vector<tokens::TokenOccurrence>& all_tokens,
                            std::size_t position, const NerConfig& config);

std::pair<std::vector<FeatureOutcome>, RankKey> evaluate_features(
    const facts::PersonFacts& person, const tokens::TokenOccurrence& occurrence,
    const ContextWindow& context, const facts::CacheSet& caches,
    const NerConfig& config);

// Stable lexicographic ascending sort on (rank_key, entity id).
void rank_candidates(std::vector<Candidate>& candidates);

bool passes_acceptance(const RankKey& key, const NerConfig& config);

std::vector<Identification> detect_dates(
    const std::vector<tokens::TokenOccurrence>& tokens, const NerConfig& config);

std::vector<Identification> detect_persons(
    const std::vector<tokens::TokenOccurrence>& tokens,
    const facts::CacheSet& caches, const NerConfig& config,
    const assist::CompiledAssistance* assistance = nullptr);

std::vector<Identification> detect_persons_by_role(
    const std::vector<tokens::TokenOccurrence>& tokens,
    const facts::CacheSet& caches, const NerConfig& config,
    const assist::CompiledAssistance* assistance = nullptr);

std::vector<Identification> detect_locations(
    const std::vector<tokens::TokenOccurrence>& tokens,
    const facts::CacheSet& caches, const NerConfig& config,
    const assist::CompiledAssistance* assistance = nullptr);

std::string explain_candidate(const Candidate& candidate,
                              const facts::CacheSet& caches);

// Line record: doc, byte span, kind, entity, rank key, alternates.
std::string identification_record(const Identification& id);

std::string rank_key_string(const RankKey& key);

}  // namespace letterkit::ner
