#include "letterkit/ner.hpp"

#include <algorithm>
#include <unordered_set>

#include "letterkit/text.hpp"

namespace letterkit::tokens {

using markup::Arg;
using markup::ArgMode;
using markup::Item;
using markup::ItemKind;

namespace {

struct Walker {
    std::vector<TokenOccurrence> out;
    std::string doc_id;
    std::size_t index = 0;
    std::size_t paragraph = 0;

    void walk(const std::vector<Item>& items, ItemPath prefix,
              const std::string& pre_id, bool pre_loc) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            const Item& it = items[i];
            if (it.kind == ItemKind::Word) {
                TokenOccurrence tok;
                tok.doc_id = doc_id;
                tok.index = index++;
                tok.surface = it.text;
                tok.span = it.span;
                tok.paragraph = paragraph;
                tok.path = prefix;
                tok.path.push_back(i);
                tok.pre_identified = pre_id;
                tok.pre_identified_location = pre_loc;
                out.push_back(std::move(tok));
                continue;
            }
            if (it.kind == ItemKind::Whitespace) {
                if (std::count(it.text.begin(), it.text.end(), '\n') >= 2)
                    ++paragraph;
                continue;
            }
            const bool marks_entity =
                it.kind == ItemKind::Command &&
                (it.name == "xperson" || it.name == "xlocation") &&
                !it.args.empty() && it.args[0].mode == ArgMode::Identifier;
            for (std::size_t a = 0; a < it.args.size(); ++a) {
                if (it.args[a].mode != ArgMode::Parsed) continue;
                ItemPath sub = prefix;
                sub.push_back(i);
                sub.push_back(a);
                if (marks_entity)
                    walk(it.args[a].items, sub, it.args[0].raw,
                         it.name == "xlocation");
                else
                    walk(it.args[a].items, sub, pre_id, pre_loc);
            }
        }
    }
};

}  // namespace

std::vector<TokenOccurrence> tokenize_items(const std::vector<Item>& items,
                                            const std::string& doc_id) {
    Walker w;
    w.doc_id = doc_id;
    w.walk(items, {}, {}, false);
    return w.out;
}

std::vector<TokenOccurrence> tokenize_plain(std::string_view plain,
                                            const std::string& doc_id) {
    std::vector<TokenOccurrence> out;
    std::size_t pos = 0;
    std::size_t index = 0;
    std::size_t paragraph = 0;
    int line = 1, col = 1;
    int pending_newlines = 0;
    while (pos < plain.size()) {
        std::size_t probe = pos;
        const char32_t cp = text::decode_utf8(plain, probe);
        if (!text::is_word_char(cp)) {
            if (cp == U'\n') {
                ++pending_newlines;
                if (pending_newlines == 2) ++paragraph;
                ++line;
                col = 1;
            } else {
                if (!(cp == U' ' || cp == U'\t' || cp == U'\r')) pending_newlines = 0;
                ++col;
            }
            pos = probe;
            continue;
        }
        pending_newlines = 0;
        TokenOccurrence tok;
        tok.doc_id = doc_id;
        tok.index = index++;
        tok.paragraph = paragraph;
        tok.span.byte_start = pos;
        tok.span.line = line;
        tok.span.column = col;
        while (pos < plain.size()) {
            probe = pos;
            const char32_t c = text::decode_utf8(plain, probe);
            if (!text::is_word_char(c)) break;
            pos = probe;
            ++col;
        }
        tok.span.byte_end = pos;
        tok.surface = std::string(plain.substr(tok.span.byte_start,
                                               tok.span.byte_end - tok.span.byte_start));
        out.push_back(std::move(tok));
    }
    return out;
}

Item* item_at(std::vector<Item>& items, const ItemPath& path) {
    if (path.empty() || path[0] >= items.size()) return nullptr;
    Item* cur = &items[path[0]];
    std::size_t k = 1;
    while (k + 1 < path.size()) {
        const std::size_t arg = path[k];
        const std::size_t idx = path[k + 1];
        if (arg >= cur->args.size() || cur->args[arg].mode != ArgMode::Parsed ||
            idx >= cur->args[arg].items.size())
            return nullptr;
        cur = &cur->args[arg].items[idx];
        k += 2;
    }
    if (k != path.size()) return nullptr;
    return cur;
}

}  // namespace letterkit::tokens

namespace letterkit::ner {

using facts::CacheSet;
using facts::PersonFacts;
using tokens::TokenOccurrence;

const char* feature_name(FeatureId id) {
    switch (id) {
        case FeatureId::IsNoStopword: return "is-no-stopword";
        case FeatureId::IsNoCommonSubstantive: return "is-no-common-substantive";
        case FeatureId::IsCapitalized: return "is-capitalized";
        case FeatureId::NameExactness: return "name-exactness";
        case FeatureId::IsInWikipedia: return "is-in-wikipedia";
        case FeatureId::DateOfBirthMatchesContext: return "date-of-birth-matches-context";
        case FeatureId::HasOccupationInContext: return "has-an-occupation-mentioned-in-context";
        case FeatureId::IsLinkedToOthersInContext: return "is-linked-to-others-identified-in-context";
    }
    return "feature";
}

bool is_syntactic(FeatureId id) {
    return id == FeatureId::IsNoStopword || id == FeatureId::IsNoCommonSubstantive ||
           id == FeatureId::IsCapitalized;
}

int cost_class(FeatureId id) {
    switch (id) {
        case FeatureId::IsCapitalized: return 0;
        case FeatureId::IsNoStopword: return 1;
        case FeatureId::IsNoCommonSubstantive: return 2;
        case FeatureId::NameExactness: return 3;
        case FeatureId::IsInWikipedia: return 4;
        case FeatureId::DateOfBirthMatchesContext: return 5;
        case FeatureId::HasOccupationInContext: return 6;
        case FeatureId::IsLinkedToOthersInContext: return 7;
    }
    return 8;
}

namespace {

std::optional<int> leading_year(std::string_view s) {
    std::size_t j = 0;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == 0) return std::nullopt;
    return std::stoi(std::string(s.substr(0, j)));
}

bool has_wikipedia_link(const PersonFacts& person) {
    for (const char* pred : {"externalLink", "sameAs", "wikipedia"}) {
        if (const auto* values = person.get(pred)) {
            for (const auto& v : *values)
                if (text::to_lower_ascii(v.value).find("wikipedia") !=
                    std::string::npos)
                    return true;
        }
    }
    return false;
}

std::unordered_set<std::string> object_values(const PersonFacts& person) {
    std::unordered_set<std::string> out;
    for (const auto& [pred, values] : person.by_predicate)
        for (const auto& v : values) out.insert(v.value);
    return out;
}

bool gates_pass(const TokenOccurrence& tok, const NerConfig& config,
                const assist::CompiledAssistance* assistance,
                assist::EntityKind kind) {
    if (!tok.pre_identified.empty()) return false;
    if (!text::starts_capitalized(tok.surface)) return false;
    const auto folded = text::fold_name(tok.surface);
    if (config.stopwords.count(folded)) return false;
    if (config.common_substantives.count(folded)) return false;
    if (assistance && assistance->excluded(kind, folded)) return false;
    return true;
}

// Promotes the preferred entity of the first applicable bias rule to the
// front. Never adds or removes candidates.
void apply_bias(std::vector<Candidate>& candidates, const TokenOccurrence& tok,
                const std::vector<TokenOccurrence>& all_tokens,
                const NerConfig& config,
                const assist::CompiledAssistance* assistance, bool locations) {
    if (!assistance || candidates.empty()) return;
    const auto folded = text::fold_name(tok.surface);
    for (const auto& bias : assistance->biases) {
        if (bias.is_location != locations || bias.surface_key != folded) continue;
        const auto radius =
            static_cast<std::size_t>(bias.radius > 0 ? bias.radius
                                                     : config.window_radius);
        bool near = bias.near_words.empty();
        const std::size_t lo = tok.index > radius ? tok.index - radius : 0;
        const std::size_t hi = std::min(tok.index + radius, all_tokens.size() - 1);
        for (std::size_t j = lo; j <= hi && !near; ++j) {
            if (j == tok.index) continue;
            const auto other_folded = text::fold_name(all_tokens[j].surface);
            for (const auto& w : bias.near_words)
                if (text::fold_name(w) == other_folded) near = true;
        }
        if (!near) continue;
        auto hit = std::find_if(candidates.begin(), candidates.end(),
                                [&](const Candidate& c) {
                                    return c.entity_id == bias.entity_id;
                                });
        if (hit != candidates.end())
            std::rotate(candidates.begin(), hit, hit + 1);
        return;
    }
}

}  // namespace

ContextWindow build_context(const std::vector<TokenOccurrence>& all_tokens,
                            std::size_t position, const NerConfig& config) {
    ContextWindow ctx;
    ctx.creation_year = config.creation_year;
    const auto& center = all_tokens[position];
    const auto radius = static_cast<std::size_t>(config.window_radius);
    const std::size_t lo = position > radius ? position - radius : 0;
    const std::size_t hi = std::min(position + radius, all_tokens.size() - 1);
    for (std::size_t j = lo; j <= hi; ++j) {
        const auto& tok = all_tokens[j];
        if (j == position) continue;
        const auto pdist = tok.paragraph > center.paragraph
                               ? tok.paragraph - center.paragraph
                               : center.paragraph - tok.paragraph;
        if (pdist > static_cast<std::size_t>(config.paragraph_radius)) continue;
        ctx.folded_words.push_back(text::fold_name(tok.surface));
        if (!tok.pre_identified.empty())
            ctx.nearby_identified.insert(tok.pre_identified);
    }
    return ctx;
}

std::pair<std::vector<FeatureOutcome>, RankKey> evaluate_features(
    const PersonFacts& person, const TokenOccurrence& occurrence,
    const ContextWindow& context, const CacheSet& caches, const NerConfig& config) {
    std::vector<FeatureOutcome> outcomes;
    const auto folded_surface = text::fold_name(occurrence.surface);

    auto add = [&](FeatureId id, int outcome, std::string note) {
        outcomes.push_back({id, outcome, std::move(note)});
    };

    // Syntactic features, cheapest first.
    add(FeatureId::IsCapitalized,
        text::starts_capitalized(occurrence.surface) ? 0 : 1, {});
    add(FeatureId::IsNoStopword, config.stopwords.count(folded_surface) ? 1 : 0, {});
    add(FeatureId::IsNoCommonSubstantive,
        config.common_substantives.count(folded_surface) ? 1 : 0, {});

    // Name exactness against the gazetteer entry.
    {
        const auto preferred = person.preferred_name();
        int outcome = 3;
        std::string note;
        if (facts::last_name_key(preferred) == folded_surface) {
            outcome = 0;
            note = "matches last name of '" + preferred + "'";
        } else {
            const auto pref_tokens = facts::name_tokens(preferred);
            if (std::find(pref_tokens.begin(), pref_tokens.end(), folded_surface) !=
                pref_tokens.end()) {
                outcome = 1;
                note = "matches a token of '" + preferred + "'";
            } else if (const auto* variants = person.get("variantNameForThePerson")) {
                for (const auto& v : *variants) {
                    const auto toks = facts::name_tokens(v.value);
                    if (std::find(toks.begin(), toks.end(), folded_surface) !=
                        toks.end()) {
                        outcome = 2;
                        note = "matches variant name '" + v.value + "'";
                        break;
                    }
                }
            }
        }
        add(FeatureId::NameExactness, outcome, std::move(note));
    }

    add(FeatureId::IsInWikipedia, has_wikipedia_link(person) ? 0 : 1, {});

    // Birth year must not postdate the text.
    {
        int outcome = 1;
        std::string note;
        std::optional<int> birth;
        if (const auto* values = person.get("dateOfBirth");
            values && !values->empty())
            birth = leading_year(values->front().value);
        if (birth && context.creation_year) {
            if (*birth <= *context.creation_year) {
                outcome = 0;
                note = "born " + std::to_string(*birth) + ", text from " +
                       std::to_string(*context.creation_year);
            } else {
                outcome = 2;
                note = "born " + std::to_string(*birth) + " after " +
                       std::to_string(*context.creation_year);
            }
        }
        add(FeatureId::DateOfBirthMatchesContext, outcome, std::move(note));
    }

    {
        int outcome = 1;
        std::string note;
        if (const auto* occupations = person.get("professionOrOccupation")) {
            for (const auto& occ : *occupations) {
                for (const auto& tok : facts::name_tokens(occ.value)) {
                    if (std::find(context.folded_words.begin(),
                                  context.folded_words.end(),
                                  tok) != context.folded_words.end()) {
                        outcome = 0;
                        note = "occupation '" + occ.value + "' mentioned nearby";
                    }
                }
            }
        }
        add(FeatureId::HasOccupationInContext, outcome, std::move(note));
    }

    {
        int outcome = 1;
        std::string note;
        if (!context.nearby_identified.empty()) {
            const auto own = object_values(person);
            for (const auto& other_id : context.nearby_identified) {
                if (other_id == person.subject) continue;
                const auto* other = facts::person_by_id(caches, other_id);
                if (!other) continue;
                for (const auto& [pred, values] : other->by_predicate) {
                    for (const auto& v : values) {
                        if (own.count(v.value)) {
                            outcome = 0;
                            note = "shares '" + v.value + "' with " + other_id;
                        }
                    }
                }
            }
        }
        add(FeatureId::IsLinkedToOthersInContext, outcome, std::move(note));
    }

    RankKey key;
    key.reserve(config.feature_priority.size());
    for (FeatureId id : config.feature_priority) {
        int outcome = 0;
        for (const auto& o : outcomes)
            if (o.id == id) outcome = o.outcome;
        key.push_back(outcome);
    }
    return {std::move(outcomes), std::move(key)};
}

void rank_candidates(std::vector<Candidate>& candidates) {
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                         if (a.rank_key != b.rank_key) return a.rank_key < b.rank_key;
                         return a.entity_id < b.entity_id;
                     });
}

bool passes_acceptance(const RankKey& key, const NerConfig& config) {
    for (std::size_t i = 0; i < config.acceptance_prefix.size() && i < key.size(); ++i)
        if (key[i] > config.acceptance_prefix[i]) return false;
    return true;
}

std::vector<Identification> detect_dates(const std::vector<TokenOccurrence>& toks,
                                         const NerConfig& config) {
    std::vector<Identification> out;
    auto is_year = [](const std::string& s) {
        if (!text::is_all_digits(s) || s.size() != 4) return false;
        const int v = std::stoi(s);
        return v >= 1000 && v < 2000;
    };
    auto is_day = [](const std::string& s) {
        if (!text::is_all_digits(s) || s.size() > 2) return false;
        const int v = std::stoi(s);
        return v >= 1 && v <= 31;
    };
    auto month_of = [](const std::string& s) -> std::optional<int> {
        try {
            const auto d = edition::parse_hist_date(s + " 1000");
            return d.month;
        } catch (const edition::EditionError&) {
            return std::nullopt;
        }
    };
    auto emit = [&](std::size_t at, edition::HistDate date) {
        Identification id;
        id.occurrence = toks[at];
        id.kind = IdentificationKind::Date;
        id.date = date;
        out.push_back(std::move(id));
    };
    std::size_t i = 0;
    while (i < toks.size()) {
        const auto& s = toks[i].surface;
        // D. MonthName YYYY
        if (is_day(s) && i + 1 < toks.size()) {
            const auto month = month_of(toks[i + 1].surface);
            if (month) {
                if (i + 2 < toks.size() && is_year(toks[i + 2].surface)) {
                    try {
                        emit(i, edition::parse_hist_date(s + ". " + toks[i + 1].surface +
                                                         " " + toks[i + 2].surface));
                        i += 3;
                        continue;
                    } catch (const edition::EditionError&) {
                    }
                } else if (config.creation_year) {
                    // Day and month resolved against the creation date.
                    try {
                        emit(i, edition::parse_hist_date(
                                    s + ". " + toks[i + 1].surface + " " +
                                    std::to_string(*config.creation_year)));
                        i += 2;
                        continue;
                    } catch (const edition::EditionError&) {
                    }
                }
            }
        }
        // MonthName YYYY
        if (month_of(s) && i + 1 < toks.size() && is_year(toks[i + 1].surface)) {
            emit(i, edition::parse_hist_date(s + " " + toks[i + 1].surface));
            i += 2;
            continue;
        }
        // Bare YYYY, unless preceded by a cardinal cue or another number.
        if (is_year(s)) {
            bool cued = false;
            if (i > 0) {
                const auto& prev = toks[i - 1].surface;
                if (text::is_all_digits(prev)) cued = true;
                for (const auto& cue : config.cardinal_cues)
                    if (prev == cue) cued = true;
            }
            if (!cued) {
                edition::HistDate d;
                d.year = std::stoi(s);
                d.precision = edition::DatePrecision::Year;
                emit(i, d);
                ++i;
                continue;
            }
        }
        ++i;
    }
    return out;
}

std::vector<Identification> detect_persons(
    const std::vector<TokenOccurrence>& toks, const CacheSet& caches,
    const NerConfig& config, const assist::CompiledAssistance* assistance) {
    std::vector<Identification> out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto& tok = toks[i];
        if (!gates_pass(tok, config, assistance, assist::EntityKind::Person)) continue;
        const auto matches = facts::persons_by_name(caches, tok.surface);
        if (matches.empty()) continue;
        const auto ctx = build_context(toks, i, config);
        std::vector<Candidate> candidates;
        candidates.reserve(matches.size());
        for (const PersonFacts* person : matches) {
            Candidate c;
            c.entity_id = person->subject;
            auto [outcomes, key] = evaluate_features(*person, tok, ctx, caches, config);
            c.explanation = std::move(outcomes);
            c.rank_key = std::move(key);
            candidates.push_back(std::move(c));
        }
        rank_candidates(candidates);
        apply_bias(candidates, tok, toks, config, assistance, /*locations=*/false);
        if (!passes_acceptance(candidates.front().rank_key, config)) continue;
        Identification id;
        id.occurrence = tok;
        id.kind = IdentificationKind::Person;
        id.best = candidates.front();
        id.alternates.assign(candidates.begin() + 1, candidates.end());
        out.push_back(std::move(id));
    }
    return out;
}

std::vector<Identification> detect_persons_by_role(
    const std::vector<TokenOccurrence>& toks, const CacheSet& caches,
    const NerConfig& config, const assist::CompiledAssistance* assistance) {
    std::vector<Identification> out;
    for (std::size_t i = 0; i + 2 < toks.size(); ++i) {
        const auto& role_tok = toks[i];
        if (!role_tok.pre_identified.empty()) continue;
        if (std::find(config.role_words.begin(), config.role_words.end(),
                      role_tok.surface) == config.role_words.end())
            continue;
        if (toks[i + 1].surface != "von") continue;
        const auto& place_tok = toks[i + 2];
        if (!text::starts_capitalized(place_tok.surface)) continue;
        const auto folded_role = text::fold_name(role_tok.surface);
        if (assistance &&
            assistance->excluded(assist::EntityKind::Person, folded_role))
            continue;
        auto hit = caches.role_index.find(
            {folded_role, text::fold_name(place_tok.surface)});
        if (hit == caches.role_index.end() || hit->second.empty()) continue;
        const auto ctx = build_context(toks, i, config);
        std::vector<Candidate> candidates;
        for (std::uint32_t idx : hit->second) {
            const PersonFacts& person = caches.persons[idx];
            Candidate c;
            c.entity_id = person.subject;
            auto [outcomes, key] =
                evaluate_features(person, role_tok, ctx, caches, config);
            c.explanation = std::move(outcomes);
            c.rank_key = std::move(key);
            candidates.push_back(std::move(c));
        }
        rank_candidates(candidates);
        Identification id;
        id.occurrence = role_tok;
        id.kind = IdentificationKind::Person;
        id.best = candidates.front();
        id.alternates.assign(candidates.begin() + 1, candidates.end());
        out.push_back(std::move(id));
        i += 2;
    }
    return out;
}

std::vector<Identification> detect_locations(
    const std::vector<TokenOccurrence>& toks, const CacheSet& caches,
    const NerConfig& config, const assist::CompiledAssistance* assistance) {
    std::vector<Identification> out;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const auto& tok = toks[i];
        if (!gates_pass(tok, config, assistance, assist::EntityKind::Location))
            continue;
        const auto matches = facts::locations_by_name(caches, tok.surface);
        if (matches.empty()) continue;
        const auto ctx = build_context(toks, i, config);
        bool nearby_location = false;
        const auto radius = static_cast<std::size_t>(config.window_radius);
        const std::size_t lo = i > radius ? i - radius : 0;
        const std::size_t hi = std::min(i + radius, toks.size() - 1);
        for (std::size_t j = lo; j <= hi; ++j) {
            if (j != i && !toks[j].pre_identified.empty() &&
                toks[j].pre_identified_location)
                nearby_location = true;
        }
        // Population rank within the candidate set, highest population first.
        std::vector<long long> pops;
        for (const auto* rec : matches) pops.push_back(rec->population.value_or(-1));
        std::sort(pops.begin(), pops.end(), std::greater<>());
        pops.erase(std::unique(pops.begin(), pops.end()), pops.end());

        std::vector<Candidate> candidates;
        for (const auto* rec : matches) {
            Candidate c;
            c.entity_id = rec->geo_id;
            c.is_location = true;
            const int cooccur = nearby_location ? 0 : 1;
            int class_pref = static_cast<int>(config.feature_class_preference.size());
            for (std::size_t k = 0; k < config.feature_class_preference.size(); ++k)
                if (config.feature_class_preference[k] == rec->feature_class)
                    class_pref = static_cast<int>(k);
            const auto pop_rank = static_cast<int>(
                std::find(pops.begin(), pops.end(), rec->population.value_or(-1)) -
                pops.begin());
            c.rank_key = {cooccur, class_pref, pop_rank};
            c.explanation = {
                {FeatureId::IsLinkedToOthersInContext, cooccur,
                 nearby_location ? "another location identified nearby" : ""},
                {FeatureId::NameExactness, class_pref,
                 "feature class '" + rec->feature_class + "'"},
                {FeatureId::HasOccupationInContext, pop_rank,
                 rec->population ? "population " + std::to_string(*rec->population)
                                 : "population unknown"},
            };
            candidates.push_back(std::move(c));
        }
        rank_candidates(candidates);
        apply_bias(candidates, tok, toks, config, assistance, /*locations=*/true);
        if (!passes_acceptance(candidates.front().rank_key, config)) continue;
        Identification id;
        id.occurrence = tok;
        id.kind = IdentificationKind::Location;
        id.best = candidates.front();
        id.alternates.assign(candidates.begin() + 1, candidates.end());
        out.push_back(std::move(id));
    }
    return out;
}

std::string explain_candidate(const Candidate& candidate, const CacheSet& caches) {
    std::string s;
    if (!candidate.is_location) {
        if (const auto* person = facts::person_by_id(caches, candidate.entity_id)) {
            s += person->preferred_name();
            std::string life;
            if (const auto* b = person->get("dateOfBirth"); b && !b->empty())
                life += b->front().value;
            life += "-";
            if (const auto* d = person->get("dateOfDeath"); d && !d->empty())
                life += d->front().value;
            if (life != "-") s += " (" + life + ")";
            s += "\nGND: https://d-nb.info/gnd/" + candidate.entity_id;
            if (const auto* links = person->get("externalLink")) {
                for (const auto& link : *links)
                    if (text::to_lower_ascii(link.value).find("wikipedia") !=
                        std::string::npos)
                        s += "\nWikipedia: " + link.value;
            }
        } else {
            s += candidate.entity_id;
        }
    } else {
        s += candidate.entity_id;
        for (const auto& rec : caches.locations)
            if (rec.geo_id == candidate.entity_id)
                s += " (" + rec.name + ", " + rec.latitude_text + "," +
                     rec.longitude_text + ")";
    }
    bool any = false;
    for (const auto& o : candidate.explanation) {
        if (o.outcome != 0) continue;
        s += "\n  ";
        s += feature_name(o.id);
        if (!o.note.empty()) s += ": " + o.note;
        any = true;
    }
    if (!any) s += "\n  no supporting features";
    return s;
}

std::string rank_key_string(const RankKey& key) {
    std::string s = "(";
    for (std::size_t i = 0; i < key.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(key[i]);
    }
    s += ")";
    return s;
}

std::string identification_record(const Identification& id) {
    std::string s = id.occurrence.doc_id;
    s += '\t';
    s += std::to_string(id.occurrence.span.byte_start);
    s += '\t';
    s += std::to_string(id.occurrence.span.byte_end);
    s += '\t';
    switch (id.kind) {
        case IdentificationKind::Person: s += "person"; break;
        case IdentificationKind::Location: s += "location"; break;
        case IdentificationKind::Date: s += "date"; break;
    }
    s += '\t';
    if (id.kind == IdentificationKind::Date && id.date) {
        s += std::to_string(id.date->year);
        if (id.date->month) s += "-" + std::to_string(*id.date->month);
        if (id.date->day) s += "-" + std::to_string(*id.date->day);
    } else {
        s += id.best.entity_id;
        s += '\t';
        s += rank_key_string(id.best.rank_key);
        s += '\t';
        for (std::size_t i = 0; i < id.alternates.size(); ++i) {
            if (i) s += ",";
            s += id.alternates[i].entity_id;
        }
    }
    return s;
}

}  // namespace letterkit::ner
