#include "letterkit/facts.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <unordered_set>

#include "letterkit/text.hpp"

namespace letterkit::facts {

namespace {

[[noreturn]] void fail(FactsErrorCode code, std::string detail) {
    throw FactsError(code, std::move(detail));
}

std::string unescape_literal(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\' || i + 1 >= s.size()) {
            out.push_back(s[i]);
            continue;
        }
        ++i;
        switch (s[i]) {
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case 'r': out.push_back('\r'); break;
            case '"': out.push_back('"'); break;
            case '\\': out.push_back('\\'); break;
            default:
                out.push_back('\\');
                out.push_back(s[i]);
        }
    }
    return out;
}

std::optional<int> leading_year(std::string_view s) {
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && s[i] == '-') {
        neg = true;
        ++i;
    }
    std::size_t j = i;
    while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i) return std::nullopt;
    int v = 0;
    std::from_chars(s.data() + i, s.data() + j, v);
    return neg ? -v : v;
}

std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const std::string tmp(s);
    const double v = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size()) return std::nullopt;
    return v;
}

void sort_unique(std::vector<std::uint32_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

FactsError::FactsError(FactsErrorCode code, std::string detail)
    : std::runtime_error((code == FactsErrorCode::TooManyMalformedLines
                              ? std::string("TooManyMalformedLines: ")
                              : std::string("MissingColumn: ")) +
                         std::move(detail)),
      code_(code) {}

NamespaceTable default_namespaces() {
    NamespaceTable t;
    t.prefixes = {
        "https://d-nb.info/standards/elementset/gnd#",
        "http://d-nb.info/standards/elementset/gnd#",
        "https://d-nb.info/gnd/",
        "http://d-nb.info/gnd/",
        "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
        "http://sws.geonames.org/",
    };
    return t;
}

std::string shorten_iri(std::string_view iri, const NamespaceTable& table) {
    for (const auto& prefix : table.prefixes)
        if (iri.starts_with(prefix)) return std::string(iri.substr(prefix.size()));
    const auto hash = iri.rfind('#');
    if (hash != std::string_view::npos) return std::string(iri.substr(hash + 1));
    const auto slash = iri.rfind('/');
    if (slash != std::string_view::npos) return std::string(iri.substr(slash + 1));
    return std::string(iri);
}

std::vector<FactTriple> ingest_ntriples(std::istream& in, const NamespaceTable& table,
                                        IngestStats* stats,
                                        std::size_t malformed_threshold) {
    std::vector<FactTriple> out;
    IngestStats local;
    std::string line;
    auto malformed = [&] {
        ++local.malformed;
        if (local.malformed > malformed_threshold)
            fail(FactsErrorCode::TooManyMalformedLines,
                 std::to_string(local.malformed) + " malformed lines");
    };
    while (std::getline(in, line)) {
        std::string_view s = line;
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        if (s.empty() || s.front() == '#') continue;
        // <subject> <predicate> object .
        auto take_term = [&s]() -> std::optional<std::string_view> {
            while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
            if (s.empty()) return std::nullopt;
            if (s.front() == '<') {
                const auto end = s.find('>');
                if (end == std::string_view::npos) return std::nullopt;
                auto term = s.substr(0, end + 1);
                s.remove_prefix(end + 1);
                return term;
            }
            if (s.front() == '_') {
                const auto end = s.find(' ');
                if (end == std::string_view::npos) return std::nullopt;
                auto term = s.substr(0, end);
                s.remove_prefix(end);
                return term;
            }
            return std::nullopt;
        };
        const auto subj = take_term();
        const auto pred = take_term();
        if (!subj || !pred || pred->front() != '<') {
            malformed();
            continue;
        }
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        if (s.empty()) {
            malformed();
            continue;
        }
        FactTriple triple;
        if (s.front() == '"') {
            // Find the closing unescaped quote.
            std::size_t end = std::string_view::npos;
            for (std::size_t i = 1; i < s.size(); ++i) {
                if (s[i] == '\\') {
                    ++i;
                    continue;
                }
                if (s[i] == '"') {
                    end = i;
                    break;
                }
            }
            if (end == std::string_view::npos) {
                malformed();
                continue;
            }
            triple.object.value = unescape_literal(s.substr(1, end - 1));
            s.remove_prefix(end + 1);
            if (s.starts_with("@")) {
                s.remove_prefix(1);
                std::size_t i = 0;
                while (i < s.size() && s[i] != ' ' && s[i] != '.') ++i;
                triple.object.lang = std::string(s.substr(0, i));
                s.remove_prefix(i);
            } else if (s.starts_with("^^")) {
                s.remove_prefix(2);
                if (!s.empty() && s.front() == '<') {
                    const auto close = s.find('>');
                    if (close == std::string_view::npos) {
                        malformed();
                        continue;
                    }
                    s.remove_prefix(close + 1);
                }
            }
        } else if (s.front() == '<' || s.front() == '_') {
            std::string_view rest = s;
            std::string_view term;
            if (s.front() == '<') {
                const auto close = s.find('>');
                if (close == std::string_view::npos) {
                    malformed();
                    continue;
                }
                term = s.substr(1, close - 1);
                rest = s.substr(close + 1);
                // Objects keep their full IRI unless a known prefix applies;
                // an unrecognized link would lose its meaning when truncated.
                triple.object.value = std::string(term);
                for (const auto& prefix : table.prefixes)
                    if (term.starts_with(prefix)) {
                        triple.object.value = std::string(term.substr(prefix.size()));
                        break;
                    }
            } else {
                const auto sp = s.find_first_of(" .");
                term = s.substr(0, sp);
                rest = sp == std::string_view::npos ? std::string_view{} : s.substr(sp);
                triple.object.value = std::string(term);
            }
            triple.object.is_iri = true;
            s = rest;
        } else {
            malformed();
            continue;
        }
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        if (s.empty() || s.front() != '.') {
            malformed();
            continue;
        }
        if (subj->front() == '<')
            triple.subject = shorten_iri(subj->substr(1, subj->size() - 2), table);
        else
            triple.subject = std::string(*subj);
        triple.predicate = shorten_iri(pred->substr(1, pred->size() - 2), table);
        if (triple.subject.empty() || triple.predicate.empty()) {
            malformed();
            continue;
        }
        ++local.accepted;
        out.push_back(std::move(triple));
    }
    if (stats) *stats = local;
    return out;
}

std::vector<LocationRecord> ingest_geonames_csv(std::istream& in,
                                                const GeonamesColumns& columns,
                                                IngestStats* stats) {
    std::vector<LocationRecord> out;
    IngestStats local;
    const int max_col = std::max({columns.id, columns.name, columns.latitude,
                                  columns.longitude, columns.feature_class});
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = text::split(line, '\t');
        if (static_cast<int>(fields.size()) <= max_col)
            fail(FactsErrorCode::MissingColumn,
                 "row has " + std::to_string(fields.size()) + " columns, need " +
                     std::to_string(max_col + 1));
        LocationRecord rec;
        rec.geo_id = fields[static_cast<std::size_t>(columns.id)];
        rec.name = fields[static_cast<std::size_t>(columns.name)];
        if (columns.alternate_names >= 0 &&
            columns.alternate_names < static_cast<int>(fields.size())) {
            for (auto& alt :
                 text::split(fields[static_cast<std::size_t>(columns.alternate_names)], ','))
                if (!alt.empty()) rec.alternate_names.push_back(std::move(alt));
        }
        rec.latitude_text = fields[static_cast<std::size_t>(columns.latitude)];
        rec.longitude_text = fields[static_cast<std::size_t>(columns.longitude)];
        const auto lat = parse_double(rec.latitude_text);
        const auto lon = parse_double(rec.longitude_text);
        if (!lat || !lon || *lat < -90.0 || *lat > 90.0 || *lon < -180.0 ||
            *lon > 180.0) {
            ++local.rejected_rows;
            continue;
        }
        rec.latitude = *lat;
        rec.longitude = *lon;
        rec.feature_class = fields[static_cast<std::size_t>(columns.feature_class)];
        if (columns.population >= 0 &&
            columns.population < static_cast<int>(fields.size())) {
            const auto& p = fields[static_cast<std::size_t>(columns.population)];
            long long v = 0;
            auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
            if (ec == std::errc() && ptr == p.data() + p.size() && v >= 0)
                rec.population = v;
        }
        ++local.accepted;
        out.push_back(std::move(rec));
    }
    if (stats) *stats = local;
    return out;
}

std::vector<FactTriple> restrict_persons_born_before(std::vector<FactTriple> triples,
                                                     int cutoff_year) {
    std::unordered_set<std::string> excluded;
    for (const auto& t : triples) {
        if (t.predicate != "dateOfBirth") continue;
        const auto year = leading_year(t.object.value);
        if (year && *year >= cutoff_year) excluded.insert(t.subject);
    }
    std::erase_if(triples,
                  [&](const FactTriple& t) { return excluded.count(t.subject) > 0; });
    return triples;
}

const std::vector<Literal>* PersonFacts::get(const std::string& predicate) const {
    auto it = by_predicate.find(predicate);
    if (it == by_predicate.end()) return nullptr;
    return &it->second;
}

std::string PersonFacts::preferred_name() const {
    if (const auto* names = get("preferredNameForThePerson"); names && !names->empty())
        return names->front().value;
    return {};
}

std::string last_name_key(std::string_view name) {
    const auto comma = name.find(',');
    const auto head = comma == std::string_view::npos ? name : name.substr(0, comma);
    return text::fold_name(text::trim(head));
}

std::vector<std::string> name_tokens(std::string_view name) {
    std::vector<std::string> out;
    for (const auto& tok : text::split_ws(name)) {
        std::string folded = text::fold_name(tok);
        while (!folded.empty() &&
               !std::isalnum(static_cast<unsigned char>(folded.front())))
            folded.erase(folded.begin());
        while (!folded.empty() &&
               !std::isalnum(static_cast<unsigned char>(folded.back())))
            folded.pop_back();
        if (!folded.empty()) out.push_back(std::move(folded));
    }
    return out;
}

CacheSet build_caches(const std::vector<FactTriple>& triples,
                      const std::vector<LocationRecord>& locations) {
    CacheSet caches;

    std::map<std::string, PersonFacts> grouped;
    for (const auto& t : triples) {
        grouped[t.subject].subject = t.subject;
        grouped[t.subject].by_predicate[t.predicate].push_back(t.object);
    }
    for (auto& [subject, facts] : grouped) {
        for (auto& [pred, values] : facts.by_predicate) {
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
        }
        caches.persons.push_back(std::move(facts));
    }
    for (std::uint32_t i = 0; i < caches.persons.size(); ++i) {
        const PersonFacts& p = caches.persons[i];
        caches.person_index.emplace(p.subject, i);
        if (const auto* names = p.get("preferredNameForThePerson")) {
            for (const auto& name : *names) {
                const auto key = last_name_key(name.value);
                if (!key.empty()) caches.persons_by_last_name[key].push_back(i);
                // Preferred-name tokens also feed the token index so that a
                // bare first name or epithet can still produce the candidate.
                for (const auto& tok : name_tokens(name.value))
                    caches.persons_by_variant_token[tok].push_back(i);
            }
        }
        if (const auto* variants = p.get("variantNameForThePerson")) {
            for (const auto& name : *variants)
                for (const auto& tok : name_tokens(name.value))
                    caches.persons_by_variant_token[tok].push_back(i);
        }
        if (const auto* bios = p.get("biographicalOrHistoricalInformation")) {
            for (const auto& bio : *bios) {
                // "<Role> von <Place> ..." templates.
                const auto toks = text::split_ws(bio.value);
                if (toks.size() >= 3 && toks[1] == "von") {
                    const auto role = text::fold_name(toks[0]);
                    auto place = text::fold_name(toks[2]);
                    while (!place.empty() &&
                           !std::isalnum(static_cast<unsigned char>(place.back())))
                        place.pop_back();
                    if (!role.empty() && !place.empty())
                        caches.role_index[{role, place}].push_back(i);
                }
            }
        }
    }
    for (auto& [key, ids] : caches.persons_by_last_name) sort_unique(ids);
    for (auto& [key, ids] : caches.persons_by_variant_token) sort_unique(ids);
    for (auto& [key, ids] : caches.role_index) sort_unique(ids);

    caches.locations = locations;
    std::sort(caches.locations.begin(), caches.locations.end(),
              [](const LocationRecord& a, const LocationRecord& b) {
                  return a.geo_id < b.geo_id;
              });
    for (std::uint32_t i = 0; i < caches.locations.size(); ++i) {
        const auto& rec = caches.locations[i];
        caches.locations_by_name[text::fold_name(text::trim(rec.name))].push_back(i);
        for (const auto& alt : rec.alternate_names)
            caches.locations_by_name[text::fold_name(text::trim(alt))].push_back(i);
    }
    for (auto& [key, ids] : caches.locations_by_name) sort_unique(ids);
    return caches;
}

std::vector<const PersonFacts*> persons_by_name(
    const CacheSet& caches, std::string_view name,
    const std::vector<AttributeFilter>& filters) {
    const auto key = text::fold_name(text::trim(name));
    std::vector<std::uint32_t> ids;
    if (auto it = caches.persons_by_last_name.find(key);
        it != caches.persons_by_last_name.end())
        ids.insert(ids.end(), it->second.begin(), it->second.end());
    if (auto it = caches.persons_by_variant_token.find(key);
        it != caches.persons_by_variant_token.end())
        ids.insert(ids.end(), it->second.begin(), it->second.end());
    sort_unique(ids);
    std::vector<const PersonFacts*> out;
    for (std::uint32_t id : ids) {
        const PersonFacts& p = caches.persons[id];
        bool ok = true;
        for (const auto& filter : filters) {
            const auto* values = p.get(filter.predicate);
            bool match = false;
            if (values) {
                const auto want = text::fold_name(text::trim(filter.value));
                for (const auto& v : *values)
                    if (text::fold_name(text::trim(v.value)) == want) match = true;
            }
            if (!match) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(&p);
    }
    return out;
}

const PersonFacts* person_by_id(const CacheSet& caches, const std::string& id) {
    auto it = caches.person_index.find(id);
    if (it == caches.person_index.end()) return nullptr;
    return &caches.persons[it->second];
}

std::vector<const LocationRecord*> locations_by_name(const CacheSet& caches,
                                                     std::string_view name) {
    std::vector<const LocationRecord*> out;
    auto it = caches.locations_by_name.find(text::fold_name(text::trim(name)));
    if (it == caches.locations_by_name.end()) return out;
    for (std::uint32_t id : it->second) out.push_back(&caches.locations[id]);
    return out;
}

FactBase make_fact_base(std::vector<FactTriple> triples,
                        std::vector<LocationRecord> locations) {
    FactBase base;
    base.triples = std::move(triples);
    base.locations = std::move(locations);
    base.caches = build_caches(base.triples, base.locations);
    return base;
}

}  // namespace letterkit::facts
