#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace letterkit::facts {

struct Literal {
    std::string value;
    std::string lang;     // language tag, empty when none
    bool is_iri = false;  // object was an IRI / blank node reference

    bool operator==(const Literal&) const = default;
    auto operator<=>(const Literal&) const = default;
};

struct FactTriple {
    std::string subject;
    std::string predicate;  // short symbol, e.g. preferredNameForThePerson
    Literal object;

    bool operator==(const FactTriple&) const = default;
    auto operator<=>(const FactTriple&) const = default;
};

struct LocationRecord {
    std::string geo_id;
    std::string name;
    std::vector<std::string> alternate_names;
    std::string latitude_text;  // preserved verbatim for exact export
    std::string longitude_text;
    double latitude = 0.0;
    double longitude = 0.0;
    std::string feature_class;
    std::optional<long long> population;

    bool operator==(const LocationRecord&) const = default;
};

enum class FactsErrorCode { TooManyMalformedLines, MissingColumn };

class FactsError : public std::runtime_error {
public:
    FactsError(FactsErrorCode code, std::string detail);
    FactsErrorCode code() const { return code_; }

private:
    FactsErrorCode code_;
};

struct IngestStats {
    std::size_t accepted = 0;
    std::size_t malformed = 0;
    std::size_t rejected_rows = 0;  // CSV rows with out-of-range coordinates
};

struct NamespaceTable {
    // IRI prefixes stripped to produce short predicate/subject symbols.
    // Unrecognized IRIs fall back to their last path/fragment segment.
    std::vector<std::string> prefixes;
};

NamespaceTable default_namespaces();
std::string shorten_iri(std::string_view iri, const NamespaceTable& table);

// Streaming line-delimited triple ingestion. Malformed lines are counted;
// the error fires only when the count exceeds the threshold.
std::vector<FactTriple> ingest_ntriples(std::istream& in,
                                        const NamespaceTable& table,
                                        IngestStats* stats = nullptr,
                                        std::size_t malformed_threshold = 1000);

struct GeonamesColumns {
    // Standard geonames dump layout.
    int id = 0;
    int name = 1;
    int alternate_names = 3;
    int latitude = 4;
    int longitude = 5;
    int feature_class = 6;
    int population = 14;
};

std::vector<LocationRecord> ingest_geonames_csv(std::istream& in,
                                                const GeonamesColumns& columns = {},
                                                IngestStats* stats = nullptr);

// Drops every fact of subjects whose dateOfBirth year is >= cutoff.
// Subjects without a dateOfBirth are kept.
std::vector<FactTriple> restrict_persons_born_before(std::vector<FactTriple> triples,
                                                     int cutoff_year);

struct PersonFacts {
    std::string subject;
    std::map<std::string, std::vector<Literal>> by_predicate;

    const std::vector<Literal>* get(const std::string& predicate) const;
    std::string preferred_name() const;

    bool operator==(const PersonFacts&) const = default;
};

struct CacheSet {
    std::vector<PersonFacts> persons;  // sorted by subject id
    std::unordered_map<std::string, std::uint32_t> person_index;
    std::unordered_map<std::string, std::vector<std::uint32_t>> persons_by_last_name;
    std::unordered_map<std::string, std::vector<std::uint32_t>> persons_by_variant_token;
    std::vector<LocationRecord> locations;  // sorted by geo_id
    std::unordered_map<std::string, std::vector<std::uint32_t>> locations_by_name;
    std::map<std::pair<std::string, std::string>, std::vector<std::uint32_t>> role_index;
};

// Deterministic: permuting the input triples yields an identical CacheSet.
CacheSet build_caches(const std::vector<FactTriple>& triples,
                      const std::vector<LocationRecord>& locations);

// Last-name key: segment before the first ',' of a preferred name,
// normalized; mononyms key on the whole name.
std::string last_name_key(std::string_view name);
// Normalized whitespace tokens of a (variant) name, punctuation stripped.
std::vector<std::string> name_tokens(std::string_view name);

struct AttributeFilter {
    std::string predicate;
    std::string value;  // matched after name normalization
};

std::vector<const PersonFacts*> persons_by_name(
    const CacheSet& caches, std::string_view name,
    const std::vector<AttributeFilter>& filters = {});

// nullptr = not found (distinguishable from present-but-sparse).
const PersonFacts* person_by_id(const CacheSet& caches, const std::string& id);

std::vector<const LocationRecord*> locations_by_name(const CacheSet& caches,
                                                     std::string_view name);

struct FactBase {
    std::vector<FactTriple> triples;
    std::vector<LocationRecord> locations;
    CacheSet caches;
};

FactBase make_fact_base(std::vector<FactTriple> triples,
                        std::vector<LocationRecord> locations);

// --- snapshot (binary, versioned, checksummed) ---

enum class SnapshotErrorCode { VersionMismatch, CorruptSnapshot, Io };

class SnapshotError : public std::runtime_error {
public:
    SnapshotError(SnapshotErrorCode code, std::string detail);
    SnapshotErrorCode code() const { return code_; }

private:
    SnapshotErrorCode code_;
};

struct SnapshotMeta {
    std::string restriction;  // human-readable restriction predicate
    std::vector<std::pair<std::string, std::uint64_t>> source_digests;

    bool operator==(const SnapshotMeta&) const = default;
};

std::uint64_t digest_bytes(std::string_view bytes);

void save_snapshot(const FactBase& base, const SnapshotMeta& meta,
                   const std::string& path);
FactBase load_snapshot(const std::string& path, SnapshotMeta* meta = nullptr);

}  // namespace letterkit::facts
