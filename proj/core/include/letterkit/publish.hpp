#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "letterkit/consistency.hpp"
#include "letterkit/edition.hpp"
#include "letterkit/ner.hpp"

namespace letterkit::publish {

enum class PublishErrorCode { IdentifierContainsUnderscore, Io };

class PublishError : public std::runtime_error {
public:
    PublishError(PublishErrorCode code, std::string detail);
    PublishErrorCode code() const { return code_; }

private:
    PublishErrorCode code_;
};

// ':' -> '_'; '_' is banned in source identifiers, so the mapping is injective.
std::string make_uri(const std::string& id);

struct ChainMember {
    std::string href;   // page name, optionally with fragment
    std::string label;
};

struct Chain {
    std::string id;     // page-name-safe
    std::string title;
    std::vector<ChainMember> members;
};

// One chain per person/location referenced from letter bodies (chronological)
// plus one chain per writer. Membership follows \xperson / \xlocation
// occurrences.
std::vector<Chain> compute_chains(const edition::Corpus& corpus);

struct SitePlan {
    std::vector<std::string> letter_pages;
    std::vector<std::string> entity_pages;
    std::vector<std::string> chain_pages;
    std::vector<std::string> assets;  // index, stylesheet, script
};

std::string letter_page_name(const std::string& letter_id);
std::string person_page_name(const std::string& person_id);
std::string location_page_name(const std::string& location_id);

SitePlan generate_site(const edition::Corpus& corpus,
                       const std::vector<Chain>& chains,
                       const std::filesystem::path& out_dir,
                       const std::filesystem::path& template_override_dir = {});

// Single static page: the object text with highlighted identified spans and
// per-span detail blocks (best candidate, explanation, ranked alternates).
void generate_review_report(const std::string& doc_id,
                            const std::string& plain_text,
                            const std::vector<ner::Identification>& identifications,
                            const facts::CacheSet& caches,
                            const std::filesystem::path& out_file);

// Tab-separated subject/predicate/object, one triple per line, sorted.
void export_triples(const edition::Corpus& corpus,
                    const std::vector<ner::Identification>& identifications,
                    const std::filesystem::path& out_file);
std::string render_triples(const edition::Corpus& corpus,
                           const std::vector<ner::Identification>& identifications);

// Header "id,name,latitude,longitude,count"; one row per distinct identified
// location; coordinates verbatim from ingestion; RFC-4180 quoting.
void export_geo_csv(const std::vector<ner::Identification>& identifications,
                    const std::vector<facts::LocationRecord>& locations,
                    const std::filesystem::path& out_file);
std::string render_geo_csv(const std::vector<ner::Identification>& identifications,
                           const std::vector<facts::LocationRecord>& locations);

// Scans generated HTML for internal hrefs and fragments that do not resolve.
std::vector<consistency::Finding> check_links(const std::filesystem::path& site_dir);

}  // namespace letterkit::publish
