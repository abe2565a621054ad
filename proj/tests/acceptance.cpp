// End-to-end acceptance checks. Each criterion prints one pass/fail line;
// the exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gen.hpp"
#include "letterkit/assist.hpp"
#include "letterkit/combine.hpp"
#include "letterkit/consistency.hpp"
#include "letterkit/project.hpp"
#include "letterkit/publish.hpp"
#include "letterkit/text.hpp"

using namespace letterkit;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixture(const std::string& rel) {
    return std::string(FIXTURE_DIR) + "/" + rel;
}

std::string slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), "cannot read " + path.string());
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
}

facts::FactBase sample_base() {
    std::ifstream nt(fixture("sample/facts.nt"), std::ios::binary);
    auto triples = facts::ingest_ntriples(nt, facts::default_namespaces());
    std::ifstream geo(fixture("sample/geonames.tsv"), std::ios::binary);
    auto locations = facts::ingest_geonames_csv(geo);
    return facts::make_fact_base(std::move(triples), std::move(locations));
}

std::vector<edition::SourceDoc> sample_docs(const char* name) {
    const auto registry = markup::default_dialect();
    return {{name, markup::parse_document(slurp(fixture(std::string("sample/") + name)),
                                          registry, name)}};
}

edition::Corpus sample_corpus() {
    return edition::build_corpus(sample_docs("letters.tex"),
                                 sample_docs("annotations.tex"),
                                 sample_docs("persons.tex"),
                                 std::make_pair(1700, 1800));
}

ner::NerConfig sample_ner_config() {
    ner::NerConfig config;
    config.creation_year = 1745;
    for (const auto& w : text::split_ws(slurp(fixture("sample/stopwords.txt"))))
        config.stopwords.insert(text::fold_name(w));
    for (const auto& w : text::split_ws(slurp(fixture("sample/substantives.txt"))))
        config.common_substantives.insert(text::fold_name(w));
    return config;
}

// ---- criteria ----

// Parsing is lossless: serialize(parse(d)) == d for every fixture document
// and for 10000 generated documents, within 30 seconds.
void criterion_roundtrip() {
    const auto start = Clock::now();
    const auto registry = markup::default_dialect();
    for (const char* rel : {"sample/letters.tex", "sample/annotations.tex",
                            "sample/persons.tex", "defect/letters.tex",
                            "defect/annotations.tex", "defect/persons.tex"}) {
        const auto source = slurp(fixture(rel));
        require(markup::serialize_markup(markup::parse_document(source, registry)) ==
                    source,
                std::string("fixture round-trip broke: ") + rel);
    }
    std::mt19937 rng(20260823);
    for (int i = 0; i < 10000; ++i) {
        const auto doc = testsupport::random_document(rng);
        require(markup::serialize_markup(markup::parse_document(doc, registry)) == doc,
                "random doc " + std::to_string(i) + " did not round-trip");
    }
    require(seconds_since(start) < 30.0, "round-trip exceeded 30s budget");
}

// The sample corpus parses into faithful typed records.
void criterion_edition() {
    const auto corpus = sample_corpus();
    require(corpus.letters.size() == 4, "expected 4 letters");
    const auto& first = corpus.letters[0];
    require(first.id == "bs:1745-02-14", "wrong first letter id");
    require(first.writer == "bodmer" && first.addressee == "sulzer" &&
                first.place == "zuerich",
            "wrong first letter header");
    require(first.date_text == "14. Februar 1745", "wrong date text");
    require(first.date ==
                edition::HistDate{1745, 2, 14, edition::DatePrecision::Day},
            "wrong parsed date");
    require(first.local_decls.count("brief:lange") == 1, "missing \\xl declaration");
    require(corpus.annotations.size() == 1 &&
                corpus.annotations[0].target == "bs:1745-02-14",
            "wrong annotation target");
    const auto item = corpus.annotations[0].items.find("brief:lange");
    require(item != corpus.annotations[0].items.end() &&
                markup::to_plain_text(item->second).find("nicht überliefert") !=
                    std::string::npos,
            "annotation item text lost");
    const auto lange = corpus.persons.find("lange");
    require(lange != corpus.persons.end() &&
                lange->second.display_name == "Lange, Samuel Gotthold" &&
                lange->second.birth_year == 1711 && lange->second.death_year == 1781,
            "person declaration mangled");
    require(corpus.locations.count("zuerich") == 1 &&
                corpus.locations.at("zuerich").display_name == "Zürich",
            "location declaration mangled");
}

// The person name index answers 1000 queries over 10000 persons exactly like
// an index-free scan, in under 2 seconds of query time.
void criterion_name_index() {
    std::mt19937 rng(11);
    const auto base = testsupport::synthetic_persons(rng, 10000);
    const auto caches = facts::build_caches(base.triples, {});
    std::vector<std::string> queries;
    for (int i = 0; i < 1000; ++i) {
        if (i % 5 == 4)
            queries.push_back("Nirgendwo" + std::to_string(i));
        else
            queries.push_back(base.last_names[rng() % base.last_names.size()]);
    }
    std::vector<std::vector<std::string>> got(queries.size());
    const auto start = Clock::now();
    for (std::size_t i = 0; i < queries.size(); ++i)
        for (const auto* p : facts::persons_by_name(caches, queries[i]))
            got[i].push_back(p->subject);
    require(seconds_since(start) < 2.0, "1000 queries exceeded 2s budget");
    for (std::size_t i = 0; i < queries.size(); ++i)
        require(got[i] == testsupport::scan_persons_by_name(base.triples, queries[i]),
                "query '" + queries[i] + "' diverged from the exhaustive scan");
}

// A snapshot of a million-triple base reloads identically in under 10 seconds.
void criterion_snapshot_scale() {
    std::mt19937 rng(5);
    auto synth = testsupport::synthetic_persons(rng, 290000);
    while (synth.triples.size() < 1000000) {
        facts::FactTriple t;
        t.subject = "p100000";
        t.predicate = "variantNameForThePerson";
        t.object.value = "Pad, Nr" + std::to_string(synth.triples.size());
        synth.triples.push_back(std::move(t));
    }
    std::vector<facts::LocationRecord> locations;
    for (int i = 0; i < 20000; ++i) {
        facts::LocationRecord loc;
        loc.geo_id = std::to_string(1000000 + i);
        loc.name = "Ort" + std::to_string(i);
        loc.latitude_text = "47.0";
        loc.longitude_text = "8.0";
        loc.latitude = 47.0;
        loc.longitude = 8.0;
        loc.feature_class = "P";
        locations.push_back(std::move(loc));
    }
    const auto base = facts::make_fact_base(std::move(synth.triples),
                                            std::move(locations));
    const auto path = fs::temp_directory_path() / "lk-acceptance-snapshot";
    facts::SnapshotMeta meta;
    meta.restriction = "none";
    facts::save_snapshot(base, meta, path.string());

    const auto start = Clock::now();
    facts::SnapshotMeta loaded_meta;
    const auto loaded = facts::load_snapshot(path.string(), &loaded_meta);
    require(seconds_since(start) < 10.0, "snapshot load exceeded 10s budget");
    fs::remove(path);
    require(loaded_meta == meta, "metadata changed");
    require(loaded.triples == base.triples, "triples changed");
    require(loaded.locations == base.locations, "locations changed");
    for (const char* name : {"Bergmann", "Steinhofer", "Waldbach", "Nirgendwo"}) {
        const auto a = facts::persons_by_name(base.caches, name);
        const auto b = facts::persons_by_name(loaded.caches, name);
        require(a.size() == b.size(), "query sizes diverge after reload");
        for (std::size_t i = 0; i < a.size(); ++i)
            require(a[i]->subject == b[i]->subject, "query results diverge");
    }
}

// Person recognition agrees with an exhaustive no-cache oracle on 100 random
// corpora of 1000 tokens each.
void criterion_ner_oracle() {
    for (unsigned seed = 1; seed <= 100; ++seed) {
        std::mt19937 rng(seed);
        const auto base = testsupport::synthetic_persons(rng, 60);
        const auto caches = facts::build_caches(base.triples, {});
        const auto toks = testsupport::planted_corpus(rng, base, 1000, "d");
        ner::NerConfig config;
        config.window_radius = 10;
        config.creation_year = 1800;
        const auto expected = testsupport::ner_oracle(base.triples, toks, config);
        const auto got = ner::detect_persons(toks, caches, config, nullptr);
        require(got.size() == expected.size(),
                "seed " + std::to_string(seed) + ": identification count diverged");
        for (std::size_t i = 0; i < got.size(); ++i) {
            require(got[i].occurrence.index == expected[i].token_index &&
                        got[i].best.entity_id == expected[i].best &&
                        got[i].best.rank_key == expected[i].best_key,
                    "seed " + std::to_string(seed) + ": best candidate diverged");
            require(got[i].alternates.size() == expected[i].alternates.size(),
                    "seed " + std::to_string(seed) + ": alternates diverged");
            for (std::size_t k = 0; k < got[i].alternates.size(); ++k)
                require(got[i].alternates[k].entity_id == expected[i].alternates[k],
                        "seed " + std::to_string(seed) + ": alternates diverged");
        }
    }
}

// Person recognition over 100000 tokens against 10000 persons finishes in
// under 60 seconds and finds planted mentions.
void criterion_ner_throughput() {
    std::mt19937 rng(21);
    const auto base = testsupport::synthetic_persons(rng, 10000);
    const auto caches = facts::build_caches(base.triples, {});
    const auto toks = testsupport::planted_corpus(rng, base, 100000, "big");
    ner::NerConfig config;
    config.window_radius = 10;
    config.creation_year = 1800;
    const auto start = Clock::now();
    const auto ids = ner::detect_persons(toks, caches, config, nullptr);
    require(seconds_since(start) < 60.0, "detection exceeded 60s budget");
    require(ids.size() > 1000, "implausibly few identifications");
}

// Assistance documents steer identification: biases split the two Tacitus
// mentions, a supplement makes a role phrase resolvable, and an underspecified
// entity reference is rejected as ambiguous.
void criterion_assistance() {
    const auto base = sample_base();
    const auto registry = markup::default_dialect();
    const auto stream = markup::parse_document(slurp(fixture("sample/letters.tex")),
                                               registry, "letters.tex");
    const auto toks = tokens::tokenize_items(stream.items, "letters.tex");
    const auto config = sample_ner_config();
    const auto compiled = assist::apply_assistance(
        assist::parse_assistance_doc(slurp(fixture("sample/assist.pl"))), base);

    const auto ids = ner::detect_persons(toks, compiled.base.caches, config, &compiled);
    require(ids.size() == 2, "expected two person identifications");
    require(ids[0].best.entity_id == "118620452",
            "Tacitus near 'Römern' should be the historian");
    require(ids[1].best.entity_id == "1027579388",
            "Tacitus near 'Adel' should be the emperor");

    require(ner::detect_persons_by_role(toks, base.caches, config, nullptr).empty(),
            "role phrase resolved without the supplement");
    const auto roles =
        ner::detect_persons_by_role(toks, compiled.base.caches, config, &compiled);
    require(roles.size() == 1 && roles[0].occurrence.surface == "Herzog" &&
                roles[0].best.entity_id == "118558404",
            "'Herzog von Luxemburg' did not resolve through the supplement");

    assist::EntitySpecifier spec;
    spec.kind = assist::EntityKind::Person;
    spec.constraints = {{"name", {"Tacitus", ""}}};
    try {
        assist::resolve_entity_specifier(spec, base.caches);
        require(false, "bare 'Tacitus' specifier should be ambiguous");
    } catch (const assist::AssistError& e) {
        require(e.code() == assist::AssistErrorCode::Ambiguous,
                "bare 'Tacitus' specifier should be ambiguous");
    }
}

// The published site has no broken links, its next-by-writer navigation walks
// letters chronologically, and regeneration is byte-identical.
void criterion_site() {
    const auto corpus = sample_corpus();
    const auto chains = publish::compute_chains(corpus);
    const auto dir_a = fs::temp_directory_path() / "lk-acceptance-site-a";
    const auto dir_b = fs::temp_directory_path() / "lk-acceptance-site-b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    publish::generate_site(corpus, chains, dir_a);
    publish::generate_site(corpus, chains, dir_b);
    require(publish::check_links(dir_a).empty(), "site has broken links");
    require(testsupport::tree_digest(dir_a.string()) ==
                testsupport::tree_digest(dir_b.string()),
            "regenerated site differs");

    const auto ordered = combine::order_letters(corpus);
    std::map<std::string, std::vector<const edition::LetterRecord*>> by_writer;
    for (const auto* letter : ordered) by_writer[letter->writer].push_back(letter);
    std::size_t pairs = 0;
    for (const auto& [writer, letters] : by_writer) {
        for (std::size_t i = 0; i + 1 < letters.size(); ++i) {
            const auto page = slurp(dir_a / publish::letter_page_name(letters[i]->id));
            const auto want = "href=\"" + publish::letter_page_name(letters[i + 1]->id) +
                              "\">next by writer";
            require(page.find(want) != std::string::npos,
                    "writer navigation out of order at " + letters[i]->id);
            ++pairs;
        }
    }
    require(pairs == 2, "expected two consecutive writer pairs in the sample");
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

// Restricting by year of birth matches a brute-force subject filter.
void criterion_restriction() {
    std::mt19937 rng(31);
    const auto base = testsupport::synthetic_persons(rng, 10000);
    const int cutoff = 1800;

    std::set<std::string> dropped;
    for (const auto& t : base.triples) {
        if (t.predicate != "dateOfBirth") continue;
        std::size_t j = 0;
        while (j < t.object.value.size() &&
               std::isdigit(static_cast<unsigned char>(t.object.value[j])))
            ++j;
        if (j > 0 && std::stoi(t.object.value.substr(0, j)) >= cutoff)
            dropped.insert(t.subject);
    }
    std::vector<facts::FactTriple> expected;
    for (const auto& t : base.triples)
        if (!dropped.count(t.subject)) expected.push_back(t);

    const auto got = facts::restrict_persons_born_before(base.triples, cutoff);
    require(got == expected, "restriction diverged from the brute-force filter");
    require(expected.size() < base.triples.size(), "restriction dropped nothing");
}

// Running the whole pipeline twice on identical inputs yields byte-identical
// artifact trees, including the snapshot.
void criterion_determinism() {
    auto run_all = [&](const char* name) {
        const auto dir = fs::temp_directory_path() / name;
        fs::remove_all(dir);
        fs::copy(fixture("sample"), dir, fs::copy_options::recursive);
        ::setenv("LETTERKIT_OUT", (dir / "out").c_str(), 1);
        const auto manifest = project::load_manifest(dir / "letterkit.json");
        std::ostringstream diag;
        const int status = project::run_pipeline(manifest, "all", diag);
        ::unsetenv("LETTERKIT_OUT");
        require(status == 0, std::string("pipeline failed: ") + diag.str());
        return dir;
    };
    const auto dir_a = run_all("lk-acceptance-all-a");
    const auto dir_b = run_all("lk-acceptance-all-b");
    require(testsupport::tree_digest((dir_a / "out").string()) ==
                testsupport::tree_digest((dir_b / "out").string()),
            "output trees differ between runs");
    require(facts::digest_bytes(slurp(dir_a / "facts.snapshot")) ==
                facts::digest_bytes(slurp(dir_b / "facts.snapshot")),
            "snapshots differ between runs");
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<void()>> criteria[] = {
        {"markup round-trip is byte-exact (fixtures + 10000 random docs, <30s)",
         criterion_roundtrip},
        {"edition records preserve the sample corpus faithfully", criterion_edition},
        {"name index equals exhaustive scan (10000 persons, 1000 queries, <2s)",
         criterion_name_index},
        {"snapshot of 1000000 triples reloads identically (<10s)",
         criterion_snapshot_scale},
        {"person recognition matches the oracle (100 seeds x 1000 tokens)",
         criterion_ner_oracle},
        {"person recognition scales (100000 tokens vs 10000 persons, <60s)",
         criterion_ner_throughput},
        {"assistance rules steer identification as declared", criterion_assistance},
        {"published site links, ordering and regeneration hold", criterion_site},
        {"birth-year restriction equals brute force", criterion_restriction},
        {"full pipeline is deterministic across runs", criterion_determinism},
    };
    int failed = 0;
    int number = 0;
    for (const auto& [name, fn] : criteria) {
        ++number;
        try {
            fn();
            std::cout << "PASS criterion " << number << ": " << name << "\n";
        } catch (const std::exception& e) {
            ++failed;
            std::cout << "FAIL criterion " << number << ": " << name << " -- "
                      << e.what() << "\n";
        }
    }
    return failed;
}
