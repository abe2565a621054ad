#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "gen.hpp"
#include "letterkit/assist.hpp"
#include "letterkit/ner.hpp"
#include "letterkit/text.hpp"

using namespace letterkit;
using edition::DatePrecision;
using ner::FeatureId;
using ner::IdentificationKind;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
}

markup::ItemStream sample_letters_stream() {
    const auto reg = markup::default_dialect();
    const auto path = std::string(FIXTURE_DIR) + "/sample/letters.tex";
    return markup::parse_document(slurp(path), reg, "letters.tex");
}

facts::FactBase sample_base() {
    std::ifstream nt(std::string(FIXTURE_DIR) + "/sample/facts.nt", std::ios::binary);
    REQUIRE(nt.good());
    auto triples = facts::ingest_ntriples(nt, facts::default_namespaces());
    std::ifstream geo(std::string(FIXTURE_DIR) + "/sample/geonames.tsv",
                      std::ios::binary);
    REQUIRE(geo.good());
    auto locations = facts::ingest_geonames_csv(geo);
    return facts::make_fact_base(std::move(triples), std::move(locations));
}

ner::NerConfig sample_config() {
    ner::NerConfig config;
    config.creation_year = 1745;
    for (const auto& w : text::split_ws(slurp(std::string(FIXTURE_DIR) +
                                              "/sample/stopwords.txt")))
        config.stopwords.insert(text::fold_name(w));
    for (const auto& w : text::split_ws(slurp(std::string(FIXTURE_DIR) +
                                              "/sample/substantives.txt")))
        config.common_substantives.insert(text::fold_name(w));
    return config;
}

assist::CompiledAssistance sample_assistance(const facts::FactBase& base) {
    const auto rules = assist::parse_assistance_doc(
        slurp(std::string(FIXTURE_DIR) + "/sample/assist.pl"));
    return assist::apply_assistance(rules, base);
}

}  // namespace

TEST_CASE("markup tokenization assigns indices, paragraphs and paths") {
    const auto stream = sample_letters_stream();
    auto items = stream.items;
    const auto toks = tokens::tokenize_items(items, "letters.tex");
    REQUIRE(toks.size() == 49);
    for (std::size_t i = 0; i < toks.size(); ++i) CHECK(toks[i].index == i);

    CHECK(toks[0].surface == "Pastor");
    CHECK(toks[0].paragraph == 0);
    CHECK(toks[15].surface == "Tacitus");
    CHECK(toks[24].surface == "Tacitus");
    CHECK(toks[24].paragraph == 1);
    CHECK(toks[39].surface == "Frankfurt");
    CHECK(toks[39].paragraph == 2);
    CHECK(toks[48].paragraph == 3);

    // Words inside entity markup carry the marked identifier.
    CHECK(toks[1].surface == "Lange");
    CHECK(toks[1].pre_identified == "lange");
    CHECK(!toks[1].pre_identified_location);
    CHECK(toks[27].surface == "Z\xc3\xbcrich");
    CHECK(toks[27].pre_identified == "zuerich");
    CHECK(toks[27].pre_identified_location);
    // Words inside \xl passages are not pre-identified.
    CHECK(toks[7].surface == "Brief");
    CHECK(toks[7].pre_identified.empty());

    // Every token path addresses its word in the item tree.
    for (const auto& tok : toks) {
        markup::Item* it = tokens::item_at(items, tok.path);
        REQUIRE(it != nullptr);
        CHECK(it->kind == markup::ItemKind::Word);
        CHECK(it->text == tok.surface);
    }
    CHECK(tokens::item_at(items, {999}) == nullptr);
    CHECK(tokens::item_at(items, {}) == nullptr);
}

TEST_CASE("plain tokenization tracks lines, columns and paragraphs") {
    const auto toks = tokens::tokenize_plain("ab cd,\n\n ef-gh\n\xc3\xa4", "d");
    REQUIRE(toks.size() == 4);
    CHECK(toks[0].surface == "ab");
    CHECK(toks[0].span.line == 1);
    CHECK(toks[0].span.column == 1);
    CHECK(toks[1].surface == "cd");
    CHECK(toks[1].span.column == 4);
    CHECK(toks[1].paragraph == 0);
    CHECK(toks[2].surface == "ef-gh");
    CHECK(toks[2].span.line == 3);
    CHECK(toks[2].span.column == 2);
    CHECK(toks[2].paragraph == 1);
    CHECK(toks[3].surface == "\xc3\xa4");
    CHECK(toks[3].span.line == 4);
    CHECK(toks[3].paragraph == 1);
    CHECK(toks[3].span.byte_end - toks[3].span.byte_start == 2);
}

TEST_CASE("feature metadata is consistent") {
    CHECK(ner::is_syntactic(FeatureId::IsCapitalized));
    CHECK(ner::is_syntactic(FeatureId::IsNoStopword));
    CHECK(!ner::is_syntactic(FeatureId::NameExactness));
    CHECK(ner::cost_class(FeatureId::IsCapitalized) <
          ner::cost_class(FeatureId::NameExactness));
    CHECK(ner::cost_class(FeatureId::NameExactness) <
          ner::cost_class(FeatureId::IsLinkedToOthersInContext));
    CHECK(std::string(ner::feature_name(FeatureId::NameExactness)) ==
          "name-exactness");
}

TEST_CASE("context windows respect the positional and paragraph radii") {
    const auto toks = tokens::tokenize_plain(
        "eins zwei drei\n\nvier fünf\n\nsechs\n\nsieben acht", "d");
    REQUIRE(toks.size() == 8);
    ner::NerConfig config;
    config.window_radius = 3;
    config.paragraph_radius = 1;
    const auto ctx = ner::build_context(toks, 3, config);  // "vier"
    // The window covers eins..sieben positionally; sieben is two paragraphs
    // away and acht is out of positional range.
    const std::vector<std::string> expected = {"eins", "zwei", "drei", "fuenf",
                                               "sechs"};
    CHECK(ctx.folded_words == expected);
}

TEST_CASE("rank keys follow the configured feature priority") {
    const auto base = sample_base();
    const auto toks = tokens::tokenize_plain(
        "Der Historiker Tacitus schrieb viel", "d");
    ner::NerConfig config;
    config.creation_year = 1745;
    const auto ctx = ner::build_context(toks, 2, config);
    const auto* historian = facts::person_by_id(base.caches, "118620452");
    REQUIRE(historian != nullptr);
    auto [outcomes, key] =
        ner::evaluate_features(*historian, toks[2], ctx, base.caches, config);
    // Priority: exactness, birth, occupation, linked, wikipedia.
    const ner::RankKey expected = {0, 0, 0, 1, 0};
    CHECK(key == expected);
    for (const auto& o : outcomes) {
        if (o.id == FeatureId::HasOccupationInContext) {
            CHECK(o.outcome == 0);
            CHECK(o.note.find("Historiker") != std::string::npos);
        }
        if (o.id == FeatureId::DateOfBirthMatchesContext)
            CHECK(o.note.find("55") != std::string::npos);
    }

    const auto* emperor = facts::person_by_id(base.caches, "1027579388");
    REQUIRE(emperor != nullptr);
    auto [outcomes2, key2] =
        ner::evaluate_features(*emperor, toks[2], ctx, base.caches, config);
    const ner::RankKey expected2 = {0, 0, 1, 1, 1};
    CHECK(key2 == expected2);
    CHECK(key < key2);

    config.feature_priority = {FeatureId::IsInWikipedia, FeatureId::NameExactness};
    auto [o3, key3] =
        ner::evaluate_features(*emperor, toks[2], ctx, base.caches, config);
    const ner::RankKey expected3 = {1, 0};
    CHECK(key3 == expected3);
}

TEST_CASE("acceptance compares the key prefix only") {
    ner::NerConfig config;
    config.acceptance_prefix = {1, 0};
    CHECK(ner::passes_acceptance({0, 0, 9, 9}, config));
    CHECK(ner::passes_acceptance({1, 0}, config));
    CHECK(!ner::passes_acceptance({2, 0}, config));
    CHECK(!ner::passes_acceptance({0, 1}, config));
    CHECK(ner::passes_acceptance({}, config));
}

TEST_CASE("date detection covers day, month and year forms") {
    ner::NerConfig config;
    config.creation_year = 1745;
    auto detect = [&](const char* s) {
        return ner::detect_dates(tokens::tokenize_plain(s, "d"), config);
    };

    auto ids = detect("Am 14. Februar 1745 schrieb er");
    REQUIRE(ids.size() == 1);
    CHECK(ids[0].kind == IdentificationKind::Date);
    CHECK(ids[0].occurrence.surface == "14");
    CHECK(*ids[0].date == edition::HistDate{1745, 2, 14, DatePrecision::Day});

    // Day and month only: the creation year fills in.
    ids = detect("am 5. M\xc3\xa4rz traf der Bote ein");
    REQUIRE(ids.size() == 1);
    CHECK(*ids[0].date == edition::HistDate{1745, 3, 5, DatePrecision::Day});

    // An invalid day falls through to the month-year reading.
    ids = detect("am 31. Februar 1745 angeblich");
    REQUIRE(ids.size() == 1);
    CHECK(ids[0].occurrence.surface == "Februar");
    CHECK(*ids[0].date ==
          edition::HistDate{1745, 2, std::nullopt, DatePrecision::Month});

    ids = detect("im Februar 1745 dann");
    REQUIRE(ids.size() == 1);
    CHECK(*ids[0].date ==
          edition::HistDate{1745, 2, std::nullopt, DatePrecision::Month});

    ids = detect("im Jahr 1745 geschah es");
    REQUIRE(ids.size() == 1);
    CHECK(*ids[0].date ==
          edition::HistDate{1745, std::nullopt, std::nullopt, DatePrecision::Year});

    // Cardinal cues and preceding numbers suppress the year reading.
    CHECK(detect("auf Seite 1745 steht es").empty());
    ids = detect("1745 1746 als Zahlenpaar");
    REQUIRE(ids.size() == 1);
    CHECK(ids[0].occurrence.surface == "1745");

    CHECK(detect("anno 999 und 2000 und 20000").empty());
}

TEST_CASE("person detection on the sample corpus distinguishes the Tacitus mentions") {
    const auto base = sample_base();
    const auto stream = sample_letters_stream();
    const auto toks = tokens::tokenize_items(stream.items, "letters.tex");
    auto config = sample_config();
    const auto compiled = sample_assistance(base);

    const auto ids =
        ner::detect_persons(toks, compiled.base.caches, config, &compiled);
    REQUIRE(ids.size() == 2);

    // "Tacitus ... Römern": the biased historian also wins on features.
    CHECK(ids[0].occurrence.index == 15);
    CHECK(ids[0].best.entity_id == "118620452");
    REQUIRE(ids[0].alternates.size() == 1);
    CHECK(ids[0].alternates[0].entity_id == "1027579388");

    // "Adel um Kaiser Tacitus": the bias promotes the emperor over the
    // feature-preferred historian.
    CHECK(ids[1].occurrence.index == 24);
    CHECK(ids[1].best.entity_id == "1027579388");
    REQUIRE(ids[1].alternates.size() == 1);
    CHECK(ids[1].alternates[0].entity_id == "118620452");

    // Without assistance both mentions resolve to the historian.
    const auto plain = ner::detect_persons(toks, base.caches, config, nullptr);
    REQUIRE(plain.size() == 2);
    CHECK(plain[0].best.entity_id == "118620452");
    CHECK(plain[1].best.entity_id == "118620452");
}

TEST_CASE("role phrases resolve through supplemented biography facts") {
    const auto base = sample_base();
    const auto stream = sample_letters_stream();
    const auto toks = tokens::tokenize_items(stream.items, "letters.tex");
    auto config = sample_config();

    // The pristine base has no matching role entry.
    CHECK(ner::detect_persons_by_role(toks, base.caches, config, nullptr).empty());

    const auto compiled = sample_assistance(base);
    const auto ids =
        ner::detect_persons_by_role(toks, compiled.base.caches, config, &compiled);
    REQUIRE(ids.size() == 1);
    CHECK(ids[0].occurrence.surface == "Herzog");
    CHECK(ids[0].occurrence.index == 35);
    CHECK(ids[0].best.entity_id == "118558404");
    CHECK(ids[0].alternates.empty());
}

TEST_CASE("role phrases need the exact word pattern") {
    const auto triples = [&] {
        std::istringstream in(
            "<https://d-nb.info/gnd/2> <https://d-nb.info/standards/elementset/gnd#preferredNameForThePerson> \"Karl\" .\n"
            "<https://d-nb.info/gnd/2> <https://d-nb.info/standards/elementset/gnd#biographicalOrHistoricalInformation> \"Herzog von Braunschweig, Regent\" .\n");
        return facts::ingest_ntriples(in, facts::default_namespaces());
    }();
    const auto caches = facts::build_caches(triples, {});
    ner::NerConfig config;

    auto ids = ner::detect_persons_by_role(
        tokens::tokenize_plain("Der Herzog von Braunschweig kam", "d"), caches,
        config, nullptr);
    REQUIRE(ids.size() == 1);
    CHECK(ids[0].best.entity_id == "2");

    CHECK(ner::detect_persons_by_role(
              tokens::tokenize_plain("Der Herzog aus Braunschweig kam", "d"),
              caches, config, nullptr)
              .empty());
    CHECK(ner::detect_persons_by_role(
              tokens::tokenize_plain("Der Herzog von braunschweig kam", "d"),
              caches, config, nullptr)
              .empty());
    CHECK(ner::detect_persons_by_role(
              tokens::tokenize_plain("Der Herzog von Meiningen kam", "d"), caches,
              config, nullptr)
              .empty());
}

TEST_CASE("location detection ranks by co-occurrence, class and population") {
    const auto base = sample_base();
    const auto stream = sample_letters_stream();
    const auto toks = tokens::tokenize_items(stream.items, "letters.tex");
    auto config = sample_config();

    const auto ids = ner::detect_locations(toks, base.caches, config, nullptr);
    REQUIRE(ids.size() == 1);
    CHECK(ids[0].occurrence.surface == "Frankfurt");
    CHECK(ids[0].kind == IdentificationKind::Location);
    CHECK(ids[0].best.is_location);
    // Zürich is pre-identified nearby, so co-occurrence supports both
    // Frankfurts; the larger one wins the population rank.
    CHECK(ids[0].best.entity_id == "2925533");
    const ner::RankKey expected = {0, 0, 0};
    CHECK(ids[0].best.rank_key == expected);
    REQUIRE(ids[0].alternates.size() == 1);
    CHECK(ids[0].alternates[0].entity_id == "2914521");
    const ner::RankKey alt_key = {0, 0, 1};
    CHECK(ids[0].alternates[0].rank_key == alt_key);
}

TEST_CASE("small random corpora agree with the exhaustive oracle") {
    for (unsigned seed = 1; seed <= 25; ++seed) {
        std::mt19937 rng(seed);
        const auto base = testsupport::synthetic_persons(rng, 60);
        const auto caches = facts::build_caches(base.triples, {});
        const auto toks = testsupport::planted_corpus(rng, base, 400, "d");
        ner::NerConfig config;
        config.window_radius = 10;
        config.creation_year = 1800;

        const auto expected = testsupport::ner_oracle(base.triples, toks, config);
        const auto got = ner::detect_persons(toks, caches, config, nullptr);
        REQUIRE(got.size() == expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CAPTURE(seed);
            CAPTURE(i);
            CHECK(got[i].occurrence.index == expected[i].token_index);
            CHECK(got[i].best.entity_id == expected[i].best);
            CHECK(got[i].best.rank_key == expected[i].best_key);
            REQUIRE(got[i].alternates.size() == expected[i].alternates.size());
            for (std::size_t k = 0; k < expected[i].alternates.size(); ++k)
                CHECK(got[i].alternates[k].entity_id == expected[i].alternates[k]);
        }
    }
}

TEST_CASE("explanations name the entity and its supporting features") {
    const auto base = sample_base();
    const auto stream = sample_letters_stream();
    const auto toks = tokens::tokenize_items(stream.items, "letters.tex");
    auto config = sample_config();
    const auto ids = ner::detect_persons(toks, base.caches, config, nullptr);
    REQUIRE(!ids.empty());
    const auto s = ner::explain_candidate(ids[0].best, base.caches);
    CHECK(s.find("Tacitus, Cornelius") != std::string::npos);
    CHECK(s.find("https://d-nb.info/gnd/118620452") != std::string::npos);
    CHECK(s.find("de.wikipedia.org/wiki/Tacitus") != std::string::npos);
    CHECK(s.find("name-exactness") != std::string::npos);

    CHECK(ner::rank_key_string({0, 1, 2}) == "(0,1,2)");
    CHECK(ner::rank_key_string({}) == "()");

    const auto record = ner::identification_record(ids[0]);
    const auto fields = text::split(record, '\t');
    REQUIRE(fields.size() == 7);
    CHECK(fields[0] == "letters.tex");
    CHECK(fields[3] == "person");
    CHECK(fields[4] == "118620452");
    CHECK(fields[5] == "(0,0,1,1,0)");
    CHECK(fields[6] == "1027579388");
}
