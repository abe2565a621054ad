#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "gen.hpp"
#include "letterkit/combine.hpp"
#include "letterkit/publish.hpp"
#include "letterkit/text.hpp"

using namespace letterkit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
}

edition::SourceDoc load_doc(const std::string& name) {
    const auto reg = markup::default_dialect();
    const auto path = std::string(FIXTURE_DIR) + "/" + name;
    return {name, markup::parse_document(slurp(path), reg, name)};
}

edition::Corpus sample_corpus() {
    return edition::build_corpus({load_doc("sample/letters.tex")},
                                 {load_doc("sample/annotations.tex")},
                                 {load_doc("sample/persons.tex")},
                                 std::make_pair(1700, 1800));
}

fs::path fresh_dir(const char* name) {
    const auto p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
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

}  // namespace

TEST_CASE("page uris replace colons and reject underscores") {
    CHECK(publish::make_uri("bs:1745-02-14") == "bs_1745-02-14");
    CHECK(publish::make_uri("plain") == "plain");
    CHECK(publish::letter_page_name("bs:1") == "bs_1.html");
    CHECK(publish::person_page_name("lange") == "person-lange.html");
    CHECK(publish::location_page_name("zuerich") == "place-zuerich.html");
    try {
        publish::make_uri("bad_id");
        FAIL("expected IdentifierContainsUnderscore");
    } catch (const publish::PublishError& e) {
        CHECK(e.code() == publish::PublishErrorCode::IdentifierContainsUnderscore);
    }
}

TEST_CASE("chains follow body references chronologically") {
    const auto corpus = sample_corpus();
    const auto chains = publish::compute_chains(corpus);

    std::map<std::string, const publish::Chain*> by_id;
    for (const auto& chain : chains) by_id[chain.id] = &chain;

    // lange is referenced in three letters, in date order.
    REQUIRE(by_id.count("person-lange") == 1);
    const auto& lange = *by_id["person-lange"];
    CHECK(lange.title == "Letters referencing Lange, Samuel Gotthold");
    REQUIRE(lange.members.size() == 3);
    CHECK(lange.members[0].href == "bs_1745-02-14.html");
    CHECK(lange.members[1].href == "bs_1745-03-02.html");
    CHECK(lange.members[2].href == "bg_1746-1.html");

    REQUIRE(by_id.count("place-zuerich") == 1);
    CHECK(by_id["place-zuerich"]->members.size() == 1);

    // One chain per writer; no chain for unreferenced declared persons.
    REQUIRE(by_id.count("writer-bodmer") == 1);
    CHECK(by_id["writer-bodmer"]->members.size() == 3);
    REQUIRE(by_id.count("writer-sulzer") == 1);
    CHECK(by_id.count("person-gleim") == 0);
    CHECK(by_id.count("person-sulzer") == 0);

    // Brute recount: chain membership equals per-letter reference scan.
    std::map<std::string, std::size_t> expected;
    for (const auto& letter : corpus.letters) {
        const auto src = markup::serialize_items(letter.body);
        if (src.find("\\xperson{lange}") != std::string::npos)
            ++expected["person-lange"];
        if (src.find("\\xlocation{zuerich}") != std::string::npos)
            ++expected["place-zuerich"];
    }
    CHECK(lange.members.size() == expected["person-lange"]);
    CHECK(by_id["place-zuerich"]->members.size() == expected["place-zuerich"]);
}

TEST_CASE("the generated site is complete, link-clean and reproducible") {
    const auto corpus = sample_corpus();
    const auto chains = publish::compute_chains(corpus);
    const auto dir = fresh_dir("lk-site");
    const auto plan = publish::generate_site(corpus, chains, dir);

    CHECK(plan.letter_pages.size() == 4);
    CHECK(plan.entity_pages.size() == 6);  // 4 persons + 2 locations
    CHECK(plan.chain_pages.size() == chains.size());
    REQUIRE(plan.assets.size() == 3);
    for (const auto& name : plan.assets) CHECK(fs::exists(dir / name));

    const auto findings = publish::check_links(dir);
    for (const auto& f : findings) MESSAGE(consistency::format_finding(f));
    CHECK(findings.empty());

    // The annotation links into the letter body span.
    const auto letter_html = slurp(dir / "bs_1745-02-14.html");
    CHECK(letter_html.find("id=\"xl-brief_lange\"") != std::string::npos);
    CHECK(letter_html.find("href=\"#xl-brief_lange\"") != std::string::npos);
    CHECK(letter_html.find("href=\"person-lange.html\"") != std::string::npos);

    // Regeneration produces identical bytes.
    const auto dir2 = fresh_dir("lk-site-2");
    publish::generate_site(corpus, chains, dir2);
    CHECK(testsupport::tree_digest(dir.string()) ==
          testsupport::tree_digest(dir2.string()));
    fs::remove_all(dir);
    fs::remove_all(dir2);
}

TEST_CASE("navigation uses inert placeholders at sequence boundaries") {
    const auto reg = markup::default_dialect();
    const char* src =
        "\\begin{letter}{solo:1}{bodmer}{sulzer}{zuerich}{1745}\nNur einer.\n\\end{letter}\n";
    edition::SourceDoc doc{"solo.tex", markup::parse_document(src, reg, "solo.tex")};
    const auto corpus =
        edition::build_corpus({doc}, {}, {load_doc("sample/persons.tex")});
    const auto dir = fresh_dir("lk-site-solo");
    publish::generate_site(corpus, publish::compute_chains(corpus), dir);
    const auto html = slurp(dir / "solo_1.html");
    std::size_t inert = 0;
    for (std::size_t pos = 0;
         (pos = html.find("nav-inert", pos)) != std::string::npos; ++pos)
        ++inert;
    CHECK(inert == 4);
    fs::remove_all(dir);

    // In the full corpus the middle bodmer letter has both writer slots live.
    const auto full = sample_corpus();
    const auto dir2 = fresh_dir("lk-site-full");
    publish::generate_site(full, publish::compute_chains(full), dir2);
    const auto mid = slurp(dir2 / "bs_1745-03-02.html");
    CHECK(mid.find("prev by writer: bs:1745-02-14") != std::string::npos);
    CHECK(mid.find("next by writer: bg:1746-1") != std::string::npos);
    CHECK(mid.find("next in correspondence: sb:1745-03-20") != std::string::npos);
    fs::remove_all(dir2);
}

TEST_CASE("a hand-broken link is reported") {
    const auto corpus = sample_corpus();
    const auto dir = fresh_dir("lk-site-broken");
    publish::generate_site(corpus, publish::compute_chains(corpus), dir);
    auto html = slurp(dir / "index.html");
    const std::string link = "href=\"person-lange.html\"";
    const auto pos = html.find(link);
    REQUIRE(pos != std::string::npos);
    html.replace(pos, link.size(), "href=\"person-wegxx.html\"");
    {
        std::ofstream f(dir / "index.html", std::ios::binary);
        f << html;
    }
    const auto findings = publish::check_links(dir);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].code == consistency::FindingCode::BrokenLink);
    CHECK(findings[0].file == "index.html");
    CHECK(findings[0].message.find("person-wegxx.html") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("review reports mark each occurrence once with detail anchors") {
    const auto base = sample_base();
    const std::string plain = "Der Historiker Tacitus und nochmal Tacitus hier";
    const auto toks = tokens::tokenize_plain(plain, "doc");
    ner::NerConfig config;
    config.creation_year = 1745;
    const auto ids = ner::detect_persons(toks, base.caches, config, nullptr);
    REQUIRE(ids.size() == 2);

    const auto dir = fresh_dir("lk-review");
    {
        std::ofstream css(dir / "style.css", std::ios::binary);
        css << "body {}\n";
    }
    const auto file = dir / "review-1.html";
    publish::generate_review_report("doc", plain, ids, base.caches, file);
    const auto html = slurp(file);
    CHECK(html.find("<mark id=\"occ-1\">") != std::string::npos);
    CHECK(html.find("<mark id=\"occ-2\">") != std::string::npos);
    CHECK(html.find("<mark id=\"occ-3\">") == std::string::npos);
    CHECK(html.find("id=\"detail-1\"") != std::string::npos);
    CHECK(html.find("id=\"detail-2\"") != std::string::npos);
    CHECK(html.find("Tacitus, Cornelius") != std::string::npos);
    CHECK(html.find("1027579388") != std::string::npos);  // listed alternate
    CHECK(publish::check_links(dir).empty());
    fs::remove_all(dir);
}

TEST_CASE("triple export is sorted and complete") {
    const auto corpus = sample_corpus();
    const auto base = sample_base();
    const auto stream = load_doc("sample/letters.tex").stream;
    const auto toks = tokens::tokenize_items(stream.items, "letters.tex");
    ner::NerConfig config;
    config.creation_year = 1745;
    auto ids = ner::detect_persons(toks, base.caches, config, nullptr);
    auto locs = ner::detect_locations(toks, base.caches, config, nullptr);
    ids.insert(ids.end(), locs.begin(), locs.end());

    const auto out = publish::render_triples(corpus, ids);
    CHECK(out.find("bs:1745-02-14\twriter\tbodmer\n") != std::string::npos);
    CHECK(out.find("bs:1745-02-14\taddressee\tsulzer\n") != std::string::npos);
    CHECK(out.find("bs:1745-02-14\tdate\t14. Februar 1745\n") != std::string::npos);
    CHECK(out.find("lange\tname\tLange, Samuel Gotthold\n") != std::string::npos);
    CHECK(out.find("lange\tborn\t1711\n") != std::string::npos);
    CHECK(out.find("zuerich\tname\tZ\xc3\xbcrich\n") != std::string::npos);
    CHECK(out.find("\tidentifiesPerson\t118620452\n") != std::string::npos);
    CHECK(out.find("\tidentifiesLocation\t2925533\n") != std::string::npos);

    const auto lines = text::split(out.substr(0, out.size() - 1), '\n');
    CHECK(std::is_sorted(lines.begin(), lines.end()));
    CHECK(publish::render_triples(corpus, ids) == out);
}

TEST_CASE("the geo export counts occurrences and quotes rfc-4180 style") {
    const auto base = sample_base();
    auto make_loc_id = [&](const char* geo_id, std::size_t start) {
        ner::Identification id;
        id.kind = ner::IdentificationKind::Location;
        id.best.entity_id = geo_id;
        id.best.is_location = true;
        id.occurrence.span.byte_start = start;
        return id;
    };
    std::vector<ner::Identification> ids = {
        make_loc_id("2657896", 0),
        make_loc_id("2657896", 40),
        make_loc_id("2914521", 80),
    };
    const auto csv = publish::render_geo_csv(ids, base.locations);
    CHECK(csv.find("id,name,latitude,longitude,count\r\n") == 0);
    CHECK(csv.find("2657896,Z\xc3\xbcrich,47.37,8.54,2\r\n") != std::string::npos);
    // The name with parentheses needs no quoting; a comma-bearing name does.
    CHECK(csv.find("2914521,Frankfurt (Oder),52.34714,14.55062,1\r\n") !=
          std::string::npos);

    std::vector<facts::LocationRecord> tricky = base.locations;
    tricky[0].name = "Ort, mit \"Komma\"";
    const auto quoted = publish::render_geo_csv({make_loc_id("2657896", 0)}, tricky);
    CHECK(quoted.find("2657896,\"Ort, mit \"\"Komma\"\"\",47.37,8.54,1\r\n") !=
          std::string::npos);
}
