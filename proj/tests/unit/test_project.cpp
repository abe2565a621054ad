#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "letterkit/project.hpp"
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

// Copies a fixture project into a scratch directory so that stages can write
// outputs and snapshots without touching the source tree.
struct ScratchProject {
    fs::path dir;

    explicit ScratchProject(const std::string& fixture, const char* name) {
        dir = fs::temp_directory_path() / name;
        fs::remove_all(dir);
        fs::copy(std::string(FIXTURE_DIR) + "/" + fixture, dir,
                 fs::copy_options::recursive);
        ::setenv("LETTERKIT_OUT", (dir / "out").c_str(), 1);
    }
    ~ScratchProject() {
        ::unsetenv("LETTERKIT_OUT");
        fs::remove_all(dir);
    }

    project::ProjectManifest manifest() const {
        return project::load_manifest(dir / "letterkit.json");
    }
};

}  // namespace

TEST_CASE("manifest loading resolves paths and settings") {
    ScratchProject scratch("sample", "lk-proj-load");
    const auto m = scratch.manifest();
    REQUIRE(m.letters.size() == 1);
    CHECK(m.letters[0] == scratch.dir / "letters.tex");
    CHECK(m.assistance == scratch.dir / "assist.pl");
    CHECK(m.snapshot_path == scratch.dir / "facts.snapshot");
    CHECK(m.born_before == 1850);
    REQUIRE(m.creation_era.has_value());
    CHECK(m.creation_era->first == 1700);
    CHECK(m.ner_config.window_radius == 50);
    CHECK(m.ner_config.acceptance_prefix == std::vector<int>{2});
    CHECK(m.ner_config.stopwords.count("der") == 1);
    CHECK(m.ner_config.common_substantives.count("kaiser") == 1);
    CHECK(m.out.site == scratch.dir / "out" / "site");
    CHECK(m.out.findings == scratch.dir / "out" / "findings.tsv");
}

TEST_CASE("missing inputs and broken manifests are config errors") {
    ScratchProject scratch("sample", "lk-proj-missing");
    fs::remove(scratch.dir / "facts.nt");
    try {
        scratch.manifest();
        FAIL("expected Config error");
    } catch (const project::ProjectError& e) {
        CHECK(e.code() == project::ProjectErrorCode::Config);
        CHECK(std::string(e.what()).find("facts.nt") != std::string::npos);
    }

    {
        std::ofstream f(scratch.dir / "kaputt.json");
        f << "{ nicht json";
    }
    CHECK_THROWS_AS(project::load_manifest(scratch.dir / "kaputt.json"),
                    project::ProjectError);
    CHECK_THROWS_AS(project::load_manifest(scratch.dir / "fehlt.json"),
                    project::ProjectError);
}

TEST_CASE("the check stage exits clean on the sample and flags the defects") {
    {
        ScratchProject scratch("sample", "lk-proj-check-ok");
        std::ostringstream diag;
        CHECK(project::run_pipeline(scratch.manifest(), "check", diag) == 0);
        const auto findings = slurp(scratch.dir / "out" / "findings.tsv");
        CHECK(findings.find("InsufficientDate") != std::string::npos);
        CHECK(findings.find("error") == std::string::npos);
    }
    {
        ScratchProject scratch("defect", "lk-proj-check-bad");
        std::ostringstream diag;
        CHECK(project::run_pipeline(scratch.manifest(), "check", diag) == 1);
        const auto findings = slurp(scratch.dir / "out" / "findings.tsv");
        CHECK(text::split(findings.substr(0, findings.size() - 1), '\n').size() == 9);
        CHECK(diag.str().find("VoidIdentifier") != std::string::npos);
    }
}

TEST_CASE("an unknown stage is a usage error") {
    ScratchProject scratch("sample", "lk-proj-usage");
    std::ostringstream diag;
    CHECK(project::run_pipeline(scratch.manifest(), "frobnicate", diag) == 2);
    CHECK(diag.str().find("unknown stage") != std::string::npos);
}

TEST_CASE("re-running a stage reproduces its outputs byte for byte") {
    ScratchProject scratch("sample", "lk-proj-idem");
    std::ostringstream diag;
    const auto m = scratch.manifest();
    REQUIRE(project::run_pipeline(m, "check", diag) == 0);
    const auto first = slurp(m.out.findings);
    const auto first_log = slurp(m.out.log);
    REQUIRE(project::run_pipeline(m, "check", diag) == 0);
    CHECK(slurp(m.out.findings) == first);
    CHECK(slurp(m.out.log) == first_log);
    // The run log is free of wall-clock data: stage plus findings path only.
    CHECK(first_log == "stage\tcheck\n");
}

TEST_CASE("the ner stage writes identification records and review pages") {
    ScratchProject scratch("sample", "lk-proj-ner");
    std::ostringstream diag;
    const auto m = scratch.manifest();
    REQUIRE(project::run_pipeline(m, "ner", diag) == 0);
    const auto records = slurp(m.out.identifications);
    CHECK(records.find("118620452") != std::string::npos);   // historian
    CHECK(records.find("1027579388") != std::string::npos);  // emperor
    CHECK(records.find("118558404") != std::string::npos);   // duke via role
    CHECK(records.find("2925533") != std::string::npos);     // Frankfurt am Main
    CHECK(records.find("\tdate\t1745") != std::string::npos);
    CHECK(fs::exists(m.out.report / "review-1.html"));

    // A fresh snapshot is consumed transparently on the next run.
    REQUIRE(project::run_pipeline(m, "snapshot", diag) == 0);
    REQUIRE(fs::exists(m.snapshot_path));
    REQUIRE(project::run_pipeline(m, "ner", diag) == 0);
    CHECK(slurp(m.out.identifications) == records);
    CHECK(slurp(m.out.log).find("snapshot") != std::string::npos);
}

TEST_CASE("combine merges external annotations from tab-separated files") {
    ScratchProject scratch("sample", "lk-proj-combine");
    {
        std::ofstream f(scratch.dir / "extern.tsv");
        f << "sb:1745-03-20\tbesuchte Frankfurt\tGemeint ist die Messe.\n";
    }
    auto json_text = slurp(scratch.dir / "letterkit.json");
    const std::string needle = "\"annotations\": [\"annotations.tex\"],";
    const auto pos = json_text.find(needle);
    REQUIRE(pos != std::string::npos);
    json_text.insert(pos + needle.size(),
                     "\n  \"external_annotations\": [\"extern.tsv\"],");
    {
        std::ofstream f(scratch.dir / "letterkit.json");
        f << json_text;
    }
    std::ostringstream diag;
    const auto m = scratch.manifest();
    REQUIRE(project::run_pipeline(m, "combine", diag) == 0);
    const auto volume = slurp(m.out.volume / "volume.tex");
    CHECK(volume.find("\\xl{ext:1}{besuchte Frankfurt}") != std::string::npos);
    CHECK(volume.find("\\kitem{ext:1} Gemeint ist die Messe.") != std::string::npos);
    CHECK(volume.find("\\begin{annotation}{sb:1745-03-20}") != std::string::npos);

    // A pattern that cannot be located is a data error.
    {
        std::ofstream f(scratch.dir / "extern.tsv");
        f << "sb:1745-03-20\tgibt es nicht\tEgal.\n";
    }
    CHECK(project::run_pipeline(scratch.manifest(), "combine", diag) == 1);
}

TEST_CASE("the site stage publishes and validates links") {
    ScratchProject scratch("sample", "lk-proj-site");
    std::ostringstream diag;
    const auto m = scratch.manifest();
    REQUIRE(project::run_pipeline(m, "site", diag) == 0);
    CHECK(fs::exists(m.out.site / "index.html"));
    CHECK(fs::exists(m.out.site / "bs_1745-02-14.html"));
    CHECK(fs::exists(m.out.site / "style.css"));
    CHECK(fs::exists(m.out.site / "chain.js"));
}

TEST_CASE("the export stage writes triples and the geo table") {
    ScratchProject scratch("sample", "lk-proj-export");
    std::ostringstream diag;
    const auto m = scratch.manifest();
    REQUIRE(project::run_pipeline(m, "export", diag) == 0);
    const auto triples = slurp(m.out.triples);
    CHECK(triples.find("bs:1745-02-14\twriter\tbodmer\n") != std::string::npos);
    CHECK(triples.find("identifiesLocation\t2925533") != std::string::npos);
    const auto csv = slurp(m.out.geo_csv);
    CHECK(csv.find("id,name,latitude,longitude,count\r\n") == 0);
    CHECK(csv.find("2925533,Frankfurt am Main,50.11552,8.68417,1\r\n") !=
          std::string::npos);
}
