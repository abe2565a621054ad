#include "letterkit/project.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "letterkit/assist.hpp"
#include "letterkit/combine.hpp"
#include "letterkit/consistency.hpp"
#include "letterkit/publish.hpp"
#include "letterkit/text.hpp"

namespace letterkit::project {

namespace fs = std::filesystem;
using nlohmann::json;

const char* const kStageNames[9] = {"parse",    "check", "combine",
                                    "ingest",   "snapshot", "ner",
                                    "site",     "export", "all"};

ProjectError::ProjectError(ProjectErrorCode code, std::string detail)
    : std::runtime_error([&] {
          switch (code) {
              case ProjectErrorCode::Usage: return "usage: ";
              case ProjectErrorCode::Config: return "config: ";
          }
          return "project: ";
      }() + std::move(detail)),
      code_(code) {}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ProjectError(ProjectErrorCode::Config, "cannot read " + path.string());
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
}

std::vector<fs::path> path_list(const json& j, const char* key, const fs::path& root) {
    std::vector<fs::path> out;
    if (!j.contains(key)) return out;
    for (const auto& entry : j.at(key)) {
        fs::path p = entry.get<std::string>();
        out.push_back(p.is_absolute() ? p : root / p);
    }
    return out;
}

fs::path one_path(const json& j, const char* key, const fs::path& root) {
    if (!j.contains(key)) return {};
    fs::path p = j.at(key).get<std::string>();
    return p.is_absolute() ? p : root / p;
}

std::set<std::string> folded_word_list(const fs::path& path) {
    std::set<std::string> out;
    if (path.empty()) return out;
    std::ifstream f(path);
    if (!f)
        throw ProjectError(ProjectErrorCode::Config, "cannot read " + path.string());
    std::string word;
    while (std::getline(f, word)) {
        word = text::trim(word);
        if (!word.empty() && word[0] != '#') out.insert(text::fold_name(word));
    }
    return out;
}

ner::FeatureId feature_by_name(const std::string& name) {
    for (ner::FeatureId id : {ner::FeatureId::IsNoStopword,
                              ner::FeatureId::IsNoCommonSubstantive,
                              ner::FeatureId::IsCapitalized,
                              ner::FeatureId::NameExactness,
                              ner::FeatureId::IsInWikipedia,
                              ner::FeatureId::DateOfBirthMatchesContext,
                              ner::FeatureId::HasOccupationInContext,
                              ner::FeatureId::IsLinkedToOthersInContext})
        if (name == ner::feature_name(id)) return id;
    throw ProjectError(ProjectErrorCode::Config, "unknown feature " + name);
}

struct LoadedDocs {
    std::vector<edition::SourceDoc> letters;
    std::vector<edition::SourceDoc> annotations;
    std::vector<edition::SourceDoc> declarations;
    std::map<std::string, std::string> sources;  // doc name -> raw bytes
};

LoadedDocs parse_all(const ProjectManifest& manifest) {
    LoadedDocs docs;
    const auto registry = markup::default_dialect();
    auto load = [&](const std::vector<fs::path>& paths,
                    std::vector<edition::SourceDoc>& into) {
        for (const auto& path : paths) {
            const std::string name = path.filename().string();
            const std::string source = read_file(path);
            into.push_back({name, markup::parse_document(source, registry, name)});
            docs.sources[name] = source;
        }
    };
    load(manifest.letters, docs.letters);
    load(manifest.annotations, docs.annotations);
    load(manifest.declarations, docs.declarations);
    return docs;
}

struct RunLog {
    std::vector<std::string> lines;

    void stage(const std::string& name) { lines.push_back("stage\t" + name); }
    void input(const fs::path& path, const std::string& bytes) {
        std::ostringstream os;
        os << "input\t" << path.filename().string() << "\t" << std::hex
           << facts::digest_bytes(bytes);
        lines.push_back(os.str());
    }
    void note(const std::string& s) { lines.push_back(s); }

    void write(const fs::path& path) const {
        fs::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary);
        for (const auto& line : lines) f << line << '\n';
    }
};

void log_inputs(RunLog& log, const std::vector<fs::path>& paths) {
    for (const auto& path : paths) log.input(path, read_file(path));
}

facts::FactBase ingest_sources(const ProjectManifest& manifest, RunLog& log) {
    std::vector<facts::FactTriple> triples;
    const auto namespaces = facts::default_namespaces();
    for (const auto& path : manifest.triples_files) {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw ProjectError(ProjectErrorCode::Config, "cannot read " + path.string());
        facts::IngestStats stats;
        auto batch = facts::ingest_ntriples(f, namespaces, &stats);
        log.note("triples\t" + path.filename().string() + "\t" +
                 std::to_string(stats.accepted) + " accepted, " +
                 std::to_string(stats.malformed) + " malformed");
        triples.insert(triples.end(), std::make_move_iterator(batch.begin()),
                       std::make_move_iterator(batch.end()));
    }
    if (manifest.born_before)
        triples = facts::restrict_persons_born_before(std::move(triples),
                                                      *manifest.born_before);
    std::vector<facts::LocationRecord> locations;
    for (const auto& path : manifest.geonames_files) {
        std::ifstream f(path, std::ios::binary);
        if (!f)
            throw ProjectError(ProjectErrorCode::Config, "cannot read " + path.string());
        facts::IngestStats stats;
        auto batch = facts::ingest_geonames_csv(f, {}, &stats);
        log.note("locations\t" + path.filename().string() + "\t" +
                 std::to_string(stats.accepted) + " accepted, " +
                 std::to_string(stats.rejected_rows) + " rejected");
        locations.insert(locations.end(), std::make_move_iterator(batch.begin()),
                         std::make_move_iterator(batch.end()));
    }
    return facts::make_fact_base(std::move(triples), std::move(locations));
}

facts::FactBase obtain_fact_base(const ProjectManifest& manifest, RunLog& log) {
    if (!manifest.snapshot_path.empty() && fs::exists(manifest.snapshot_path)) {
        log.note("facts\tsnapshot " + manifest.snapshot_path.filename().string());
        return facts::load_snapshot(manifest.snapshot_path.string());
    }
    return ingest_sources(manifest, log);
}

std::optional<assist::CompiledAssistance> obtain_assistance(
    const ProjectManifest& manifest, const facts::FactBase& base, RunLog& log) {
    if (manifest.assistance.empty()) return std::nullopt;
    const std::string source = read_file(manifest.assistance);
    log.input(manifest.assistance, source);
    const auto rules = assist::parse_assistance_doc(source);
    return assist::apply_assistance(rules, base);
}

std::vector<ner::Identification> run_ner_for_doc(
    const std::string& doc_name, const markup::ItemStream& stream,
    const facts::CacheSet& caches, ner::NerConfig config,
    const assist::CompiledAssistance* assistance) {
    const auto toks = tokens::tokenize_items(stream.items, doc_name);
    if (!config.creation_year) {
        for (const auto& letter : edition::extract_letters(stream))
            if (letter.date) {
                config.creation_year = letter.date->year;
                break;
            }
    }
    std::vector<ner::Identification> out;
    auto append = [&](std::vector<ner::Identification> batch) {
        out.insert(out.end(), std::make_move_iterator(batch.begin()),
                   std::make_move_iterator(batch.end()));
    };
    append(ner::detect_dates(toks, config));
    append(ner::detect_persons(toks, caches, config, assistance));
    append(ner::detect_persons_by_role(toks, caches, config, assistance));
    append(ner::detect_locations(toks, caches, config, assistance));
    std::stable_sort(out.begin(), out.end(),
                     [](const ner::Identification& a, const ner::Identification& b) {
                         return a.occurrence.index < b.occurrence.index;
                     });
    return out;
}

void write_text(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ProjectError(ProjectErrorCode::Config, "cannot write " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

struct StageRunner {
    const ProjectManifest& manifest;
    std::ostream& diag;
    RunLog log;
    int worst = 0;

    void mark(int status) { worst = std::max(worst, status); }

    void stage_parse() {
        log.stage("parse");
        log_inputs(log, manifest.letters);
        log_inputs(log, manifest.annotations);
        log_inputs(log, manifest.declarations);
        const auto docs = parse_all(manifest);
        std::size_t items = 0;
        for (const auto& doc : docs.letters) items += doc.stream.items.size();
        for (const auto& doc : docs.annotations) items += doc.stream.items.size();
        for (const auto& doc : docs.declarations) items += doc.stream.items.size();
        log.note("parsed\t" + std::to_string(items) + " items");
    }

    edition::Corpus build() {
        const auto docs = parse_all(manifest);
        return edition::build_corpus(docs.letters, docs.annotations,
                                     docs.declarations, manifest.creation_era);
    }

    void stage_check() {
        log.stage("check");
        const auto corpus = build();
        auto findings = consistency::check_all(corpus);
        std::string out;
        for (const auto& f : findings) {
            out += consistency::finding_record(f);
            out += '\n';
            diag << consistency::format_finding(f) << '\n';
        }
        write_text(manifest.out.findings, out);
        if (consistency::has_errors(findings)) mark(1);
    }

    void stage_combine() {
        log.stage("combine");
        const auto corpus = build();
        auto plan = combine::plan_volume(corpus);
        for (const auto& path : manifest.external_annotations) {
            std::ifstream f(path);
            if (!f)
                throw ProjectError(ProjectErrorCode::Config,
                                   "cannot read " + path.string());
            const auto registry = markup::default_dialect();
            std::string line;
            while (std::getline(f, line)) {
                if (text::trim(line).empty()) continue;
                const auto fields = text::split(line, '\t');
                if (fields.size() < 3)
                    throw ProjectError(ProjectErrorCode::Config,
                                       "bad external annotation line in " +
                                           path.filename().string());
                combine::ExternalAnnotation ext;
                ext.pattern.phrase = fields[1];
                ext.note = markup::parse_document(fields[2], registry).items;
                for (auto& entry : plan.entries) {
                    if (entry.letter.id != fields[0]) continue;
                    auto merged = combine::merge_annotations_at_patterns(entry.letter,
                                                                         {ext});
                    entry.letter = std::move(merged.letter);
                    if (entry.annotation) {
                        for (auto& [key, note] : merged.annotation.items)
                            entry.annotation->items[key] = note;
                    } else {
                        entry.annotation = std::move(merged.annotation);
                    }
                }
            }
        }
        const auto written = combine::emit_markup(plan, manifest.out.volume);
        for (const auto& path : written)
            log.note("wrote\t" + path.filename().string());
    }

    void stage_ingest() {
        log.stage("ingest");
        log_inputs(log, manifest.triples_files);
        log_inputs(log, manifest.geonames_files);
        const auto base = ingest_sources(manifest, log);
        log.note("facts\t" + std::to_string(base.triples.size()) + " triples, " +
                 std::to_string(base.locations.size()) + " locations");
    }

    void stage_snapshot() {
        log.stage("snapshot");
        if (manifest.snapshot_path.empty())
            throw ProjectError(ProjectErrorCode::Config, "no snapshot path configured");
        const auto base = ingest_sources(manifest, log);
        facts::SnapshotMeta meta;
        if (manifest.born_before)
            meta.restriction = "born_before " + std::to_string(*manifest.born_before);
        for (const auto& path : manifest.triples_files)
            meta.source_digests.emplace_back(path.filename().string(),
                                             facts::digest_bytes(read_file(path)));
        for (const auto& path : manifest.geonames_files)
            meta.source_digests.emplace_back(path.filename().string(),
                                             facts::digest_bytes(read_file(path)));
        fs::create_directories(manifest.snapshot_path.parent_path());
        facts::save_snapshot(base, meta, manifest.snapshot_path.string());
        log.note("snapshot\t" + manifest.snapshot_path.filename().string());
    }

    void stage_ner() {
        log.stage("ner");
        const auto docs = parse_all(manifest);
        const auto base = obtain_fact_base(manifest, log);
        const auto assistance = obtain_assistance(manifest, base, log);
        const auto& caches = assistance ? assistance->base.caches : base.caches;
        std::string records;
        fs::create_directories(manifest.out.report);
        std::size_t doc_no = 0;
        for (const auto& doc : docs.letters) {
            const auto ids =
                run_ner_for_doc(doc.name, doc.stream, caches, manifest.ner_config,
                                assistance ? &*assistance : nullptr);
            for (const auto& id : ids) {
                records += ner::identification_record(id);
                records += '\n';
            }
            publish::generate_review_report(
                doc.name, docs.sources.at(doc.name), ids, caches,
                manifest.out.report / ("review-" + std::to_string(++doc_no) + ".html"));
        }
        write_text(manifest.out.identifications, records);
    }

    void stage_site() {
        log.stage("site");
        const auto corpus = build();
        const auto chains = publish::compute_chains(corpus);
        publish::generate_site(corpus, chains, manifest.out.site);
        const auto findings = publish::check_links(manifest.out.site);
        for (const auto& f : findings) diag << consistency::format_finding(f) << '\n';
        if (consistency::has_errors(findings)) mark(1);
    }

    void stage_export() {
        log.stage("export");
        const auto docs = parse_all(manifest);
        const auto corpus = build();
        const auto base = obtain_fact_base(manifest, log);
        const auto assistance = obtain_assistance(manifest, base, log);
        const auto& caches = assistance ? assistance->base.caches : base.caches;
        std::vector<ner::Identification> all_ids;
        for (const auto& doc : docs.letters) {
            auto ids = run_ner_for_doc(doc.name, doc.stream, caches,
                                       manifest.ner_config,
                                       assistance ? &*assistance : nullptr);
            all_ids.insert(all_ids.end(), std::make_move_iterator(ids.begin()),
                           std::make_move_iterator(ids.end()));
        }
        fs::create_directories(manifest.out.triples.parent_path());
        publish::export_triples(corpus, all_ids, manifest.out.triples);
        publish::export_geo_csv(all_ids, base.locations, manifest.out.geo_csv);
    }

    void run(const std::string& stage) {
        if (stage == "parse") stage_parse();
        else if (stage == "check") stage_check();
        else if (stage == "combine") stage_combine();
        else if (stage == "ingest") stage_ingest();
        else if (stage == "snapshot") stage_snapshot();
        else if (stage == "ner") stage_ner();
        else if (stage == "site") stage_site();
        else if (stage == "export") stage_export();
        else if (stage == "all") {
            stage_parse();
            stage_check();
            stage_combine();
            stage_ingest();
            stage_snapshot();
            stage_ner();
            stage_site();
            stage_export();
        } else {
            throw ProjectError(ProjectErrorCode::Usage, "unknown stage '" + stage +
                                                            "'");
        }
    }
};

}  // namespace

ProjectManifest load_manifest(const fs::path& manifest_path) {
    std::ifstream f(manifest_path);
    if (!f)
        throw ProjectError(ProjectErrorCode::Config,
                           "cannot read manifest " + manifest_path.string());
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ProjectError(ProjectErrorCode::Config,
                           std::string("manifest parse: ") + e.what());
    }
    ProjectManifest m;
    m.root = fs::absolute(manifest_path).parent_path();
    m.letters = path_list(j, "letters", m.root);
    m.annotations = path_list(j, "annotations", m.root);
    m.declarations = path_list(j, "declarations", m.root);
    m.assistance = one_path(j, "assistance", m.root);
    m.external_annotations = path_list(j, "external_annotations", m.root);
    m.triples_files = path_list(j, "triples", m.root);
    m.geonames_files = path_list(j, "geonames", m.root);
    m.snapshot_path = one_path(j, "snapshot", m.root);
    if (j.contains("locale")) m.locale = j.at("locale").get<std::string>();
    if (j.contains("born_before")) m.born_before = j.at("born_before").get<int>();
    if (j.contains("creation_era")) {
        const auto& era = j.at("creation_era");
        m.creation_era = {era.at(0).get<int>(), era.at(1).get<int>()};
    }
    if (j.contains("ner")) {
        const auto& n = j.at("ner");
        if (n.contains("window_radius"))
            m.ner_config.window_radius = n.at("window_radius").get<int>();
        if (n.contains("paragraph_radius"))
            m.ner_config.paragraph_radius = n.at("paragraph_radius").get<int>();
        if (n.contains("acceptance_prefix"))
            m.ner_config.acceptance_prefix =
                n.at("acceptance_prefix").get<std::vector<int>>();
        if (n.contains("creation_year"))
            m.ner_config.creation_year = n.at("creation_year").get<int>();
        if (n.contains("feature_priority")) {
            m.ner_config.feature_priority.clear();
            for (const auto& name : n.at("feature_priority"))
                m.ner_config.feature_priority.push_back(
                    feature_by_name(name.get<std::string>()));
        }
        if (n.contains("stopwords"))
            m.ner_config.stopwords =
                folded_word_list(one_path(n, "stopwords", m.root));
        if (n.contains("common_substantives"))
            m.ner_config.common_substantives =
                folded_word_list(one_path(n, "common_substantives", m.root));
        if (n.contains("role_words"))
            m.ner_config.role_words =
                n.at("role_words").get<std::vector<std::string>>();
    }

    fs::path out_root = m.root / "out";
    if (const char* env = std::getenv("LETTERKIT_OUT"); env && *env)
        out_root = env;
    const json out = j.contains("output") ? j.at("output") : json::object();
    auto out_path = [&](const char* key, const char* fallback) {
        fs::path p = out.contains(key) ? fs::path(out.at(key).get<std::string>())
                                       : fs::path(fallback);
        return p.is_absolute() ? p : out_root / p;
    };
    m.out.site = out_path("site", "site");
    m.out.volume = out_path("volume", "volume");
    m.out.report = out_path("report", "report");
    m.out.triples = out_path("triples", "facts.tsv");
    m.out.geo_csv = out_path("geo_csv", "geo.csv");
    m.out.findings = out_path("findings", "findings.tsv");
    m.out.identifications = out_path("identifications", "identifications.tsv");
    m.out.log = out_path("log", "run.log");

    for (const auto* list : {&m.letters, &m.annotations, &m.declarations,
                             &m.external_annotations, &m.triples_files,
                             &m.geonames_files})
        for (const auto& path : *list)
            if (!fs::exists(path))
                throw ProjectError(ProjectErrorCode::Config,
                                   "missing input " + path.string());
    if (!m.assistance.empty() && !fs::exists(m.assistance))
        throw ProjectError(ProjectErrorCode::Config,
                           "missing assistance doc " + m.assistance.string());
    return m;
}

int run_pipeline(const ProjectManifest& manifest, const std::string& stage,
                 std::ostream& diag) {
    StageRunner runner{manifest, diag};
    try {
        runner.run(stage);
    } catch (const ProjectError& e) {
        diag << e.what() << '\n';
        return e.code() == ProjectErrorCode::Usage ? 2 : 2;
    } catch (const markup::ParseError& e) {
        diag << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const edition::EditionError& e) {
        diag << "edition error: " << e.what() << '\n';
        return 1;
    } catch (const combine::CombineError& e) {
        diag << "combine error: " << e.what() << '\n';
        return 1;
    } catch (const assist::AssistError& e) {
        diag << "assistance error: " << e.what() << '\n';
        return 1;
    } catch (const facts::FactsError& e) {
        diag << "facts error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << '\n';
        return 2;
    }
    runner.log.write(manifest.out.log);
    return runner.worst;
}

}  // namespace letterkit::project
