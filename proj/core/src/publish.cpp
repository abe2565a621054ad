#include "letterkit/publish.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "letterkit/combine.hpp"
#include "letterkit/text.hpp"

namespace letterkit::publish {

namespace fs = std::filesystem;
using edition::Corpus;
using edition::LetterRecord;
using markup::Item;
using markup::ItemKind;

PublishError::PublishError(PublishErrorCode code, std::string detail)
    : std::runtime_error([&] {
          switch (code) {
              case PublishErrorCode::IdentifierContainsUnderscore:
                  return "IdentifierContainsUnderscore: ";
              case PublishErrorCode::Io: return "Io: ";
          }
          return "PublishError: ";
      }() + std::move(detail)),
      code_(code) {}

std::string make_uri(const std::string& id) {
    if (id.find('_') != std::string::npos)
        throw PublishError(PublishErrorCode::IdentifierContainsUnderscore, id);
    std::string out = id;
    std::replace(out.begin(), out.end(), ':', '_');
    return out;
}

std::string letter_page_name(const std::string& id) { return make_uri(id) + ".html"; }
std::string person_page_name(const std::string& id) {
    return "person-" + make_uri(id) + ".html";
}
std::string location_page_name(const std::string& id) {
    return "place-" + make_uri(id) + ".html";
}

namespace {

std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void collect_entity_refs(const std::vector<Item>& items,
                         std::set<std::string>& persons,
                         std::set<std::string>& locations) {
    for (const Item& it : items) {
        if (it.kind == ItemKind::Command && it.args.size() >= 1 &&
            it.args[0].mode == markup::ArgMode::Identifier) {
            if (it.name == "xperson") persons.insert(it.args[0].raw);
            if (it.name == "xlocation") locations.insert(it.args[0].raw);
        }
        for (const auto& arg : it.args)
            if (arg.mode == markup::ArgMode::Parsed)
                collect_entity_refs(arg.items, persons, locations);
    }
}

std::string letter_label(const LetterRecord& letter) {
    std::string s = letter.id;
    if (!letter.date_text.empty()) s += " (" + letter.date_text + ")";
    return s;
}

// Body rendering: entity references become links, local declarations become
// anchors, everything else is escaped text.
void render_items_html(const std::vector<Item>& items, std::string& out) {
    for (const Item& it : items) {
        switch (it.kind) {
            case ItemKind::Word:
            case ItemKind::Punctuation:
                out += html_escape(it.text);
                break;
            case ItemKind::Whitespace: {
                if (std::count(it.text.begin(), it.text.end(), '\n') >= 2)
                    out += "</p>\n<p>";
                else
                    out += ' ';
                break;
            }
            case ItemKind::Comment:
            case ItemKind::Opaque:
                break;
            case ItemKind::Command: {
                auto last_parsed = [&]() -> const std::vector<Item>* {
                    for (auto rit = it.args.rbegin(); rit != it.args.rend(); ++rit)
                        if (rit->mode == markup::ArgMode::Parsed) return &rit->items;
                    return nullptr;
                };
                if (it.name == "xperson" && it.args.size() == 2) {
                    out += "<a class=\"person\" href=\"" +
                           person_page_name(it.args[0].raw) + "\">";
                    render_items_html(it.args[1].items, out);
                    out += "</a>";
                } else if (it.name == "xlocation" && it.args.size() == 2) {
                    out += "<a class=\"place\" href=\"" +
                           location_page_name(it.args[0].raw) + "\">";
                    render_items_html(it.args[1].items, out);
                    out += "</a>";
                } else if (it.name == "xl" && it.args.size() == 2) {
                    out += "<span class=\"passage\" id=\"xl-" +
                           make_uri(it.args[0].raw) + "\">";
                    render_items_html(it.args[1].items, out);
                    out += "</span>";
                } else if (it.name == "ksection" && !it.args.empty()) {
                    out += "<h3>";
                    render_items_html(it.args[0].items, out);
                    out += "</h3>";
                } else if (const auto* parsed = last_parsed()) {
                    render_items_html(*parsed, out);
                }
                break;
            }
            case ItemKind::BeginEnv:
            case ItemKind::EndEnv:
                break;
        }
    }
}

std::string page_head(const std::string& title) {
    return "<!DOCTYPE html>\n<html lang=\"de\">\n<head>\n<meta charset=\"utf-8\">\n"
           "<title>" + html_escape(title) + "</title>\n"
           "<link rel=\"stylesheet\" href=\"style.css\">\n</head>\n<body>\n";
}

constexpr const char* kPageFoot = "</body>\n</html>\n";

constexpr const char* kStylesheet =
    "body { font-family: serif; max-width: 48em; margin: 2em auto; }\n"
    "nav.letter-nav span, nav.letter-nav a { display: inline-block; width: 12em; }\n"
    ".nav-inert { color: #999; }\n"
    "mark { background: #fde68a; }\n"
    ".passage { border-bottom: 1px dotted #888; }\n"
    ".detail { border: 1px solid #ccc; margin: 1em 0; padding: 0.5em; }\n";

constexpr const char* kChainScript =
    "(function () {\n"
    "  var m = location.hash.match(/^#i(\\d+)$/);\n"
    "  if (!m) return;\n"
    "  var el = document.getElementById('i' + m[1]);\n"
    "  if (el) el.scrollIntoView(true);\n"
    "})();\n";

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw PublishError(PublishErrorCode::Io, "cannot write " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.close();
    if (!f) throw PublishError(PublishErrorCode::Io, "write failed " + path.string());
}

std::string asset_content(const fs::path& override_dir, const char* name,
                          const char* embedded) {
    if (!override_dir.empty()) {
        const fs::path candidate = override_dir / name;
        std::ifstream f(candidate, std::ios::binary);
        if (f)
            return std::string((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    }
    return embedded;
}

struct NavSlots {
    const LetterRecord* prev_writer = nullptr;
    const LetterRecord* next_writer = nullptr;
    const LetterRecord* prev_corr = nullptr;
    const LetterRecord* next_corr = nullptr;
};

std::string nav_slot(const char* label, const LetterRecord* target) {
    if (!target)
        return std::string("<span class=\"nav-inert\">") + label + ": &ndash;</span>";
    return std::string("<a href=\"") + letter_page_name(target->id) + "\">" + label +
           ": " + html_escape(target->id) + "</a>";
}

}  // namespace

std::vector<Chain> compute_chains(const Corpus& corpus) {
    const auto ordered = combine::order_letters(corpus);
    std::map<std::string, std::vector<const LetterRecord*>> by_person;
    std::map<std::string, std::vector<const LetterRecord*>> by_location;
    std::map<std::string, std::vector<const LetterRecord*>> by_writer;
    for (const LetterRecord* letter : ordered) {
        std::set<std::string> persons, locations;
        collect_entity_refs(letter->body, persons, locations);
        for (const auto& id : persons) by_person[id].push_back(letter);
        for (const auto& id : locations) by_location[id].push_back(letter);
        by_writer[letter->writer].push_back(letter);
    }
    std::vector<Chain> chains;
    auto add = [&](const std::string& prefix, const std::string& id,
                   const std::string& title,
                   const std::vector<const LetterRecord*>& members) {
        Chain chain;
        chain.id = prefix + "-" + make_uri(id);
        chain.title = title;
        for (const LetterRecord* letter : members)
            chain.members.push_back({letter_page_name(letter->id),
                                     letter_label(*letter)});
        chains.push_back(std::move(chain));
    };
    for (const auto& [id, members] : by_person) {
        std::string title = "Letters referencing " + id;
        if (auto hit = corpus.persons.find(id); hit != corpus.persons.end())
            title = "Letters referencing " + hit->second.display_name;
        add("person", id, title, members);
    }
    for (const auto& [id, members] : by_location) {
        std::string title = "Letters referencing " + id;
        if (auto hit = corpus.locations.find(id); hit != corpus.locations.end())
            title = "Letters referencing " + hit->second.display_name;
        add("place", id, title, members);
    }
    for (const auto& [id, members] : by_writer)
        add("writer", id, "Letters by " + id, members);
    return chains;
}

SitePlan generate_site(const Corpus& corpus, const std::vector<Chain>& chains,
                       const fs::path& out_dir, const fs::path& template_override_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw PublishError(PublishErrorCode::Io, out_dir.string());

    SitePlan plan;
    const auto ordered = combine::order_letters(corpus);

    // Four-way navigation: sequence position among the writer's letters and
    // within the unordered writer/addressee correspondence.
    std::map<std::string, NavSlots> nav;
    std::map<std::string, std::vector<const LetterRecord*>> by_writer;
    std::map<std::pair<std::string, std::string>, std::vector<const LetterRecord*>>
        by_pair;
    for (const LetterRecord* letter : ordered) {
        by_writer[letter->writer].push_back(letter);
        auto pair = std::minmax(letter->writer, letter->addressee);
        by_pair[{pair.first, pair.second}].push_back(letter);
    }
    for (const auto& [writer, members] : by_writer) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i > 0) nav[members[i]->id].prev_writer = members[i - 1];
            if (i + 1 < members.size()) nav[members[i]->id].next_writer = members[i + 1];
        }
    }
    for (const auto& [pair, members] : by_pair) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i > 0) nav[members[i]->id].prev_corr = members[i - 1];
            if (i + 1 < members.size()) nav[members[i]->id].next_corr = members[i + 1];
        }
    }

    std::map<std::string, const edition::AnnotationRecord*> annotation_of;
    for (const auto& ann : corpus.annotations) annotation_of[ann.target] = &ann;

    std::map<std::string, std::vector<const LetterRecord*>> person_refs;
    std::map<std::string, std::vector<const LetterRecord*>> location_refs;
    for (const LetterRecord* letter : ordered) {
        std::set<std::string> persons, locations;
        collect_entity_refs(letter->body, persons, locations);
        for (const auto& id : persons) person_refs[id].push_back(letter);
        for (const auto& id : locations) location_refs[id].push_back(letter);
    }

    for (const LetterRecord* letter : ordered) {
        std::string html = page_head(letter->id);
        html += "<h1>" + html_escape(letter->writer) + " &rarr; " +
                html_escape(letter->addressee) + "</h1>\n";
        html += "<p class=\"meta\">" + html_escape(letter->place) + ", " +
                html_escape(letter->date_text) + "</p>\n";
        const NavSlots& slots = nav[letter->id];
        html += "<nav class=\"letter-nav\">";
        html += nav_slot("prev by writer", slots.prev_writer);
        html += nav_slot("next by writer", slots.next_writer);
        html += nav_slot("prev in correspondence", slots.prev_corr);
        html += nav_slot("next in correspondence", slots.next_corr);
        html += "</nav>\n<div class=\"body\"><p>";
        render_items_html(letter->body, html);
        html += "</p></div>\n";
        if (auto hit = annotation_of.find(letter->id); hit != annotation_of.end()) {
            html += "<div class=\"annotation\"><h2>Annotations</h2><dl>\n";
            for (const auto& [key, note] : hit->second->items) {
                html += "<dt><a href=\"#xl-" + make_uri(key) + "\">" +
                        html_escape(key) + "</a></dt><dd>";
                render_items_html(note, html);
                html += "</dd>\n";
            }
            html += "</dl></div>\n";
        }
        html += kPageFoot;
        const std::string name = letter_page_name(letter->id);
        write_file(out_dir / name, html);
        plan.letter_pages.push_back(name);
    }

    auto entity_page = [&](const std::string& name, const std::string& title,
                           const std::string& extra,
                           const std::vector<const LetterRecord*>& refs) {
        std::string html = page_head(title);
        html += "<h1>" + html_escape(title) + "</h1>\n";
        if (!extra.empty()) html += "<p>" + html_escape(extra) + "</p>\n";
        html += "<h2>Referencing letters</h2>\n<ul>\n";
        for (const LetterRecord* letter : refs)
            html += "<li><a href=\"" + letter_page_name(letter->id) + "\">" +
                    html_escape(letter_label(*letter)) + "</a></li>\n";
        if (refs.empty()) html += "<li>none</li>\n";
        html += "</ul>\n";
        html += kPageFoot;
        write_file(out_dir / name, html);
        plan.entity_pages.push_back(name);
    };
    for (const auto& [id, decl] : corpus.persons) {
        std::string extra;
        if (decl.birth_year || decl.death_year) {
            extra = (decl.birth_year ? std::to_string(*decl.birth_year) : "") + "--" +
                    (decl.death_year ? std::to_string(*decl.death_year) : "");
        }
        entity_page(person_page_name(id), decl.display_name, extra, person_refs[id]);
    }
    for (const auto& [id, decl] : corpus.locations)
        entity_page(location_page_name(id), decl.display_name, {}, location_refs[id]);

    for (const Chain& chain : chains) {
        std::string html = page_head(chain.title);
        html += "<h1>" + html_escape(chain.title) + "</h1>\n<ol class=\"chain\">\n";
        for (std::size_t i = 0; i < chain.members.size(); ++i)
            html += "<li id=\"i" + std::to_string(i + 1) + "\"><a href=\"" +
                    chain.members[i].href + "\">" +
                    html_escape(chain.members[i].label) + "</a></li>\n";
        html += "</ol>\n<script src=\"chain.js\"></script>\n";
        html += kPageFoot;
        const std::string name = "chain-" + chain.id + ".html";
        write_file(out_dir / name, html);
        plan.chain_pages.push_back(name);
    }

    std::string index = page_head("Index");
    index += "<h1>Letters</h1>\n<ol>\n";
    for (const LetterRecord* letter : ordered)
        index += "<li><a href=\"" + letter_page_name(letter->id) + "\">" +
                 html_escape(letter_label(*letter)) + "</a></li>\n";
    index += "</ol>\n<h1>Persons</h1>\n<ul>\n";
    for (const auto& [id, decl] : corpus.persons)
        index += "<li><a href=\"" + person_page_name(id) + "\">" +
                 html_escape(decl.display_name) + "</a></li>\n";
    index += "</ul>\n<h1>Locations</h1>\n<ul>\n";
    for (const auto& [id, decl] : corpus.locations)
        index += "<li><a href=\"" + location_page_name(id) + "\">" +
                 html_escape(decl.display_name) + "</a></li>\n";
    index += "</ul>\n<h1>Chains</h1>\n<ul>\n";
    for (const Chain& chain : chains)
        index += "<li><a href=\"chain-" + chain.id + ".html\">" +
                 html_escape(chain.title) + "</a></li>\n";
    index += "</ul>\n";
    index += kPageFoot;
    write_file(out_dir / "index.html", index);
    plan.assets.push_back("index.html");

    write_file(out_dir / "style.css",
               asset_content(template_override_dir, "style.css", kStylesheet));
    plan.assets.push_back("style.css");
    write_file(out_dir / "chain.js",
               asset_content(template_override_dir, "chain.js", kChainScript));
    plan.assets.push_back("chain.js");
    return plan;
}

void generate_review_report(const std::string& doc_id, const std::string& plain_text,
                            const std::vector<ner::Identification>& identifications,
                            const facts::CacheSet& caches, const fs::path& out_file) {
    std::vector<const ner::Identification*> ordered;
    for (const auto& id : identifications)
        if (id.occurrence.doc_id == doc_id) ordered.push_back(&id);
    std::sort(ordered.begin(), ordered.end(),
              [](const ner::Identification* a, const ner::Identification* b) {
                  return a->occurrence.span.byte_start < b->occurrence.span.byte_start;
              });

    std::string html = page_head("Review: " + doc_id);
    html += "<h1>Review: " + html_escape(doc_id) + "</h1>\n<div class=\"text\"><p>";
    std::size_t pos = 0;
    std::size_t occ = 0;
    std::vector<const ner::Identification*> marked;
    for (const auto* id : ordered) {
        const auto& span = id->occurrence.span;
        if (span.byte_start < pos || span.byte_end > plain_text.size()) continue;
        html += html_escape(std::string_view(plain_text).substr(pos, span.byte_start - pos));
        const auto n = std::to_string(++occ);
        html += "<mark id=\"occ-" + n + "\"><a href=\"#detail-" + n + "\">";
        html += html_escape(std::string_view(plain_text)
                                .substr(span.byte_start, span.byte_end - span.byte_start));
        html += "</a></mark>";
        pos = span.byte_end;
        marked.push_back(id);
    }
    html += html_escape(std::string_view(plain_text).substr(pos));
    html += "</p></div>\n";

    occ = 0;
    for (const auto* id : marked) {
        ++occ;
        html += "<div class=\"detail\" id=\"detail-" + std::to_string(occ) + "\">\n";
        html += "<p><a href=\"#occ-" + std::to_string(occ) + "\">&uarr; " +
                html_escape(id->occurrence.surface) + "</a></p>\n";
        if (id->kind == ner::IdentificationKind::Date && id->date) {
            html += "<p>date: " + std::to_string(id->date->year);
            if (id->date->month) html += "-" + std::to_string(*id->date->month);
            if (id->date->day) html += "-" + std::to_string(*id->date->day);
            html += "</p>\n";
        } else {
            html += "<pre>" + html_escape(ner::explain_candidate(id->best, caches)) +
                    "</pre>\n";
            if (!id->alternates.empty()) {
                html += "<p>alternates:</p>\n<ol>\n";
                for (const auto& alt : id->alternates)
                    html += "<li>" + html_escape(alt.entity_id) + " " +
                            html_escape(ner::rank_key_string(alt.rank_key)) + "</li>\n";
                html += "</ol>\n";
            }
        }
        html += "</div>\n";
    }
    html += kPageFoot;
    write_file(out_file, html);
}

std::string render_triples(const Corpus& corpus,
                           const std::vector<ner::Identification>& identifications) {
    std::vector<std::string> lines;
    auto emit = [&](const std::string& s, const std::string& p, const std::string& o) {
        lines.push_back(s + "\t" + p + "\t" + o);
    };
    for (const auto& letter : corpus.letters) {
        emit(letter.id, "writer", letter.writer);
        emit(letter.id, "addressee", letter.addressee);
        emit(letter.id, "place", letter.place);
        if (!letter.date_text.empty()) emit(letter.id, "date", letter.date_text);
    }
    for (const auto& [id, decl] : corpus.persons) {
        emit(id, "name", decl.display_name);
        if (decl.birth_year) emit(id, "born", std::to_string(*decl.birth_year));
        if (decl.death_year) emit(id, "died", std::to_string(*decl.death_year));
    }
    for (const auto& [id, decl] : corpus.locations) emit(id, "name", decl.display_name);
    for (const auto& id : identifications) {
        if (id.kind == ner::IdentificationKind::Date) continue;
        const std::string occ = id.occurrence.doc_id + ":" +
                                std::to_string(id.occurrence.span.byte_start);
        emit(occ, id.kind == ner::IdentificationKind::Location ? "identifiesLocation"
                                                               : "identifiesPerson",
             id.best.entity_id);
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

void export_triples(const Corpus& corpus,
                    const std::vector<ner::Identification>& identifications,
                    const fs::path& out_file) {
    write_file(out_file, render_triples(corpus, identifications));
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string render_geo_csv(const std::vector<ner::Identification>& identifications,
                           const std::vector<facts::LocationRecord>& locations) {
    std::map<std::string, std::size_t> counts;
    for (const auto& id : identifications)
        if (id.kind == ner::IdentificationKind::Location)
            ++counts[id.best.entity_id];
    std::string out = "id,name,latitude,longitude,count\r\n";
    for (const auto& [geo_id, count] : counts) {
        const facts::LocationRecord* rec = nullptr;
        for (const auto& candidate : locations)
            if (candidate.geo_id == geo_id) rec = &candidate;
        if (!rec) continue;
        out += csv_field(rec->geo_id) + "," + csv_field(rec->name) + "," +
               csv_field(rec->latitude_text) + "," + csv_field(rec->longitude_text) +
               "," + std::to_string(count) + "\r\n";
    }
    return out;
}

void export_geo_csv(const std::vector<ner::Identification>& identifications,
                    const std::vector<facts::LocationRecord>& locations,
                    const fs::path& out_file) {
    write_file(out_file, render_geo_csv(identifications, locations));
}

std::vector<consistency::Finding> check_links(const fs::path& site_dir) {
    std::map<std::string, std::set<std::string>> anchors;  // file -> ids
    std::vector<std::pair<std::string, std::string>> hrefs;  // (from file, href)
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(site_dir)) {
        if (!entry.is_regular_file()) continue;
        files.push_back(entry.path().filename().string());
    }
    std::sort(files.begin(), files.end());
    std::set<std::string> file_set(files.begin(), files.end());
    for (const auto& name : files) {
        if (name.size() < 6 || name.substr(name.size() - 5) != ".html") continue;
        std::ifstream f(site_dir / name, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(f)),
                            std::istreambuf_iterator<char>());
        for (std::size_t pos = 0;;) {
            pos = content.find("id=\"", pos);
            if (pos == std::string::npos) break;
            pos += 4;
            const auto end = content.find('"', pos);
            if (end == std::string::npos) break;
            anchors[name].insert(content.substr(pos, end - pos));
            pos = end;
        }
        for (const char* attr : {"href=\"", "src=\""}) {
            const std::size_t attr_len = std::string(attr).size();
            for (std::size_t pos = 0;;) {
                pos = content.find(attr, pos);
                if (pos == std::string::npos) break;
                pos += attr_len;
                const auto end = content.find('"', pos);
                if (end == std::string::npos) break;
                hrefs.emplace_back(name, content.substr(pos, end - pos));
                pos = end;
            }
        }
    }
    std::vector<consistency::Finding> findings;
    for (const auto& [from, href] : hrefs) {
        if (href.rfind("http:", 0) == 0 || href.rfind("https:", 0) == 0 ||
            href.rfind("mailto:", 0) == 0)
            continue;
        std::string target = href;
        std::string fragment;
        if (const auto hash = href.find('#'); hash != std::string::npos) {
            target = href.substr(0, hash);
            fragment = href.substr(hash + 1);
        }
        if (target.empty()) target = from;  // same-page fragment
        bool broken = false;
        std::string why;
        if (!file_set.count(target)) {
            broken = true;
            why = "missing target " + target;
        } else if (!fragment.empty() && !anchors[target].count(fragment)) {
            broken = true;
            why = "missing anchor #" + fragment + " in " + target;
        }
        if (broken) {
            consistency::Finding f;
            f.severity = consistency::Severity::Error;
            f.code = consistency::FindingCode::BrokenLink;
            f.message = href + ": " + why;
            f.file = from;
            findings.push_back(std::move(f));
        }
    }
    consistency::sort_findings(findings);
    return findings;
}

}  // namespace letterkit::publish
