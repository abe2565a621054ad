#include "letterkit/edition.hpp"

#include <array>
#include <charconv>
#include <regex>

#include "letterkit/text.hpp"

namespace letterkit::edition {

using markup::ArgMode;
using markup::ItemKind;

namespace {

const char* code_name(EditionErrorCode code) {
    switch (code) {
        case EditionErrorCode::BadArgument: return "BadArgument";
        case EditionErrorCode::DuplicateLetterId: return "DuplicateLetterId";
        case EditionErrorCode::NestedLetter: return "NestedLetter";
        case EditionErrorCode::KitemOutsideKlist: return "KitemOutsideKlist";
        case EditionErrorCode::DuplicateDeclaration: return "DuplicateDeclaration";
        case EditionErrorCode::MalformedName: return "MalformedName";
        case EditionErrorCode::UnparsableDate: return "UnparsableDate";
        case EditionErrorCode::IdentifierShadowsGlobal: return "IdentifierShadowsGlobal";
    }
    return "EditionError";
}

[[noreturn]] void fail(EditionErrorCode code, std::string detail) {
    throw EditionError(code, std::move(detail));
}

const std::array<const char*, 12> kGermanMonths = {
    "Januar", "Februar", "März", "April", "Mai", "Juni",
    "Juli", "August", "September", "Oktober", "November", "Dezember"};

std::optional<int> month_number(std::string_view name) {
    for (int i = 0; i < 12; ++i)
        if (name == kGermanMonths[static_cast<std::size_t>(i)]) return i + 1;
    return std::nullopt;
}

bool leap_year(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int year, int month) {
    static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && leap_year(year)) return 29;
    return lengths[month - 1];
}

std::optional<int> parse_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

const std::string& identifier_arg(const Item& it, std::size_t idx,
                                  const char* what) {
    if (idx >= it.args.size() || it.args[idx].mode != ArgMode::Identifier)
        fail(EditionErrorCode::BadArgument,
             std::string(what) + ": expected identifier argument");
    return it.args[idx].raw;
}

}  // namespace

EditionError::EditionError(EditionErrorCode code, std::string detail)
    : std::runtime_error(std::string(code_name(code)) + ": " + detail),
      code_(code) {}

void collect_local_decls(const std::vector<Item>& items,
                         std::map<std::string, SourceSpan>& decls) {
    for (const Item& it : items) {
        if (it.kind == ItemKind::Command && it.name == "xl" && !it.args.empty() &&
            it.args[0].mode == ArgMode::Identifier) {
            decls.emplace(it.args[0].raw, it.span);
        }
        for (const auto& arg : it.args)
            if (arg.mode == ArgMode::Parsed) collect_local_decls(arg.items, decls);
    }
}

std::vector<LetterRecord> extract_letters(const ItemStream& stream) {
    std::vector<LetterRecord> out;
    std::map<std::string, bool> seen;
    const auto& items = stream.items;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Item& it = items[i];
        if (it.kind != ItemKind::BeginEnv || it.name != "letter") continue;
        if (it.args.size() != 5)
            fail(EditionErrorCode::BadArgument,
                 "letter environment needs 5 arguments (" + stream.source_name + ")");
        LetterRecord rec;
        rec.source_file = stream.source_name;
        rec.id = identifier_arg(it, 0, "letter id");
        rec.writer = identifier_arg(it, 1, "letter writer");
        rec.addressee = identifier_arg(it, 2, "letter addressee");
        rec.place = identifier_arg(it, 3, "letter place");
        rec.date_text = it.args[4].raw;
        try {
            rec.date = parse_hist_date(rec.date_text);
        } catch (const EditionError&) {
            rec.date = std::nullopt;  // admitted, flagged by consistency checks
        }
        std::size_t j = i + 1;
        for (; j < items.size(); ++j) {
            if (items[j].kind == ItemKind::BeginEnv && items[j].name == "letter")
                fail(EditionErrorCode::NestedLetter,
                     "letter inside letter '" + rec.id + "'");
            if (items[j].kind == ItemKind::EndEnv && items[j].name == "letter") break;
            rec.body.push_back(items[j]);
        }
        collect_local_decls(rec.body, rec.local_decls);
        if (seen.count(rec.id))
            fail(EditionErrorCode::DuplicateLetterId, "letter id '" + rec.id + "'");
        seen[rec.id] = true;
        out.push_back(std::move(rec));
        i = j;
    }
    return out;
}

std::vector<AnnotationRecord> extract_annotations(const ItemStream& stream) {
    std::vector<AnnotationRecord> out;
    const auto& items = stream.items;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const Item& it = items[i];
        if (it.kind != ItemKind::BeginEnv || it.name != "annotation") continue;
        AnnotationRecord rec;
        rec.source_file = stream.source_name;
        if (it.args.empty())
            fail(EditionErrorCode::BadArgument, "annotation needs a target id");
        rec.target = identifier_arg(it, 0, "annotation target");
        std::size_t j = i + 1;
        for (; j < items.size(); ++j) {
            if (items[j].kind == ItemKind::EndEnv && items[j].name == "annotation")
                break;
            rec.body.push_back(items[j]);
        }
        // \kitem blocks: from the \kitem to the next \kitem or \end{klist}.
        bool in_klist = false;
        std::string current_key;
        std::vector<Item> current_block;
        auto flush = [&] {
            if (!current_key.empty())
                rec.items[current_key] = std::move(current_block);
            current_key.clear();
            current_block.clear();
        };
        for (const Item& b : rec.body) {
            if (b.kind == ItemKind::BeginEnv && b.name == "klist") {
                in_klist = true;
                continue;
            }
            if (b.kind == ItemKind::EndEnv && b.name == "klist") {
                flush();
                in_klist = false;
                continue;
            }
            if (b.kind == ItemKind::Command && b.name == "kitem") {
                if (!in_klist)
                    fail(EditionErrorCode::KitemOutsideKlist,
                         "\\kitem outside klist in annotation for '" + rec.target + "'");
                flush();
                current_key = identifier_arg(b, 0, "kitem key");
                continue;
            }
            if (in_klist && !current_key.empty()) current_block.push_back(b);
        }
        out.push_back(std::move(rec));
        i = j;
    }
    return out;
}

void extract_declarations(const ItemStream& stream,
                          std::map<std::string, PersonDecl>& persons,
                          std::map<std::string, LocationDecl>& locations) {
    for (const Item& it : stream.items) {
        if (it.kind != ItemKind::Command) continue;
        if (it.name == "defperson") {
            PersonDecl decl;
            decl.source_file = stream.source_name;
            decl.id = identifier_arg(it, 0, "defperson id");
            if (it.args.size() < 2)
                fail(EditionErrorCode::BadArgument,
                     "defperson '" + decl.id + "' needs a name argument");
            ParsedName name = parse_person_name(it.args[1].raw);
            decl.display_name = name.display_name;
            decl.birth_year = name.birth_year;
            decl.death_year = name.death_year;
            if (!persons.emplace(decl.id, decl).second)
                fail(EditionErrorCode::DuplicateDeclaration,
                     "defperson '" + decl.id + "'");
        } else if (it.name == "deflocation") {
            LocationDecl decl;
            decl.source_file = stream.source_name;
            decl.id = identifier_arg(it, 0, "deflocation id");
            if (it.args.size() < 2)
                fail(EditionErrorCode::BadArgument,
                     "deflocation '" + decl.id + "' needs a name argument");
            decl.display_name = text::trim(it.args[1].raw);
            if (decl.display_name.empty())
                fail(EditionErrorCode::MalformedName,
                     "deflocation '" + decl.id + "' has an empty name");
            if (!locations.emplace(decl.id, decl).second)
                fail(EditionErrorCode::DuplicateDeclaration,
                     "deflocation '" + decl.id + "'");
        }
    }
}

HistDate parse_hist_date(std::string_view raw) {
    const std::string s = text::trim(raw);
    const auto tokens = text::split_ws(s);
    HistDate d;
    auto bad = [&]() -> HistDate {
        fail(EditionErrorCode::UnparsableDate, "'" + s + "'");
    };
    if (tokens.size() == 1) {
        auto y = parse_int(tokens[0]);
        if (!y) return bad();
        d.year = *y;
        d.precision = DatePrecision::Year;
        return d;
    }
    if (tokens.size() == 2) {
        auto m = month_number(tokens[0]);
        auto y = parse_int(tokens[1]);
        if (!m || !y) return bad();
        d.year = *y;
        d.month = *m;
        d.precision = DatePrecision::Month;
        return d;
    }
    if (tokens.size() == 3) {
        std::string_view day_tok = tokens[0];
        if (day_tok.empty() || day_tok.back() != '.') return bad();
        day_tok.remove_suffix(1);
        auto day = parse_int(day_tok);
        auto m = month_number(tokens[1]);
        auto y = parse_int(tokens[2]);
        if (!day || !m || !y) return bad();
        if (*day < 1 || *day > days_in_month(*y, *m)) return bad();
        d.year = *y;
        d.month = *m;
        d.day = *day;
        d.precision = DatePrecision::Day;
        return d;
    }
    return bad();
}

ParsedName parse_person_name(std::string_view raw) {
    static const std::regex years_re(R"(^(.*?)\s*\((\d{4})?--(\d{4})?\)\s*$)");
    const std::string s = text::trim(raw);
    ParsedName out;
    std::smatch m;
    if (std::regex_match(s, m, years_re) && (m[2].matched || m[3].matched)) {
        out.display_name = text::trim(m[1].str());
        if (m[2].matched) out.birth_year = std::stoi(m[2].str());
        if (m[3].matched) out.death_year = std::stoi(m[3].str());
    } else {
        out.display_name = s;
    }
    if (out.display_name.empty())
        fail(EditionErrorCode::MalformedName, "'" + s + "'");
    if (out.birth_year && out.death_year && *out.birth_year > *out.death_year)
        fail(EditionErrorCode::MalformedName,
             "life years out of order in '" + s + "'");
    return out;
}

std::string format_person_name(const PersonDecl& decl) {
    std::string s = decl.display_name;
    if (decl.birth_year || decl.death_year) {
        s += " (";
        if (decl.birth_year) s += std::to_string(*decl.birth_year);
        s += "--";
        if (decl.death_year) s += std::to_string(*decl.death_year);
        s += ")";
    }
    return s;
}

int compare_dates(const std::optional<HistDate>& a, const std::optional<HistDate>& b) {
    if (!a && !b) return 0;
    if (!a) return 1;
    if (!b) return -1;
    auto key = [](const HistDate& d) {
        return std::array<int, 5>{d.year,
                                  d.precision == DatePrecision::Year ? 0 : 1,
                                  d.month.value_or(0),
                                  d.precision == DatePrecision::Day ? 1 : 0,
                                  d.day.value_or(0)};
    };
    const auto ka = key(*a);
    const auto kb = key(*b);
    if (ka < kb) return -1;
    if (kb < ka) return 1;
    return 0;
}

Corpus build_corpus(const std::vector<SourceDoc>& letter_docs,
                    const std::vector<SourceDoc>& annotation_docs,
                    const std::vector<SourceDoc>& declaration_docs,
                    std::optional<std::pair<int, int>> creation_era) {
    Corpus corpus;
    corpus.creation_era = creation_era;
    std::map<std::string, std::string> letter_files;
    for (const auto& doc : letter_docs) {
        try {
            for (auto& rec : extract_letters(doc.stream)) {
                auto [pos, inserted] = letter_files.emplace(rec.id, doc.name);
                if (!inserted)
                    fail(EditionErrorCode::DuplicateLetterId,
                         "letter id '" + rec.id + "' in " + pos->second + " and " +
                             doc.name);
                corpus.letters.push_back(std::move(rec));
            }
        } catch (const EditionError& e) {
            if (e.code() == EditionErrorCode::DuplicateLetterId) throw;
            throw EditionError(e.code(), std::string(e.what()) + " [" + doc.name + "]");
        }
    }
    for (const auto& doc : annotation_docs) {
        for (auto& rec : extract_annotations(doc.stream))
            corpus.annotations.push_back(std::move(rec));
    }
    for (const auto& doc : declaration_docs)
        extract_declarations(doc.stream, corpus.persons, corpus.locations);

    // Local identifiers must not shadow corpus-global ones.
    for (const auto& letter : corpus.letters) {
        for (const auto& [local, span] : letter.local_decls) {
            if (corpus.persons.count(local) || corpus.locations.count(local))
                fail(EditionErrorCode::IdentifierShadowsGlobal,
                     "'" + local + "' in letter '" + letter.id + "'");
        }
    }
    return corpus;
}

}  // namespace letterkit::edition
