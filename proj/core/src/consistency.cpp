#include "letterkit/consistency.hpp"

#include <algorithm>
#include <tuple>

#include "letterkit/text.hpp"

namespace letterkit::consistency {

using edition::Corpus;
using edition::DatePrecision;
using edition::LetterRecord;
using markup::ArgMode;
using markup::Item;
using markup::ItemKind;

namespace {

Finding make(Severity sev, FindingCode code, std::string file,
             markup::SourceSpan span, std::string message) {
    Finding f;
    f.severity = sev;
    f.code = code;
    f.file = std::move(file);
    f.span = span;
    f.message = std::move(message);
    return f;
}

// Walks items recursively and reports entity references.
template <typename Fn>
void walk_references(const std::vector<Item>& items, Fn&& fn) {
    for (const Item& it : items) {
        if (it.kind == ItemKind::Command &&
            (it.name == "xperson" || it.name == "xlocation") &&
            !it.args.empty() && it.args[0].mode == ArgMode::Identifier) {
            fn(it.name, it.args[0].raw, it.span);
        }
        for (const auto& arg : it.args)
            if (arg.mode == ArgMode::Parsed) walk_references(arg.items, fn);
    }
}

}  // namespace

const char* finding_code_name(FindingCode code) {
    switch (code) {
        case FindingCode::VoidIdentifier: return "VoidIdentifier";
        case FindingCode::UnresolvedKitem: return "UnresolvedKitem";
        case FindingCode::OrphanAnnotation: return "OrphanAnnotation";
        case FindingCode::InsufficientDate: return "InsufficientDate";
        case FindingCode::UnparsableDate: return "UnparsableDate";
        case FindingCode::ImplausibleDate: return "ImplausibleDate";
        case FindingCode::DuplicatePerson: return "DuplicatePerson";
        case FindingCode::BrokenLink: return "BrokenLink";
    }
    return "Finding";
}

std::vector<Finding> check_references(const Corpus& corpus) {
    std::vector<Finding> out;
    auto check_entity = [&](const std::string& cmd, const std::string& id,
                            markup::SourceSpan span, const std::string& file) {
        const bool ok = cmd == "xperson" ? corpus.persons.count(id) > 0
                                         : corpus.locations.count(id) > 0;
        if (!ok)
            out.push_back(make(Severity::Error, FindingCode::VoidIdentifier, file,
                               span, "\\" + cmd + " references undeclared '" + id + "'"));
    };
    for (const auto& letter : corpus.letters) {
        if (!corpus.persons.count(letter.writer))
            out.push_back(make(Severity::Error, FindingCode::VoidIdentifier,
                               letter.source_file, {},
                               "letter '" + letter.id + "' writer '" + letter.writer +
                                   "' is undeclared"));
        if (!corpus.persons.count(letter.addressee))
            out.push_back(make(Severity::Error, FindingCode::VoidIdentifier,
                               letter.source_file, {},
                               "letter '" + letter.id + "' addressee '" +
                                   letter.addressee + "' is undeclared"));
        if (!corpus.locations.count(letter.place))
            out.push_back(make(Severity::Error, FindingCode::VoidIdentifier,
                               letter.source_file, {},
                               "letter '" + letter.id + "' place '" + letter.place +
                                   "' is undeclared"));
        walk_references(letter.body,
                        [&](const std::string& cmd, const std::string& id,
                            markup::SourceSpan span) {
                            check_entity(cmd, id, span, letter.source_file);
                        });
    }
    for (const auto& ann : corpus.annotations) {
        const LetterRecord* target = nullptr;
        for (const auto& letter : corpus.letters)
            if (letter.id == ann.target) target = &letter;
        if (!target) {
            out.push_back(make(Severity::Error, FindingCode::OrphanAnnotation,
                               ann.source_file, {},
                               "annotation targets nonexistent letter '" +
                                   ann.target + "'"));
        } else {
            for (const auto& [key, block] : ann.items) {
                if (!target->local_decls.count(key))
                    out.push_back(make(Severity::Error, FindingCode::UnresolvedKitem,
                                       ann.source_file, {},
                                       "\\kitem '" + key +
                                           "' has no declaration in letter '" +
                                           ann.target + "'"));
            }
        }
        walk_references(ann.body,
                        [&](const std::string& cmd, const std::string& id,
                            markup::SourceSpan span) {
                            check_entity(cmd, id, span, ann.source_file);
                        });
    }
    return out;
}

std::vector<Finding> check_dates(const Corpus& corpus) {
    std::vector<Finding> out;
    for (const auto& letter : corpus.letters) {
        if (!letter.date) {
            out.push_back(make(Severity::Warning, FindingCode::UnparsableDate,
                               letter.source_file, {},
                               "letter '" + letter.id + "' date '" +
                                   letter.date_text + "' does not parse"));
            continue;
        }
        if (letter.date->precision != DatePrecision::Day)
            out.push_back(make(Severity::Warning, FindingCode::InsufficientDate,
                               letter.source_file, {},
                               "letter '" + letter.id + "' date '" +
                                   letter.date_text + "' lacks day precision"));
        const int year = letter.date->year;
        auto writer = corpus.persons.find(letter.writer);
        if (writer != corpus.persons.end()) {
            const auto& p = writer->second;
            const bool before_birth = p.birth_year && year < *p.birth_year;
            const bool after_death = p.death_year && year > *p.death_year;
            if (before_birth || after_death)
                out.push_back(make(
                    Severity::Error, FindingCode::ImplausibleDate, letter.source_file,
                    {},
                    "letter '" + letter.id + "' dated " + std::to_string(year) +
                        " outside writer's life (" + edition::format_person_name(p) +
                        ")"));
        }
        if (corpus.creation_era &&
            (year < corpus.creation_era->first || year > corpus.creation_era->second))
            out.push_back(make(Severity::Error, FindingCode::ImplausibleDate,
                               letter.source_file, {},
                               "letter '" + letter.id + "' dated " +
                                   std::to_string(year) + " outside era " +
                                   std::to_string(corpus.creation_era->first) + "-" +
                                   std::to_string(corpus.creation_era->second)));
    }
    return out;
}

std::vector<Finding> check_duplicates(const Corpus& corpus) {
    std::vector<Finding> out;
    std::vector<const edition::PersonDecl*> decls;
    for (const auto& [id, decl] : corpus.persons) decls.push_back(&decl);
    for (std::size_t i = 0; i < decls.size(); ++i) {
        for (std::size_t j = i + 1; j < decls.size(); ++j) {
            const auto& a = *decls[i];
            const auto& b = *decls[j];
            if (text::fold_name(a.display_name) != text::fold_name(b.display_name))
                continue;
            const int a_lo = a.birth_year.value_or(-100000);
            const int a_hi = a.death_year.value_or(100000);
            const int b_lo = b.birth_year.value_or(-100000);
            const int b_hi = b.death_year.value_or(100000);
            if (a_lo <= b_hi && b_lo <= a_hi)
                out.push_back(make(Severity::Warning, FindingCode::DuplicatePerson,
                                   a.source_file, {},
                                   "'" + a.id + "' and '" + b.id +
                                       "' look like the same person (" +
                                       a.display_name + ")"));
        }
    }
    return out;
}

std::vector<Finding> check_all(const Corpus& corpus) {
    std::vector<Finding> out = check_references(corpus);
    auto dates = check_dates(corpus);
    out.insert(out.end(), dates.begin(), dates.end());
    auto dups = check_duplicates(corpus);
    out.insert(out.end(), dups.begin(), dups.end());
    sort_findings(out);
    return out;
}

void sort_findings(std::vector<Finding>& findings) {
    std::stable_sort(findings.begin(), findings.end(),
                     [](const Finding& a, const Finding& b) {
                         return std::tie(a.file, a.span.byte_start, a.code, a.message) <
                                std::tie(b.file, b.span.byte_start, b.code, b.message);
                     });
}

bool has_errors(const std::vector<Finding>& findings) {
    return std::any_of(findings.begin(), findings.end(),
                       [](const Finding& f) { return f.severity == Severity::Error; });
}

std::string format_finding(const Finding& f) {
    std::string s = f.severity == Severity::Error ? "error" : "warning";
    s += " [";
    s += finding_code_name(f.code);
    s += "] ";
    if (!f.file.empty()) {
        s += f.file + ":" + std::to_string(f.span.line) + ":" +
             std::to_string(f.span.column) + ": ";
    }
    s += f.message;
    return s;
}

std::string finding_record(const Finding& f) {
    std::string s = f.severity == Severity::Error ? "error" : "warning";
    s += '\t';
    s += finding_code_name(f.code);
    s += '\t';
    s += f.file;
    s += '\t';
    s += std::to_string(f.span.line);
    s += '\t';
    s += std::to_string(f.span.column);
    s += '\t';
    s += f.message;
    return s;
}

}  // namespace letterkit::consistency
