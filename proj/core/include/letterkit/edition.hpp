#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "letterkit/markup.hpp"

namespace letterkit::edition {

using markup::Item;
using markup::ItemStream;
using markup::SourceSpan;

enum class DatePrecision { Year, Month, Day };

struct HistDate {
    int year = 0;
    std::optional<int> month;
    std::optional<int> day;
    DatePrecision precision = DatePrecision::Year;

    bool operator==(const HistDate&) const = default;
};

struct LetterRecord {
    std::string id;
    std::string writer;
    std::string addressee;
    std::string place;
    std::string date_text;
    std::optional<HistDate> date;  // absent when date_text does not parse
    std::vector<Item> body;
    std::map<std::string, SourceSpan> local_decls;  // \xl declarations
    std::string source_file;
};

struct AnnotationRecord {
    std::string target;  // letter id
    std::vector<Item> body;
    std::map<std::string, std::vector<Item>> items;  // \kitem blocks
    std::string source_file;
};

struct PersonDecl {
    std::string id;
    std::string display_name;  // "Last, First" form
    std::optional<int> birth_year;
    std::optional<int> death_year;
    std::string source_file;
};

struct LocationDecl {
    std::string id;
    std::string display_name;
    std::string source_file;
};

struct Corpus {
    std::vector<LetterRecord> letters;
    std::vector<AnnotationRecord> annotations;
    std::map<std::string, PersonDecl> persons;
    std::map<std::string, LocationDecl> locations;
    std::optional<std::pair<int, int>> creation_era;
};

enum class EditionErrorCode {
    BadArgument,
    DuplicateLetterId,
    NestedLetter,
    KitemOutsideKlist,
    DuplicateDeclaration,
    MalformedName,
    UnparsableDate,
    IdentifierShadowsGlobal,
};

class EditionError : public std::runtime_error {
public:
    EditionError(EditionErrorCode code, std::string detail);
    EditionErrorCode code() const { return code_; }

private:
    EditionErrorCode code_;
};

std::vector<LetterRecord> extract_letters(const ItemStream& stream);
std::vector<AnnotationRecord> extract_annotations(const ItemStream& stream);

void extract_declarations(const ItemStream& stream,
                          std::map<std::string, PersonDecl>& persons,
                          std::map<std::string, LocationDecl>& locations);

// "14. Februar 1745" / "Februar 1745" / "1745"; German month names.
HistDate parse_hist_date(std::string_view text);

struct ParsedName {
    std::string display_name;
    std::optional<int> birth_year;
    std::optional<int> death_year;
};

// "Lange, Samuel Gotthold (1711--1781)" -> name + life years.
ParsedName parse_person_name(std::string_view text);
std::string format_person_name(const PersonDecl& decl);

// Total order on optional dates: dated before undated; within a year,
// Year precision sorts before Month and Day.
int compare_dates(const std::optional<HistDate>& a, const std::optional<HistDate>& b);

struct SourceDoc {
    std::string name;
    ItemStream stream;
};

Corpus build_corpus(const std::vector<SourceDoc>& letter_docs,
                    const std::vector<SourceDoc>& annotation_docs,
                    const std::vector<SourceDoc>& declaration_docs,
                    std::optional<std::pair<int, int>> creation_era = {});

// Recursively collects \xl declarations (identifier -> span) from items.
void collect_local_decls(const std::vector<Item>& items,
                         std::map<std::string, SourceSpan>& decls);

}  // namespace letterkit::edition
