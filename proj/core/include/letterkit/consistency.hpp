#pragma once

#include <string>
#include <vector>

#include "letterkit/edition.hpp"

namespace letterkit::consistency {

enum class Severity { Error, Warning };

enum class FindingCode {
    VoidIdentifier,
    UnresolvedKitem,
    OrphanAnnotation,
    InsufficientDate,
    UnparsableDate,
    ImplausibleDate,
    DuplicatePerson,
    BrokenLink,
};

struct Finding {
    Severity severity = Severity::Warning;
    FindingCode code = FindingCode::VoidIdentifier;
    std::string message;
    std::string file;  // may be a letter/entity identifier when no file applies
    markup::SourceSpan span;
};

const char* finding_code_name(FindingCode code);

std::vector<Finding> check_references(const edition::Corpus& corpus);
std::vector<Finding> check_dates(const edition::Corpus& corpus);
std::vector<Finding> check_duplicates(const edition::Corpus& corpus);

// All checks, merged and deterministically sorted.
std::vector<Finding> check_all(const edition::Corpus& corpus);

void sort_findings(std::vector<Finding>& findings);
bool has_errors(const std::vector<Finding>& findings);

std::string format_finding(const Finding& f);
// Tab-separated: severity, code, file, line, column, message.
std::string finding_record(const Finding& f);

}  // namespace letterkit::consistency
