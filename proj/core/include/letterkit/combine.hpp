#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "letterkit/edition.hpp"
#include "letterkit/tokens.hpp"

namespace letterkit::combine {

struct VolumeEntry {
    edition::LetterRecord letter;
    std::optional<edition::AnnotationRecord> annotation;
};

struct VolumePlan {
    std::vector<VolumeEntry> entries;
    std::vector<markup::Item> front_matter;
    std::vector<markup::Item> back_matter;
};

enum class PatternKind { ExactPhrase, PhrasePrefixAfterNthOccurrence };

struct PositionPattern {
    PatternKind kind = PatternKind::ExactPhrase;
    std::string phrase;        // plain-text token sequence
    int occurrence_index = 0;  // 1-based; 0 = unspecified
};

struct ExternalAnnotation {
    PositionPattern pattern;
    std::vector<markup::Item> note;
};

// An accepted identification to merge back into markup.
struct EntityMark {
    tokens::ItemPath path;
    std::string entity_id;
    bool is_location = false;
};

enum class CombineErrorCode {
    MissingLetterForAnnotation,
    PatternNotFound,
    PatternAmbiguous,
    OverlappingIdentifications,
    Io,
};

class CombineError : public std::runtime_error {
public:
    CombineError(CombineErrorCode code, std::string detail);
    CombineErrorCode code() const { return code_; }

private:
    CombineErrorCode code_;
};

// Chronological order: ascending date (Year precision before finer dates of
// the same year), ties by (writer id, letter id), undated letters last in
// source order.
std::vector<const edition::LetterRecord*> order_letters(const edition::Corpus& corpus);

VolumePlan plan_volume(const edition::Corpus& corpus);

struct MergeResult {
    edition::LetterRecord letter;
    edition::AnnotationRecord annotation;
};

// Locates each pattern in the letter's plain text, wraps the matched phrase
// in a generated \xl declaration and registers the note under that id.
MergeResult merge_annotations_at_patterns(
    const edition::LetterRecord& letter,
    const std::vector<ExternalAnnotation>& external);

// Wraps identified word occurrences as \xperson{id}{word} / \xlocation{id}{word}.
edition::LetterRecord merge_ner_markup(const edition::LetterRecord& letter,
                                       const std::vector<EntityMark>& marks);

// Writes the combined volume file; deterministic bytes for a given plan.
std::vector<std::filesystem::path> emit_markup(const VolumePlan& plan,
                                               const std::filesystem::path& out_dir);

std::string serialize_letter(const edition::LetterRecord& letter);
std::string serialize_annotation(const edition::AnnotationRecord& annotation);

}  // namespace letterkit::combine
