#include "letterkit/combine.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <tuple>

#include "letterkit/text.hpp"

namespace letterkit::combine {

using edition::AnnotationRecord;
using edition::Corpus;
using edition::LetterRecord;
using markup::Arg;
using markup::ArgMode;
using markup::Item;
using markup::ItemKind;

namespace {

const char* code_name(CombineErrorCode code) {
    switch (code) {
        case CombineErrorCode::MissingLetterForAnnotation: return "MissingLetterForAnnotation";
        case CombineErrorCode::PatternNotFound: return "PatternNotFound";
        case CombineErrorCode::PatternAmbiguous: return "PatternAmbiguous";
        case CombineErrorCode::OverlappingIdentifications: return "OverlappingIdentifications";
        case CombineErrorCode::Io: return "Io";
    }
    return "CombineError";
}

[[noreturn]] void fail(CombineErrorCode code, std::string detail) {
    throw CombineError(code, std::move(detail));
}

// Word positions at the top level of a body, with their item indices.
struct WordPos {
    std::size_t item_index;
    std::string surface;
};

std::vector<WordPos> top_level_words(const std::vector<Item>& body) {
    std::vector<WordPos> out;
    for (std::size_t i = 0; i < body.size(); ++i)
        if (body[i].kind == ItemKind::Word) out.push_back({i, body[i].text});
    return out;
}

// A phrase matches at word position k when the next phrase words follow
// consecutively with only whitespace or punctuation between them.
std::vector<std::pair<std::size_t, std::size_t>> find_phrase(
    const std::vector<Item>& body, const std::vector<std::string>& phrase) {
    std::vector<std::pair<std::size_t, std::size_t>> matches;  // item index range
    const auto words = top_level_words(body);
    if (phrase.empty() || words.size() < phrase.size()) return matches;
    for (std::size_t k = 0; k + phrase.size() <= words.size(); ++k) {
        bool ok = true;
        for (std::size_t m = 0; m < phrase.size() && ok; ++m)
            ok = words[k + m].surface == phrase[m];
        if (!ok) continue;
        // Contiguity: items between the matched words must not be words or
        // commands.
        const std::size_t lo = words[k].item_index;
        const std::size_t hi = words[k + phrase.size() - 1].item_index;
        for (std::size_t i = lo; i <= hi && ok; ++i) {
            const ItemKind kind = body[i].kind;
            if (kind == ItemKind::Word) {
                bool is_match_word = false;
                for (std::size_t m = 0; m < phrase.size(); ++m)
                    if (words[k + m].item_index == i) is_match_word = true;
                ok = is_match_word;
            } else {
                ok = kind == ItemKind::Whitespace || kind == ItemKind::Punctuation;
            }
        }
        if (ok) matches.emplace_back(lo, hi);
    }
    return matches;
}

}  // namespace

CombineError::CombineError(CombineErrorCode code, std::string detail)
    : std::runtime_error(std::string(code_name(code)) + ": " + std::move(detail)),
      code_(code) {}

std::vector<const LetterRecord*> order_letters(const Corpus& corpus) {
    std::vector<const LetterRecord*> out;
    out.reserve(corpus.letters.size());
    for (const auto& letter : corpus.letters) out.push_back(&letter);
    std::stable_sort(out.begin(), out.end(),
                     [](const LetterRecord* a, const LetterRecord* b) {
                         const int c = edition::compare_dates(a->date, b->date);
                         if (c != 0) return c < 0;
                         if (!a->date) return false;  // undated: keep source order
                         return std::tie(a->writer, a->id) < std::tie(b->writer, b->id);
                     });
    return out;
}

VolumePlan plan_volume(const Corpus& corpus) {
    VolumePlan plan;
    std::map<std::string, const AnnotationRecord*> by_target;
    for (const auto& ann : corpus.annotations) {
        bool found = false;
        for (const auto& letter : corpus.letters)
            if (letter.id == ann.target) found = true;
        if (!found)
            fail(CombineErrorCode::MissingLetterForAnnotation,
                 "annotation targets '" + ann.target + "'");
        by_target.emplace(ann.target, &ann);
    }
    for (const LetterRecord* letter : order_letters(corpus)) {
        VolumeEntry entry;
        entry.letter = *letter;
        auto ann = by_target.find(letter->id);
        if (ann != by_target.end()) entry.annotation = *ann->second;
        plan.entries.push_back(std::move(entry));
    }
    return plan;
}

MergeResult merge_annotations_at_patterns(
    const LetterRecord& letter, const std::vector<ExternalAnnotation>& external) {
    MergeResult result;
    result.letter = letter;
    result.annotation.target = letter.id;
    result.annotation.source_file = letter.source_file;
    int counter = 0;
    for (const auto& ext : external) {
        const auto phrase = text::split_ws(ext.pattern.phrase);
        if (phrase.empty())
            fail(CombineErrorCode::PatternNotFound, "empty pattern phrase");
        auto matches = find_phrase(result.letter.body, phrase);
        std::size_t pick = 0;
        if (ext.pattern.occurrence_index > 0) {
            if (matches.size() < static_cast<std::size_t>(ext.pattern.occurrence_index))
                fail(CombineErrorCode::PatternNotFound,
                     "occurrence " + std::to_string(ext.pattern.occurrence_index) +
                         " of '" + ext.pattern.phrase + "' in letter '" + letter.id +
                         "'");
            pick = static_cast<std::size_t>(ext.pattern.occurrence_index) - 1;
        } else {
            if (matches.empty())
                fail(CombineErrorCode::PatternNotFound,
                     "'" + ext.pattern.phrase + "' in letter '" + letter.id + "'");
            if (ext.pattern.kind == PatternKind::ExactPhrase && matches.size() > 1)
                fail(CombineErrorCode::PatternAmbiguous,
                     "'" + ext.pattern.phrase + "' matches " +
                         std::to_string(matches.size()) + " times in letter '" +
                         letter.id + "'");
        }
        const auto [lo, hi] = matches[pick];

        std::string decl_id;
        do {
            decl_id = "ext:" + std::to_string(++counter);
        } while (result.letter.local_decls.count(decl_id));

        Item wrap;
        wrap.kind = ItemKind::Command;
        wrap.name = "xl";
        wrap.span = result.letter.body[lo].span;
        Arg id_arg;
        id_arg.mode = ArgMode::Identifier;
        id_arg.raw = decl_id;
        Arg phrase_arg;
        phrase_arg.mode = ArgMode::Parsed;
        phrase_arg.items.assign(result.letter.body.begin() + static_cast<long>(lo),
                                result.letter.body.begin() + static_cast<long>(hi) + 1);
        wrap.args = {std::move(id_arg), std::move(phrase_arg)};

        result.letter.body.erase(result.letter.body.begin() + static_cast<long>(lo),
                                 result.letter.body.begin() + static_cast<long>(hi) + 1);
        result.letter.body.insert(result.letter.body.begin() + static_cast<long>(lo),
                                  std::move(wrap));
        result.letter.local_decls[decl_id] = result.letter.body[lo].span;
        result.annotation.items[decl_id] = ext.note;
    }
    // Synthesize a serializable body mirroring the items map.
    auto ws = [](const char* s) {
        Item it;
        it.kind = ItemKind::Whitespace;
        it.text = s;
        return it;
    };
    Item begin_klist;
    begin_klist.kind = ItemKind::BeginEnv;
    begin_klist.name = "klist";
    Item end_klist;
    end_klist.kind = ItemKind::EndEnv;
    end_klist.name = "klist";
    result.annotation.body.push_back(ws("\n"));
    result.annotation.body.push_back(begin_klist);
    for (const auto& [id, note] : result.annotation.items) {
        result.annotation.body.push_back(ws("\n"));
        Item kitem;
        kitem.kind = ItemKind::Command;
        kitem.name = "kitem";
        Arg key;
        key.mode = ArgMode::Identifier;
        key.raw = id;
        kitem.args = {std::move(key)};
        result.annotation.body.push_back(std::move(kitem));
        result.annotation.body.push_back(ws(" "));
        result.annotation.body.insert(result.annotation.body.end(), note.begin(),
                                      note.end());
    }
    result.annotation.body.push_back(ws("\n"));
    result.annotation.body.push_back(end_klist);
    result.annotation.body.push_back(ws("\n"));
    return result;
}

LetterRecord merge_ner_markup(const LetterRecord& letter,
                              const std::vector<EntityMark>& marks) {
    LetterRecord out = letter;
    std::map<tokens::ItemPath, const EntityMark*> by_path;
    for (const auto& mark : marks) {
        if (!by_path.emplace(mark.path, &mark).second)
            fail(CombineErrorCode::OverlappingIdentifications,
                 "two identifications on one occurrence in letter '" + letter.id +
                     "'");
    }
    for (const auto& [path, mark] : by_path) {
        Item* target = tokens::item_at(out.body, path);
        if (!target || target->kind != ItemKind::Word)
            fail(CombineErrorCode::OverlappingIdentifications,
                 "identification does not address a word in letter '" + letter.id +
                     "'");
        Item wrap;
        wrap.kind = ItemKind::Command;
        wrap.name = mark->is_location ? "xlocation" : "xperson";
        wrap.span = target->span;
        Arg id_arg;
        id_arg.mode = ArgMode::Identifier;
        id_arg.raw = mark->entity_id;
        Arg word_arg;
        word_arg.mode = ArgMode::Parsed;
        word_arg.items = {*target};
        wrap.args = {std::move(id_arg), std::move(word_arg)};
        *target = std::move(wrap);
    }
    return out;
}

std::string serialize_letter(const LetterRecord& letter) {
    std::string s = "\\begin{letter}{" + letter.id + "}{" + letter.writer + "}{" +
                    letter.addressee + "}{" + letter.place + "}{" + letter.date_text +
                    "}";
    s += markup::serialize_items(letter.body);
    s += "\\end{letter}";
    return s;
}

std::string serialize_annotation(const AnnotationRecord& annotation) {
    std::string s = "\\begin{annotation}{" + annotation.target + "}";
    s += markup::serialize_items(annotation.body);
    s += "\\end{annotation}";
    return s;
}

std::vector<std::filesystem::path> emit_markup(const VolumePlan& plan,
                                               const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    const auto path = out_dir / "volume.tex";
    std::string out = "% generated volume -- do not edit\n";
    out += markup::serialize_items(plan.front_matter);
    for (const auto& entry : plan.entries) {
        out += "\n";
        out += serialize_letter(entry.letter);
        out += "\n";
        if (entry.annotation) {
            out += "\n";
            out += serialize_annotation(*entry.annotation);
            out += "\n";
        }
    }
    out += markup::serialize_items(plan.back_matter);
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(CombineErrorCode::Io, "cannot write " + path.string());
    f << out;
    f.close();
    if (!f) fail(CombineErrorCode::Io, "write failed for " + path.string());
    return {path};
}

}  // namespace letterkit::combine
