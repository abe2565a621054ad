#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "letterkit/markup.hpp"

namespace letterkit::tokens {

// Path into a body item tree: element 0 is the top-level item index,
// followed by (arg index, item index) pairs for nested Parsed arguments.
using ItemPath = std::vector<std::size_t>;

struct TokenOccurrence {
    std::string doc_id;
    std::size_t index = 0;  // position in the document's token sequence
    std::string surface;
    markup::SourceSpan span;
    std::size_t paragraph = 0;
    ItemPath path;  // empty for plain-text documents
    // Entity id when the word sits inside existing \xperson / \xlocation
    // markup; such occurrences are never re-identified.
    std::string pre_identified;
    bool pre_identified_location = false;
};

std::vector<TokenOccurrence> tokenize_items(const std::vector<markup::Item>& items,
                                            const std::string& doc_id);

std::vector<TokenOccurrence> tokenize_plain(std::string_view plain,
                                            const std::string& doc_id);

markup::Item* item_at(std::vector<markup::Item>& items, const ItemPath& path);

}  // namespace letterkit::tokens
