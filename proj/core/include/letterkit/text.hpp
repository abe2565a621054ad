#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace letterkit::text {

// Decodes the UTF-8 sequence starting at byte offset `pos`. Advances `pos`
// past the sequence. Malformed bytes decode as U+FFFD, advancing one byte.
char32_t decode_utf8(std::string_view s, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

// Word alphabet of the markup tokenizer: letters, digits and the hyphen.
// Letter coverage is Latin (ASCII, Latin-1 supplement, Latin Extended-A/B)
// plus Greek and Cyrillic; anything else counts as punctuation.
bool is_word_char(char32_t cp);
bool is_letter(char32_t cp);
bool is_upper(char32_t cp);

// True when the first codepoint is an uppercase letter.
bool starts_capitalized(std::string_view word);

// Name normalization shared by duplicate detection and the fact-store name
// indexes: lowercase, diacritics stripped (NFKD-style for the Latin ranges),
// ess-zed expanded to "ss".
std::string fold_name(std::string_view s);

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);

std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

bool is_all_digits(std::string_view s);

}  // namespace letterkit::text
