#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace quotesurvey::text {

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

/// Decodes one UTF-8 code point starting at `pos`; advances `pos`.
/// Invalid bytes decode as U+FFFD and consume one byte.
char32_t decode_utf8(std::string_view s, std::size_t& pos);

/// Letters and digits (ASCII, plus the Latin-1/Latin Extended ranges and
/// anything non-ASCII outside the punctuation/space blocks).
bool is_word_char(char32_t cp);

/// True if the code point before byte offset `pos` is not a word char
/// (or `pos` is the start of the string).
bool boundary_before(std::string_view s, std::size_t pos);
/// True if the code point starting at byte offset `pos` is not a word char
/// (or `pos` is the end of the string).
bool boundary_at(std::string_view s, std::size_t pos);

/// Splits on whitespace and punctuation. Apostrophes and hyphens strictly
/// inside a word are kept when `keep_inner_marks` is set ("don't", "anti-war").
std::vector<std::string> tokenize(std::string_view s, bool keep_inner_marks = false);

/// Case-fold, strip Latin diacritics, collapse runs of whitespace.
std::string normalize_name(std::string_view name);

}  // namespace quotesurvey::text
