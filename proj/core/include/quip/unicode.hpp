#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace quip::unicode {

/// Decodes the scalar value starting at byte `pos` and advances `pos` past it.
/// Ill-formed bytes never fail: each offending byte is consumed on its own and
/// returned as U+FFFD, so any byte string decodes to a definite scalar sequence.
char32_t decode_scalar(std::string_view text, std::size_t& pos);

/// Number of scalar values in `text`.
std::size_t scalar_length(std::string_view text);

/// Byte offset of every scalar start, plus a final entry equal to text.size().
/// starts[i]..starts[i+1] is the byte range of scalar i.
std::vector<std::size_t> scalar_starts(std::string_view text);

/// Simple (1:1) Unicode lowercase mapping; identity for unmapped scalars.
char32_t simple_lowercase(char32_t cp);

/// True for scalars with the Unicode White_Space property.
bool is_whitespace(char32_t cp);

void append_utf8(std::string& out, char32_t cp);

/// Lowercases every scalar via the simple mapping. Byte length may change.
std::string lowercase(std::string_view text);

/// Replaces each maximal whitespace run with a single space and trims both ends.
std::string collapse_whitespace(std::string_view text);

}  // namespace quip::unicode
