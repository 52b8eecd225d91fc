#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tmr::text {

/// Decodes UTF-8 into unicode scalar values. Invalid sequences decode to
/// U+FFFD one byte at a time, so every input has a decoding.
std::u32string decode_utf8(std::string_view s);

std::string encode_utf8(std::u32string_view s);

/// True when `s` is well-formed UTF-8.
bool is_valid_utf8(std::string_view s);

/// Simple case mapping for ASCII, Latin-1, Latin Extended-A, Greek and basic
/// Cyrillic. Characters outside those blocks are returned unchanged.
char32_t to_lower(char32_t c);

std::string to_lower(std::string_view s);

bool is_space(char32_t c);

/// ASCII punctuation plus ¡ ¿ « » “ ” ‘ ’ … – — and the middle dot.
bool is_punctuation(char32_t c);

/// Letters, digits, underscore and any other non-space, non-punctuation
/// scalar above ASCII.
bool is_word_char(char32_t c);

/// Scalar value starting at byte `pos` (U+FFFD when malformed).
char32_t scalar_at(std::string_view s, std::size_t pos);

/// Scalar value ending just before byte `pos`.
char32_t scalar_before(std::string_view s, std::size_t pos);

/// Strips leading and trailing whitespace (ASCII and U+00A0).
std::string_view trim(std::string_view s);

/// Splits on runs of whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view s);

/// FNV-1a, 64-bit, over the raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace tmr::text
