#pragma once

#include <string>
#include <string_view>

namespace causaforge::text {

// Unicode helpers over UTF-8 strings. Invalid UTF-8 is replaced with U+FFFD.
std::string nfc(std::string_view s);
std::string to_lower(std::string_view s);

// Canonical concept form: NFC, lowercase, trimmed, internal whitespace runs
// collapsed to one ASCII space, leading/trailing punctuation stripped.
std::string normalize_concept(std::string_view s);

std::string trim(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle);

// Largest prefix length <= max_bytes that does not split a UTF-8 sequence.
std::size_t utf8_safe_prefix(std::string_view s, std::size_t max_bytes);

}  // namespace causaforge::text
