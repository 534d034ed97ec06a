#include "causaforge/text.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "causaforge/errors.hpp"

namespace causaforge::text {

namespace {

const icu::Normalizer2& nfc_instance() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || norm == nullptr) throw Error("icu_failure", "NFC normalizer unavailable");
    return *norm;
}

std::string to_utf8(const icu::UnicodeString& u) {
    std::string out;
    u.toUTF8String(out);
    return out;
}

icu::UnicodeString from_utf8(std::string_view s) {
    return icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) != 0; }

}  // namespace

std::string nfc(std::string_view s) {
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString out = nfc_instance().normalize(from_utf8(s), status);
    if (U_FAILURE(status)) throw Error("icu_failure", "NFC normalization failed");
    return to_utf8(out);
}

std::string to_lower(std::string_view s) {
    icu::UnicodeString u = from_utf8(s);
    u.toLower(icu::Locale::getRoot());
    return to_utf8(u);
}

std::string normalize_concept(std::string_view s) {
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString u = nfc_instance().normalize(from_utf8(s), status);
    if (U_FAILURE(status)) throw Error("icu_failure", "NFC normalization failed");
    u.toLower(icu::Locale::getRoot());

    // Collapse whitespace while walking code points.
    icu::UnicodeString collapsed;
    bool pending_space = false;
    for (int32_t i = 0; i < u.length();) {
        const UChar32 c = u.char32At(i);
        i += U16_LENGTH(c);
        if (is_space(c)) {
            pending_space = !collapsed.isEmpty();
            continue;
        }
        if (pending_space) collapsed.append(static_cast<UChar>(0x20));
        pending_space = false;
        collapsed.append(c);
    }

    // Strip punctuation and whitespace from both ends until stable.
    int32_t begin = 0;
    int32_t end = collapsed.length();
    while (begin < end) {
        const UChar32 c = collapsed.char32At(begin);
        if (!u_ispunct(c) && !is_space(c)) break;
        begin += U16_LENGTH(c);
    }
    while (end > begin) {
        const UChar32 c = collapsed.char32At(end - 1);
        if (!u_ispunct(c) && !is_space(c)) break;
        end -= U16_LENGTH(c);
    }
    icu::UnicodeString trimmed(collapsed, begin, end - begin);
    // Lowercasing can change composition (e.g. final sigma contexts); re-apply NFC.
    icu::UnicodeString result = nfc_instance().normalize(trimmed, status);
    if (U_FAILURE(status)) throw Error("icu_failure", "NFC normalization failed");
    return to_utf8(result);
}

std::string trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && ws(s[b])) ++b;
    while (e > b && ws(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return true;
    return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::size_t utf8_safe_prefix(std::string_view s, std::size_t max_bytes) {
    if (max_bytes >= s.size()) return s.size();
    std::size_t n = max_bytes;
    // Back off while the byte at the cut is a continuation byte.
    while (n > 0 && (static_cast<unsigned char>(s[n]) & 0xC0) == 0x80) --n;
    return n;
}

}  // namespace causaforge::text
