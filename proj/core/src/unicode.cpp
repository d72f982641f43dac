#include "quip/unicode.hpp"

#include <algorithm>
#include <array>

namespace quip::unicode {

namespace {

struct LowercasePair {
    char32_t upper;
    char32_t lower;
};

#include "lowercase_table.inc"

constexpr char32_t kReplacement = 0xFFFD;

// Trailing bytes must be 10xxxxxx.
inline bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

}  // namespace

char32_t decode_scalar(std::string_view text, std::size_t& pos) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
    const std::size_t n = text.size();
    const unsigned char b0 = bytes[pos];

    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    if ((b0 & 0xE0) == 0xC0) {
        if (pos + 1 < n && is_continuation(bytes[pos + 1])) {
            char32_t cp = (char32_t(b0 & 0x1F) << 6) | (bytes[pos + 1] & 0x3F);
            if (cp >= 0x80) {  // reject overlong
                pos += 2;
                return cp;
            }
        }
    } else if ((b0 & 0xF0) == 0xE0) {
        if (pos + 2 < n && is_continuation(bytes[pos + 1]) && is_continuation(bytes[pos + 2])) {
            char32_t cp = (char32_t(b0 & 0x0F) << 12) | (char32_t(bytes[pos + 1] & 0x3F) << 6) |
                          (bytes[pos + 2] & 0x3F);
            if (cp >= 0x800 && !(cp >= 0xD800 && cp <= 0xDFFF)) {
                pos += 3;
                return cp;
            }
        }
    } else if ((b0 & 0xF8) == 0xF0) {
        if (pos + 3 < n && is_continuation(bytes[pos + 1]) && is_continuation(bytes[pos + 2]) &&
            is_continuation(bytes[pos + 3])) {
            char32_t cp = (char32_t(b0 & 0x07) << 18) | (char32_t(bytes[pos + 1] & 0x3F) << 12) |
                          (char32_t(bytes[pos + 2] & 0x3F) << 6) | (bytes[pos + 3] & 0x3F);
            if (cp >= 0x10000 && cp <= 0x10FFFF) {
                pos += 4;
                return cp;
            }
        }
    }
    // Ill-formed: consume the single byte.
    ++pos;
    return kReplacement;
}

std::size_t scalar_length(std::string_view text) {
    std::size_t pos = 0, count = 0;
    while (pos < text.size()) {
        decode_scalar(text, pos);
        ++count;
    }
    return count;
}

std::vector<std::size_t> scalar_starts(std::string_view text) {
    std::vector<std::size_t> starts;
    starts.reserve(text.size() + 1);
    std::size_t pos = 0;
    while (pos < text.size()) {
        starts.push_back(pos);
        decode_scalar(text, pos);
    }
    starts.push_back(text.size());
    return starts;
}

char32_t simple_lowercase(char32_t cp) {
    if (cp < 0x41) return cp;
    if (cp <= 0x5A) return cp + 0x20;  // ASCII fast path
    auto it = std::lower_bound(std::begin(kLowercaseTable), std::end(kLowercaseTable), cp,
                               [](const LowercasePair& p, char32_t c) { return p.upper < c; });
    if (it != std::end(kLowercaseTable) && it->upper == cp) return it->lower;
    return cp;
}

bool is_whitespace(char32_t cp) {
    switch (cp) {
        case 0x09:
        case 0x0A:
        case 0x0B:
        case 0x0C:
        case 0x0D:
        case 0x20:
        case 0x85:
        case 0xA0:
        case 0x1680:
        case 0x2028:
        case 0x2029:
        case 0x202F:
        case 0x205F:
        case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string lowercase(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t before = pos;
        const char32_t cp = decode_scalar(text, pos);
        const char32_t low = simple_lowercase(cp);
        if (low == cp) {
            // Also keeps ill-formed bytes untouched (U+FFFD never maps).
            out.append(text.substr(before, pos - before));
        } else {
            append_utf8(out, low);
        }
    }
    return out;
}

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    bool seen_content = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t before = pos;
        const char32_t cp = decode_scalar(text, pos);
        if (is_whitespace(cp)) {
            pending_space = seen_content;
        } else {
            if (pending_space) {
                out.push_back(' ');
                pending_space = false;
            }
            out.append(text.substr(before, pos - before));
            seen_content = true;
        }
    }
    return out;
}

}  // namespace quip::unicode
