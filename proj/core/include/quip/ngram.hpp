#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quip/errors.hpp"
#include "quip/unicode.hpp"

namespace quip {

/// Text normalization applied before windows are cut. The numeric values are
/// the codes written into sketch headers; do not reorder.
enum class Normalization : std::uint8_t {
    none = 0,
    lowercase = 1,
    collapse_whitespace = 2,
    lowercase_collapse = 3,
};

std::string_view to_string(Normalization n);
Normalization normalization_from_string(std::string_view name);

/// What counts as one n-gram. A "character" is a Unicode scalar value
/// throughout: widths and offsets never split a multi-byte sequence.
struct NgramConfig {
    std::uint16_t width = 25;
    std::uint16_t stride = 1;
    Normalization normalization = Normalization::none;

    /// Throws InvalidArgument unless width >= 2, stride >= 1, stride <= width.
    void validate() const;

    /// Stable across platforms and releases; equal fields give equal values.
    /// Sketches record this so grams from a different config are rejected.
    std::uint64_t fingerprint() const;

    bool operator==(const NgramConfig&) const = default;
};

/// One extracted window: the normalized text slice plus its start position,
/// counted in scalar values from the beginning of the normalized text.
struct Gram {
    std::string text;
    std::size_t char_offset = 0;
};

/// Applies the config's normalization policy. `none` is the identity.
std::string normalize(std::string_view text, const NgramConfig& config);

/// Number of windows a text of `scalar_len` characters yields.
std::size_t gram_count(std::size_t scalar_len, std::uint16_t width, std::uint16_t stride);

/// Walks every window of the *already normalized* text without copying.
/// fn(std::string_view window_bytes, std::size_t char_offset).
template <typename Fn>
void for_each_gram(std::string_view normalized, std::uint16_t width, std::uint16_t stride, Fn&& fn) {
    const std::vector<std::size_t> starts = unicode::scalar_starts(normalized);
    const std::size_t len = starts.size() - 1;
    if (len < width) return;
    for (std::size_t i = 0; i + width <= len; i += stride) {
        fn(normalized.substr(starts[i], starts[i + width] - starts[i]), i);
    }
}

/// Normalizes `text`, then materializes every window. Indexing uses the
/// config's stride; scoring passes stride_override = 1 so every candidate
/// window is checked regardless of how the sketch was built.
std::vector<Gram> extract_grams(std::string_view text, const NgramConfig& config,
                                std::optional<std::uint16_t> stride_override = std::nullopt);

}  // namespace quip
