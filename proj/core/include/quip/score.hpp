#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quip/sketch.hpp"

namespace quip {

/// Half-open run [begin, end) of quoted characters, counted in scalar values
/// over the normalized text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const Span&) const = default;
};

/// Per-text outcome: how many windows the text has, how many the sketch
/// recognizes, and where the quoted runs sit.
struct QuipResult {
    std::uint64_t total_grams = 0;
    std::uint64_t hit_grams = 0;
    /// hit_grams / total_grams; absent when the text is shorter than one window.
    std::optional<double> score;
    /// One flag per stride-1 window, in offset order.
    std::vector<bool> hit_mask;
    std::vector<Span> spans;
};

/// Scores `text` against the sketch: the fraction of its character n-gram
/// windows found in the indexed corpus. Normalization and width come from the
/// sketch header; the scan stride is always 1 so a strided sketch yields a
/// lower bound rather than a sampling artifact.
QuipResult quip_score(std::string_view text, const BloomSketch& sketch);

/// Maximal runs of characters covered by at least one matching window.
/// `scalar_len` is the normalized text length in scalar values; `hit_mask`
/// must come from a stride-1 scan of that text.
std::vector<Span> quoted_spans(const std::vector<bool>& hit_mask, std::size_t scalar_len,
                               std::uint16_t width);

/// Convenience overload matching quip_score's view of the text.
std::vector<Span> quoted_spans(std::string_view text, const std::vector<bool>& hit_mask,
                               const NgramConfig& config);

struct AggregateQuip {
    double macro = 0.0;  // mean of per-text scores
    double micro = 0.0;  // summed hits over summed windows
    std::uint64_t scored_texts = 0;
    std::uint64_t skipped_texts = 0;
};

/// Macro/micro averages over a batch. Texts too short to score are skipped
/// (and counted) by default, or scored as 0 with skip_short = false.
/// Throws EvalError when nothing is scorable.
AggregateQuip aggregate(const std::vector<QuipResult>& results, bool skip_short = true);

/// Rewrites `normalized_text` with open/close markers around each span.
/// Span offsets are scalar positions, so multi-byte characters stay intact.
std::string annotate_spans(std::string_view normalized_text, const std::vector<Span>& spans,
                           std::string_view open, std::string_view close);

}  // namespace quip
