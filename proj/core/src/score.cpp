#include "quip/score.hpp"

namespace quip {

QuipResult quip_score(std::string_view text, const BloomSketch& sketch) {
    const NgramConfig& config = sketch.ngram();
    const std::string normalized = normalize(text, config);

    QuipResult result;
    for_each_gram(normalized, config.width, /*stride=*/1,
                  [&](std::string_view window, std::size_t) {
                      result.hit_mask.push_back(sketch.contains(window));
                  });
    result.total_grams = result.hit_mask.size();
    for (bool hit : result.hit_mask) result.hit_grams += hit ? 1 : 0;
    if (result.total_grams > 0) {
        result.score = static_cast<double>(result.hit_grams) /
                       static_cast<double>(result.total_grams);
    }
    result.spans = quoted_spans(result.hit_mask, unicode::scalar_length(normalized), config.width);
    return result;
}

std::vector<Span> quoted_spans(const std::vector<bool>& hit_mask, std::size_t scalar_len,
                               std::uint16_t width) {
    std::vector<Span> spans;
    if (hit_mask.empty()) return spans;

    // A position is quoted iff some hit window covers it. Hit windows start at
    // their mask index and span `width` characters, so walking hits in order
    // and fusing overlapping or touching covers yields the maximal runs.
    std::size_t run_begin = 0, run_end = 0;
    bool open = false;
    for (std::size_t i = 0; i < hit_mask.size(); ++i) {
        if (!hit_mask[i]) continue;
        const std::size_t cover_end = std::min(i + width, scalar_len);
        if (open && i <= run_end) {
            run_end = std::max(run_end, cover_end);
        } else {
            if (open) spans.push_back({run_begin, run_end});
            run_begin = i;
            run_end = cover_end;
            open = true;
        }
    }
    if (open) spans.push_back({run_begin, run_end});
    return spans;
}

std::vector<Span> quoted_spans(std::string_view text, const std::vector<bool>& hit_mask,
                               const NgramConfig& config) {
    const std::string normalized = normalize(text, config);
    return quoted_spans(hit_mask, unicode::scalar_length(normalized), config.width);
}

AggregateQuip aggregate(const std::vector<QuipResult>& results, bool skip_short) {
    AggregateQuip agg;
    double score_sum = 0.0;
    std::uint64_t hits = 0, totals = 0;
    for (const QuipResult& r : results) {
        hits += r.hit_grams;
        totals += r.total_grams;
        if (r.score.has_value()) {
            score_sum += *r.score;
            ++agg.scored_texts;
        } else if (skip_short) {
            ++agg.skipped_texts;
        } else {
            // Short text counted as zero quoting.
            ++agg.scored_texts;
        }
    }
    if (agg.scored_texts == 0) {
        throw EvalError("no scorable text: every input is shorter than one n-gram window");
    }
    agg.macro = score_sum / static_cast<double>(agg.scored_texts);
    agg.micro = totals > 0 ? static_cast<double>(hits) / static_cast<double>(totals) : 0.0;
    return agg;
}

std::string annotate_spans(std::string_view normalized_text, const std::vector<Span>& spans,
                           std::string_view open, std::string_view close) {
    const std::vector<std::size_t> starts = unicode::scalar_starts(normalized_text);
    const std::size_t len = starts.size() - 1;
    std::string out;
    out.reserve(normalized_text.size() + spans.size() * (open.size() + close.size()));
    std::size_t cursor = 0;  // byte cursor
    for (const Span& span : spans) {
        const std::size_t b = starts[std::min(span.begin, len)];
        const std::size_t e = starts[std::min(span.end, len)];
        out.append(normalized_text.substr(cursor, b - cursor));
        out.append(open);
        out.append(normalized_text.substr(b, e - b));
        out.append(close);
        cursor = e;
    }
    out.append(normalized_text.substr(cursor));
    return out;
}

}  // namespace quip
