#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quip/score.hpp"
#include "quip/sketch.hpp"

namespace quip {

// -- prompt catalog -----------------------------------------------------------

enum class PromptCategory { null, grounding, anti_grounding };

std::string_view to_string(PromptCategory c);
PromptCategory prompt_category_from_string(std::string_view name);

/// One instruction appended after the question. The empty-text null prompt is
/// the baseline row of every report.
struct PromptSpec {
    std::string id;
    std::string text;
    PromptCategory category = PromptCategory::grounding;
};

class PromptCatalog {
public:
    /// The stock catalog: one null prompt, eight grounding prompts targeting
    /// Wikipedia, three anti-grounding prompts.
    static PromptCatalog builtin();

    /// JSON array of {"id", "text", "category"} objects.
    static PromptCatalog from_json_file(const std::filesystem::path& path);
    static PromptCatalog from_json(std::string_view json_text);
    std::string to_json_string() const;

    /// Throws InvalidArgument on duplicate ids or unless exactly one prompt
    /// has the null category.
    explicit PromptCatalog(std::vector<PromptSpec> prompts);

    const std::vector<PromptSpec>& prompts() const { return prompts_; }
    bool has(std::string_view id) const;
    /// Throws EvalError for an unknown id.
    const PromptSpec& get(std::string_view id) const;
    const PromptSpec& null_prompt() const;

private:
    std::vector<PromptSpec> prompts_;
    std::size_t null_index_ = 0;
};

// -- prompt rendering ---------------------------------------------------------

enum class RenderMode {
    long_form,          // question, newline, prompt
    short_form_single,  // answer-plus-explanation preamble, question, prompt
    two_step_answer,    // step 1: bare answer; the prompt is not inserted here
    two_step_explain,   // step 2: explanation request carrying the prompt
};

std::string_view to_string(RenderMode m);
RenderMode render_mode_from_string(std::string_view name);

/// Instruction block asking for "answer; explanation" output, used by the
/// short-form-single mode.
extern const std::string_view kShortFormPreamble;

/// Throws EvalError when mode is two_step_explain and prior_answer is absent.
std::string render_prompt(std::string_view question, const PromptSpec& prompt, RenderMode mode,
                          std::optional<std::string_view> prior_answer = std::nullopt);

struct ShortFormParse {
    std::string answer;
    std::string explanation;
    /// Output had no semicolon; the whole text was taken as the answer.
    bool missing_semicolon = false;
};

/// Splits "answer; explanation" on the first semicolon, trimming both parts.
ShortFormParse parse_short_form(std::string_view output);

// -- task metrics -------------------------------------------------------------

/// Lowercase, strip ASCII punctuation, drop the articles a/an/the, collapse
/// whitespace — the usual short-answer normalization.
std::string answer_normalize(std::string_view text);

/// 1 iff the normalized prediction equals any normalized gold.
int exact_match(std::string_view prediction, const std::vector<std::string>& golds);

/// Bag-of-token overlap F1, maximized over golds.
double token_f1(std::string_view prediction, const std::vector<std::string>& golds);

/// F-measure over the longest common token subsequence, maximized over
/// references.
double rouge_l(std::string_view prediction, const std::vector<std::string>& references);

// -- run evaluation -----------------------------------------------------------

enum class Dataset { nq, tqa, hotpot, eli5, other };

std::string_view to_string(Dataset d);
Dataset dataset_from_string(std::string_view name);

/// True for datasets whose whole output is scored for quoting; short-form
/// datasets score the explanation part instead.
bool is_long_form(Dataset d);
std::string_view task_metric_name(Dataset d);

struct GenerationRecord {
    std::string id;
    Dataset dataset = Dataset::other;
    std::string prompt_id;
    std::string question;
    std::string output;
    /// Present for two-step runs, where `output` holds only the explanation.
    std::optional<std::string> answer;
    std::vector<std::string> golds;
    std::optional<std::uint64_t> cooccurrence_count;
};

struct GenerationFile {
    std::vector<GenerationRecord> records;
    std::uint64_t skipped_lines = 0;
};

/// JSONL, one record per line. Strict mode aborts on the first malformed
/// line; lenient mode skips and counts.
GenerationFile read_generations(const std::filesystem::path& path, bool lenient = false);
GenerationFile read_generations(std::istream& in, bool lenient = false,
                                std::string name = "<stream>");

/// The part of a record's output whose quoting is measured: the whole output
/// for long-form datasets, the explanation for short-form ones.
std::string quip_target_text(const GenerationRecord& record);

/// The part graded by the task metric: the whole output for long-form
/// datasets, the short answer otherwise.
std::string answer_target_text(const GenerationRecord& record);

enum class Direction { gain, loss, same };
std::string_view to_string(Direction d);

struct ReportRow {
    std::string prompt_id;
    PromptCategory category = PromptCategory::grounding;
    std::uint64_t n = 0;
    std::uint64_t skipped_short = 0;  // texts below one window, excluded from macro
    double quip_macro = 0.0;
    double quip_micro = 0.0;
    std::string task_metric_name;
    double task_metric_value = 0.0;
    double delta_quip_vs_null = 0.0;
    double delta_task_vs_null = 0.0;
    Direction quip_direction = Direction::same;
    Direction task_direction = Direction::same;
};

struct ScoreReport {
    std::vector<ReportRow> rows;  // null row first, then catalog order
    std::string corpus_label;
    /// Sketch was built with stride > 1, so QUIP values are lower bounds.
    bool strided_lower_bound = false;

    std::string to_json_string() const;
    /// Aligned columns, one row per prompt. Ratios print with 4 decimals and
    /// the same rounding as the JSON form.
    std::string to_table_string() const;
};

/// Scores every record against the sketch, groups by prompt, and compares
/// each row against the null-prompt baseline.
ScoreReport evaluate_run(const std::vector<GenerationRecord>& records, const BloomSketch& sketch,
                         const PromptCatalog& catalog);

// -- popularity binning -------------------------------------------------------

/// Scores for one question under the grounding prompt and under the null
/// prompt, paired with how often the question's entities co-occur in the
/// pre-training corpus (counts are supplied by the caller).
struct ScorePair {
    QuipResult grounding;
    QuipResult null_prompt;
};

struct SeriesStat {
    double mean = 0.0;
    double std_error = 0.0;  // sample stddev / sqrt(n); 0 when undefined
    std::uint64_t n = 0;
    bool std_error_defined = false;  // false when n < 2
};

struct PopularityBin {
    std::uint64_t lower = 0;                 // inclusive
    std::optional<std::uint64_t> upper;      // exclusive; absent for the top bin
    SeriesStat grounding;
    SeriesStat null_prompt;
};

/// Default edges: powers of ten, giving bins [0,1), [1,10), ... [1e6, inf).
extern const std::vector<std::uint64_t> kDefaultBinEdges;

/// Assigns each pair to the half-open bin containing its count and reports
/// per-bin mean and standard error for both series. Bins cover [0, inf):
/// an underflow bin below the first edge and an unbounded bin above the last.
/// Throws EvalError unless bin_edges is strictly increasing.
std::vector<PopularityBin> popularity_bins(
    const std::vector<std::pair<ScorePair, std::uint64_t>>& records,
    const std::vector<std::uint64_t>& bin_edges = kDefaultBinEdges);

}  // namespace quip
