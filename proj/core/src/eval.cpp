#include "quip/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "quip/unicode.hpp"

namespace quip {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view text) {
    std::size_t begin = 0;
    std::size_t end = text.size();
    while (begin < end) {
        std::size_t pos = begin;
        if (!unicode::is_whitespace(unicode::decode_scalar(text, pos))) break;
        begin = pos;
    }
    // Walk forward remembering the end of the last non-whitespace scalar.
    std::size_t last_content_end = begin;
    std::size_t pos = begin;
    while (pos < end) {
        const char32_t cp = unicode::decode_scalar(text, pos);
        if (!unicode::is_whitespace(cp)) last_content_end = pos;
    }
    return text.substr(begin, last_content_end - begin);
}

std::vector<std::string> split_whitespace(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t before = pos;
        const char32_t cp = unicode::decode_scalar(text, pos);
        if (unicode::is_whitespace(cp)) {
            if (!current.empty()) {
                tokens.push_back(std::move(current));
                current.clear();
            }
        } else {
            current.append(text.substr(before, pos - before));
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

bool is_ascii_punct(char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
           (c >= '{' && c <= '~');
}

// EM strips the articles a/an/the after lowercasing and punctuation removal;
// F1 keeps every token so overlap counts stay literal.
std::vector<std::string> answer_tokens(std::string_view text, bool strip_articles) {
    std::string lowered = unicode::lowercase(text);
    std::string no_punct;
    no_punct.reserve(lowered.size());
    for (char c : lowered) {
        if (!is_ascii_punct(c)) no_punct.push_back(c);
    }
    std::vector<std::string> tokens = split_whitespace(no_punct);
    if (strip_articles) {
        std::erase_if(tokens,
                      [](const std::string& t) { return t == "a" || t == "an" || t == "the"; });
    }
    return tokens;
}

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

/// Lowercased tokens split on ASCII non-alphanumerics; articles stay.
std::vector<std::string> rouge_tokens(std::string_view text) {
    std::string lowered = unicode::lowercase(text);
    for (char& c : lowered) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x80 && !(std::isalnum(u))) c = ' ';
    }
    return split_whitespace(lowered);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

double f_measure(double overlap, std::size_t pred_len, std::size_t gold_len) {
    if (pred_len == 0 && gold_len == 0) return 1.0;
    if (pred_len == 0 || gold_len == 0) return 0.0;
    const double p = overlap / static_cast<double>(pred_len);
    const double r = overlap / static_cast<double>(gold_len);
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

double round4(double x) { return std::round(x * 10000.0) / 10000.0; }
double round2(double x) { return std::round(x * 100.0) / 100.0; }

std::string fixed4(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

std::string fixed2(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string signed4(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.4f", x);
    return buf;
}

Direction direction_of(double delta) {
    if (delta > 0.0) return Direction::gain;
    if (delta < 0.0) return Direction::loss;
    return Direction::same;
}

PromptSpec parse_prompt_json(const json& obj) {
    if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
        !obj.contains("text") || !obj["text"].is_string() || !obj.contains("category") ||
        !obj["category"].is_string()) {
        throw InvalidArgument("catalog entries need string fields id, text, category");
    }
    PromptSpec p;
    p.id = obj["id"].get<std::string>();
    p.text = obj["text"].get<std::string>();
    p.category = prompt_category_from_string(obj["category"].get<std::string>());
    return p;
}

}  // namespace

// -- prompt catalog -----------------------------------------------------------

std::string_view to_string(PromptCategory c) {
    switch (c) {
        case PromptCategory::null: return "null";
        case PromptCategory::grounding: return "grounding";
        case PromptCategory::anti_grounding: return "anti-grounding";
    }
    return "grounding";
}

PromptCategory prompt_category_from_string(std::string_view name) {
    if (name == "null") return PromptCategory::null;
    if (name == "grounding") return PromptCategory::grounding;
    if (name == "anti-grounding") return PromptCategory::anti_grounding;
    throw InvalidArgument("unknown prompt category: " + std::string(name));
}

PromptCatalog::PromptCatalog(std::vector<PromptSpec> prompts) : prompts_(std::move(prompts)) {
    std::size_t nulls = 0;
    for (std::size_t i = 0; i < prompts_.size(); ++i) {
        for (std::size_t j = i + 1; j < prompts_.size(); ++j) {
            if (prompts_[i].id == prompts_[j].id) {
                throw InvalidArgument("duplicate prompt id: " + prompts_[i].id);
            }
        }
        if (prompts_[i].category == PromptCategory::null) {
            null_index_ = i;
            ++nulls;
        }
    }
    if (nulls != 1) {
        throw InvalidArgument("catalog must contain exactly one null prompt, found " +
                              std::to_string(nulls));
    }
}

PromptCatalog PromptCatalog::builtin() {
    std::vector<PromptSpec> prompts{
        {"null", "", PromptCategory::null},
        {"based-on-evidence", "Based on evidence from Wikipedia:", PromptCategory::grounding},
        {"expert-editor",
         "As an expert editor for Wikipedia, I am confident in the following answer.",
         PromptCategory::grounding},
        {"direct-quote", "I found some results for that on Wikipedia. Here's a direct quote:",
         PromptCategory::grounding},
        {"reference-wikipedia", "Reference Wikipedia when answering the following question.",
         PromptCategory::grounding},
        {"according-to", "Answer according to Wikipedia.", PromptCategory::grounding},
        {"find-quotes",
         "Go to https://www.wikipedia.org and find direct quotes to answer the question.  "
         "Response: \"",
         PromptCategory::grounding},
        {"use-wikipedia", "Respond by using information from Wikipedia in your response.",
         PromptCategory::grounding},
        {"attributed",
         "Respond to this question using only information that can be attributed to Wikipedia.",
         PromptCategory::grounding},
        {"use-reddit", "Respond by using information from Reddit in your response.",
         PromptCategory::anti_grounding},
        {"use-github", "Respond by using information from Github in your response.",
         PromptCategory::anti_grounding},
        {"no-wikipedia", "Respond without using any information from Wikipedia in your response.",
         PromptCategory::anti_grounding},
    };
    return PromptCatalog(std::move(prompts));
}

PromptCatalog PromptCatalog::from_json(std::string_view json_text) {
    json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_array()) {
        throw InvalidArgument("prompt catalog must be a JSON array");
    }
    std::vector<PromptSpec> prompts;
    prompts.reserve(doc.size());
    for (const json& entry : doc) prompts.push_back(parse_prompt_json(entry));
    return PromptCatalog(std::move(prompts));
}

PromptCatalog PromptCatalog::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

std::string PromptCatalog::to_json_string() const {
    json arr = json::array();
    for (const PromptSpec& p : prompts_) {
        arr.push_back({{"id", p.id}, {"text", p.text}, {"category", std::string(to_string(p.category))}});
    }
    return arr.dump(2);
}

bool PromptCatalog::has(std::string_view id) const {
    return std::any_of(prompts_.begin(), prompts_.end(),
                       [&](const PromptSpec& p) { return p.id == id; });
}

const PromptSpec& PromptCatalog::get(std::string_view id) const {
    for (const PromptSpec& p : prompts_) {
        if (p.id == id) return p;
    }
    throw EvalError("unknown prompt id: " + std::string(id));
}

const PromptSpec& PromptCatalog::null_prompt() const { return prompts_[null_index_]; }

// -- prompt rendering ---------------------------------------------------------

const std::string_view kShortFormPreamble =
    "You are a highly intelligent & complex question-answer generative model. You take a "
    "question as an input and answer it by imitating the way a human gives short answers with "
    "a corresponding explanation. You answer should be short - only a few words.\n\nYour "
    "output format should be the answer, then a semicolon, then the explanation.\n";

std::string_view to_string(RenderMode m) {
    switch (m) {
        case RenderMode::long_form: return "long-form";
        case RenderMode::short_form_single: return "short-form-single";
        case RenderMode::two_step_answer: return "two-step-answer";
        case RenderMode::two_step_explain: return "two-step-explain";
    }
    return "long-form";
}

RenderMode render_mode_from_string(std::string_view name) {
    if (name == "long-form") return RenderMode::long_form;
    if (name == "short-form-single") return RenderMode::short_form_single;
    if (name == "two-step-answer") return RenderMode::two_step_answer;
    if (name == "two-step-explain") return RenderMode::two_step_explain;
    throw InvalidArgument("unknown render mode: " + std::string(name));
}

std::string render_prompt(std::string_view question, const PromptSpec& prompt, RenderMode mode,
                          std::optional<std::string_view> prior_answer) {
    std::string out;
    switch (mode) {
        case RenderMode::long_form:
            out = std::string(question);
            if (!prompt.text.empty()) {
                out.push_back('\n');
                out += prompt.text;
            }
            return out;
        case RenderMode::short_form_single:
            out = std::string(kShortFormPreamble);
            out += question;
            if (!prompt.text.empty()) {
                out.push_back('\n');
                out += prompt.text;
            }
            return out;
        case RenderMode::two_step_answer:
            // Step one is identical for every prompt; the instruction is not
            // inserted until the explanation step.
            out = "Output the answer only. ";
            out += question;
            out += "\nAnswer string only:";
            return out;
        case RenderMode::two_step_explain:
            if (!prior_answer.has_value()) {
                throw EvalError("two-step-explain requires the prior answer");
            }
            out = "Question: ";
            out += question;
            out += "\nAnswer: ";
            out += *prior_answer;
            out += "\n\n\nGive a detailed explanation for why this is true. ";
            out += prompt.text;
            out += "\nExplanation:";
            return out;
    }
    throw InvalidArgument("unknown render mode");
}

ShortFormParse parse_short_form(std::string_view output) {
    ShortFormParse parsed;
    const std::size_t semi = output.find(';');
    if (semi == std::string_view::npos) {
        parsed.answer = std::string(trim(output));
        parsed.missing_semicolon = true;
        return parsed;
    }
    parsed.answer = std::string(trim(output.substr(0, semi)));
    parsed.explanation = std::string(trim(output.substr(semi + 1)));
    return parsed;
}

// -- task metrics -------------------------------------------------------------

std::string answer_normalize(std::string_view text) {
    return join(answer_tokens(text, /*strip_articles=*/true));
}

int exact_match(std::string_view prediction, const std::vector<std::string>& golds) {
    if (golds.empty()) throw EvalError("exact_match needs at least one gold answer");
    const std::string pred = answer_normalize(prediction);
    for (const std::string& gold : golds) {
        if (pred == answer_normalize(gold)) return 1;
    }
    return 0;
}

double token_f1(std::string_view prediction, const std::vector<std::string>& golds) {
    if (golds.empty()) throw EvalError("token_f1 needs at least one gold answer");
    const std::vector<std::string> pred = answer_tokens(prediction, /*strip_articles=*/false);
    std::map<std::string, std::size_t> pred_counts;
    for (const auto& t : pred) ++pred_counts[t];

    double best = 0.0;
    for (const std::string& gold : golds) {
        const std::vector<std::string> gold_tokens =
            answer_tokens(gold, /*strip_articles=*/false);
        std::map<std::string, std::size_t> remaining = pred_counts;
        std::size_t overlap = 0;
        for (const auto& t : gold_tokens) {
            auto it = remaining.find(t);
            if (it != remaining.end() && it->second > 0) {
                --it->second;
                ++overlap;
            }
        }
        best = std::max(best, f_measure(static_cast<double>(overlap), pred.size(),
                                        gold_tokens.size()));
    }
    return best;
}

double rouge_l(std::string_view prediction, const std::vector<std::string>& references) {
    if (references.empty()) throw EvalError("rouge_l needs at least one reference");
    const std::vector<std::string> pred = rouge_tokens(prediction);
    double best = 0.0;
    for (const std::string& ref : references) {
        const std::vector<std::string> ref_tokens = rouge_tokens(ref);
        const std::size_t lcs = lcs_length(pred, ref_tokens);
        best = std::max(best, f_measure(static_cast<double>(lcs), pred.size(), ref_tokens.size()));
    }
    return best;
}

// -- run evaluation -----------------------------------------------------------

std::string_view to_string(Dataset d) {
    switch (d) {
        case Dataset::nq: return "nq";
        case Dataset::tqa: return "tqa";
        case Dataset::hotpot: return "hotpot";
        case Dataset::eli5: return "eli5";
        case Dataset::other: return "other";
    }
    return "other";
}

Dataset dataset_from_string(std::string_view name) {
    if (name == "nq") return Dataset::nq;
    if (name == "tqa") return Dataset::tqa;
    if (name == "hotpot") return Dataset::hotpot;
    if (name == "eli5") return Dataset::eli5;
    if (name == "other") return Dataset::other;
    throw InvalidArgument("unknown dataset: " + std::string(name));
}

bool is_long_form(Dataset d) { return d == Dataset::eli5 || d == Dataset::other; }

std::string_view task_metric_name(Dataset d) {
    switch (d) {
        case Dataset::nq:
        case Dataset::tqa: return "EM";
        case Dataset::hotpot: return "F1";
        case Dataset::eli5:
        case Dataset::other: return "Rouge-L";
    }
    return "Rouge-L";
}

GenerationFile read_generations(std::istream& in, bool lenient, std::string name) {
    GenerationFile out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        auto fail = [&](const std::string& why) -> bool {
            if (lenient) {
                ++out.skipped_lines;
                return true;
            }
            throw JsonlError(line_no, name + ":" + std::to_string(line_no) + ": " + why);
        };

        json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (obj.is_discarded() || !obj.is_object()) {
            if (fail("invalid JSON object")) continue;
        }
        if (!obj.contains("prompt_id") || !obj["prompt_id"].is_string()) {
            if (fail("missing \"prompt_id\"")) continue;
        }
        if (!obj.contains("output") || !obj["output"].is_string()) {
            if (fail("missing \"output\"")) continue;
        }

        GenerationRecord rec;
        rec.prompt_id = obj["prompt_id"].get<std::string>();
        rec.output = obj["output"].get<std::string>();
        if (obj.contains("id")) {
            const json& id = obj["id"];
            rec.id = id.is_string() ? id.get<std::string>() : id.dump();
        } else {
            rec.id = std::to_string(line_no);
        }
        if (obj.contains("dataset")) {
            if (!obj["dataset"].is_string()) {
                if (fail("\"dataset\" is not a string")) continue;
            }
            try {
                rec.dataset = dataset_from_string(obj["dataset"].get<std::string>());
            } catch (const InvalidArgument& e) {
                if (fail(e.what())) continue;
            }
        }
        if (obj.contains("question") && obj["question"].is_string()) {
            rec.question = obj["question"].get<std::string>();
        }
        if (obj.contains("answer") && obj["answer"].is_string()) {
            rec.answer = obj["answer"].get<std::string>();
        }
        if (obj.contains("golds")) {
            if (!obj["golds"].is_array()) {
                if (fail("\"golds\" is not an array")) continue;
            }
            bool bad = false;
            for (const json& g : obj["golds"]) {
                if (!g.is_string()) {
                    bad = true;
                    break;
                }
                rec.golds.push_back(g.get<std::string>());
            }
            if (bad) {
                if (fail("\"golds\" must contain only strings")) continue;
            }
        }
        if (obj.contains("cooccurrence_count")) {
            if (!obj["cooccurrence_count"].is_number_unsigned()) {
                if (fail("\"cooccurrence_count\" must be a non-negative integer")) continue;
            }
            rec.cooccurrence_count = obj["cooccurrence_count"].get<std::uint64_t>();
        }
        out.records.push_back(std::move(rec));
    }
    if (in.bad()) throw IoError("failed while reading " + name);
    return out;
}

GenerationFile read_generations(const std::filesystem::path& path, bool lenient) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_generations(in, lenient, path.string());
}

std::string quip_target_text(const GenerationRecord& record) {
    if (is_long_form(record.dataset)) return record.output;
    // Two-step runs carry the explanation in `output`; single-shot short-form
    // outputs are "answer; explanation".
    if (record.answer.has_value()) return record.output;
    return parse_short_form(record.output).explanation;
}

std::string answer_target_text(const GenerationRecord& record) {
    if (is_long_form(record.dataset)) return record.output;
    if (record.answer.has_value()) return *record.answer;
    return parse_short_form(record.output).answer;
}

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::gain: return "gain";
        case Direction::loss: return "loss";
        case Direction::same: return "same";
    }
    return "same";
}

ScoreReport evaluate_run(const std::vector<GenerationRecord>& records, const BloomSketch& sketch,
                         const PromptCatalog& catalog) {
    struct Group {
        std::vector<QuipResult> quip;
        double task_sum = 0.0;
        std::uint64_t n = 0;
        std::map<std::string, bool> metric_names;
    };
    std::map<std::string, Group> groups;

    for (const GenerationRecord& rec : records) {
        const PromptSpec& prompt = catalog.get(rec.prompt_id);  // throws on unknown id
        (void)prompt;
        if (rec.golds.empty()) {
            throw EvalError("record " + rec.id + " has no gold answers");
        }

        const std::string answer_text = answer_target_text(rec);
        const std::string quip_text = quip_target_text(rec);

        double metric = 0.0;
        switch (rec.dataset) {
            case Dataset::nq:
            case Dataset::tqa:
                metric = static_cast<double>(exact_match(answer_text, rec.golds));
                break;
            case Dataset::hotpot:
                metric = token_f1(answer_text, rec.golds);
                break;
            case Dataset::eli5:
            case Dataset::other:
                metric = rouge_l(answer_text, rec.golds);
                break;
        }

        Group& group = groups[rec.prompt_id];
        group.quip.push_back(quip_score(quip_text, sketch));
        group.task_sum += metric;
        group.metric_names[std::string(task_metric_name(rec.dataset))] = true;
        ++group.n;
    }

    const std::string& null_id = catalog.null_prompt().id;
    if (groups.find(null_id) == groups.end()) {
        throw EvalError("missing null-prompt row: no record uses prompt \"" + null_id + "\"");
    }

    ScoreReport report;
    report.corpus_label = sketch.corpus_label();
    report.strided_lower_bound = sketch.ngram().stride > 1;

    auto build_row = [&](const PromptSpec& prompt, Group& group) {
        ReportRow row;
        row.prompt_id = prompt.id;
        row.category = prompt.category;
        row.n = group.n;
        AggregateQuip agg;
        try {
            agg = aggregate(group.quip, /*skip_short=*/true);
        } catch (const EvalError& e) {
            throw EvalError("prompt \"" + prompt.id + "\": " + e.what());
        }
        row.skipped_short = agg.skipped_texts;
        row.quip_macro = agg.macro;
        row.quip_micro = agg.micro;
        row.task_metric_value = group.task_sum / static_cast<double>(group.n);
        row.task_metric_name = group.metric_names.size() == 1 ? group.metric_names.begin()->first
                                                              : std::string("mixed");
        return row;
    };

    ReportRow null_row = build_row(catalog.null_prompt(), groups.at(null_id));
    report.rows.push_back(null_row);
    for (const PromptSpec& prompt : catalog.prompts()) {
        if (prompt.id == null_id) continue;
        auto it = groups.find(prompt.id);
        if (it == groups.end()) continue;
        report.rows.push_back(build_row(prompt, it->second));
    }

    for (ReportRow& row : report.rows) {
        row.delta_quip_vs_null = row.quip_macro - null_row.quip_macro;
        row.delta_task_vs_null = row.task_metric_value - null_row.task_metric_value;
        row.quip_direction = direction_of(row.delta_quip_vs_null);
        row.task_direction = direction_of(row.delta_task_vs_null);
    }
    return report;
}

std::string ScoreReport::to_json_string() const {
    json doc;
    doc["corpus_label"] = corpus_label;
    doc["strided_lower_bound"] = strided_lower_bound;
    json rows_json = json::array();
    for (const ReportRow& row : rows) {
        rows_json.push_back({
            {"prompt_id", row.prompt_id},
            {"category", std::string(to_string(row.category))},
            {"n", row.n},
            {"skipped_short", row.skipped_short},
            {"quip_macro", round4(row.quip_macro)},
            {"quip_macro_x100", round2(row.quip_macro * 100.0)},
            {"quip_micro", round4(row.quip_micro)},
            {"quip_micro_x100", round2(row.quip_micro * 100.0)},
            {"task_metric", row.task_metric_name},
            {"task_metric_value", round4(row.task_metric_value)},
            {"delta_quip_vs_null", round4(row.delta_quip_vs_null)},
            {"delta_task_vs_null", round4(row.delta_task_vs_null)},
            {"quip_direction", std::string(to_string(row.quip_direction))},
            {"task_direction", std::string(to_string(row.task_direction))},
        });
    }
    doc["rows"] = std::move(rows_json);
    return doc.dump(2);
}

std::string ScoreReport::to_table_string() const {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"prompt", "category", "n", "quip_macro", "quip_x100", "quip_micro",
                     "d_quip", "dir", "metric", "value", "d_task", "dir"});
    for (const ReportRow& row : rows) {
        cells.push_back({
            row.prompt_id,
            std::string(to_string(row.category)),
            std::to_string(row.n),
            fixed4(round4(row.quip_macro)),
            fixed2(round2(row.quip_macro * 100.0)),
            fixed4(round4(row.quip_micro)),
            signed4(round4(row.delta_quip_vs_null)),
            std::string(to_string(row.quip_direction)),
            row.task_metric_name,
            fixed4(round4(row.task_metric_value)),
            signed4(round4(row.delta_task_vs_null)),
            std::string(to_string(row.task_direction)),
        });
    }

    std::vector<std::size_t> widths(cells[0].size(), 0);
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
    }
    std::ostringstream out;
    for (const auto& row : cells) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out << "  ";
            out << row[i];
            if (i + 1 < row.size()) out << std::string(widths[i] - row[i].size(), ' ');
        }
        out << '\n';
    }
    if (strided_lower_bound) {
        out << "note: sketch was indexed with stride > 1; QUIP values are lower bounds\n";
    }
    return out.str();
}

// -- popularity binning -------------------------------------------------------

const std::vector<std::uint64_t> kDefaultBinEdges = {1,      10,      100,    1000,
                                                     10000,  100000,  1000000};

std::vector<PopularityBin> popularity_bins(
    const std::vector<std::pair<ScorePair, std::uint64_t>>& records,
    const std::vector<std::uint64_t>& bin_edges) {
    for (std::size_t i = 1; i < bin_edges.size(); ++i) {
        if (bin_edges[i] <= bin_edges[i - 1]) {
            throw EvalError("bin edges must be strictly increasing");
        }
    }

    const std::size_t bin_count = bin_edges.size() + 1;
    std::vector<PopularityBin> bins(bin_count);
    std::vector<std::vector<double>> grounding_scores(bin_count);
    std::vector<std::vector<double>> null_scores(bin_count);

    for (std::size_t b = 0; b < bin_count; ++b) {
        bins[b].lower = b == 0 ? 0 : bin_edges[b - 1];
        if (b < bin_edges.size()) bins[b].upper = bin_edges[b];
    }

    for (const auto& [pair, count] : records) {
        const std::size_t b =
            std::upper_bound(bin_edges.begin(), bin_edges.end(), count) - bin_edges.begin();
        if (pair.grounding.score.has_value()) grounding_scores[b].push_back(*pair.grounding.score);
        if (pair.null_prompt.score.has_value()) null_scores[b].push_back(*pair.null_prompt.score);
    }

    auto summarize = [](const std::vector<double>& xs) {
        SeriesStat stat;
        stat.n = xs.size();
        if (xs.empty()) return stat;
        double sum = 0.0;
        for (double x : xs) sum += x;
        stat.mean = sum / static_cast<double>(xs.size());
        if (xs.size() < 2) return stat;  // std_error stays 0, flagged undefined
        double ss = 0.0;
        for (double x : xs) ss += (x - stat.mean) * (x - stat.mean);
        const double stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
        stat.std_error = stddev / std::sqrt(static_cast<double>(xs.size()));
        stat.std_error_defined = true;
        return stat;
    };

    for (std::size_t b = 0; b < bin_count; ++b) {
        bins[b].grounding = summarize(grounding_scores[b]);
        bins[b].null_prompt = summarize(null_scores[b]);
    }
    return bins;
}

}  // namespace quip
