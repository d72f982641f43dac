// quip: build corpus membership sketches, score texts against them, and
// evaluate generation runs. See README.md for the file formats.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quip/eval.hpp"
#include "quip/ingest.hpp"
#include "quip/score.hpp"
#include "quip/sketch.hpp"
#include "service.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

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

quip::NgramConfig ngram_from_flags(unsigned width, unsigned stride, const std::string& normalize) {
    quip::NgramConfig config;
    config.width = static_cast<std::uint16_t>(width);
    config.stride = static_cast<std::uint16_t>(stride);
    config.normalization = quip::normalization_from_string(normalize);
    config.validate();
    return config;
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

struct BuildOpts {
    std::string corpus;
    std::string format = "jsonl";
    std::string text_field = "text";
    std::string id_field = "id";
    bool lenient = false;
    std::string out;
    std::uint64_t expected_items = 0;
    double target_fpr = quip::kDefaultTargetFpr;
    unsigned width = 25;
    unsigned stride = 1;
    std::string normalize = "none";
    unsigned shards = 1;
    std::uint64_t seed = quip::kDefaultSketchSeed;
    std::string label;
};

void run_build(const BuildOpts& o) {
    const quip::NgramConfig config = ngram_from_flags(o.width, o.stride, o.normalize);
    const quip::SketchPlan plan = quip::plan_sketch(o.expected_items, o.target_fpr);

    quip::ReaderOptions reader_options;
    reader_options.text_field = o.text_field;
    reader_options.id_field = o.id_field;
    reader_options.lenient = o.lenient;
    auto reader = quip::open_corpus(o.corpus, quip::corpus_format_from_string(o.format),
                                    reader_options);

    quip::BuildOptions build_options;
    build_options.shards = o.shards;
    build_options.seed = o.seed;
    build_options.corpus_label = o.label;
    auto [sketch, stats] = quip::build_sketch(*reader, plan, config, build_options);
    quip::save_sketch(sketch, std::filesystem::path(o.out));

    std::cout << "sketch:          " << o.out << "\n"
              << "bits (m):        " << sketch.bit_count() << "\n"
              << "hashes (k):      " << sketch.num_hashes() << "\n"
              << "documents:       " << stats.documents << "\n"
              << "grams inserted:  " << stats.grams_inserted << "\n"
              << "bytes read:      " << stats.bytes_read << "\n"
              << "skipped lines:   " << stats.skipped_documents << "\n"
              << "elapsed (s):     " << fixed4(stats.elapsed.count()) << "\n"
              << "fill fraction:   " << fixed4(stats.final_fill_fraction) << "\n"
              << "estimated fpr:   " << stats.estimated_fpr << "\n";
    if (stats.capacity_exceeded) {
        std::cout << "warning: inserted more than 2x the planned items; "
                     "false-positive rate is above target\n";
    }
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreOpts {
    std::string sketch;
    std::string input;
    std::string format = "text";  // text | lines | jsonl
    std::string text_field = "text";
    bool as_json = false;
    bool skip_short = true;
    bool count_short = false;
};

struct NamedText {
    std::string id;
    std::string text;
};

std::vector<NamedText> read_texts(const ScoreOpts& o) {
    std::vector<NamedText> texts;
    if (o.format == "text") {
        std::ifstream in(o.input, std::ios::binary);
        if (!in) throw quip::IoError("cannot open " + o.input);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        texts.push_back({std::filesystem::path(o.input).filename().string(), std::move(text)});
    } else if (o.format == "lines") {
        std::ifstream in(o.input, std::ios::binary);
        if (!in) throw quip::IoError("cannot open " + o.input);
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            texts.push_back({std::to_string(line_no), line});
        }
    } else if (o.format == "jsonl") {
        quip::ReaderOptions reader_options;
        reader_options.text_field = o.text_field;
        auto reader = quip::open_corpus(o.input, quip::CorpusFormat::jsonl, reader_options);
        while (auto doc = reader->next()) texts.push_back({doc->id, std::move(doc->text)});
    } else {
        throw quip::InvalidArgument("unknown score input format: " + o.format);
    }
    return texts;
}

void run_score(const ScoreOpts& o) {
    const quip::BloomSketch sketch = quip::load_sketch(std::filesystem::path(o.sketch));
    const std::vector<NamedText> texts = read_texts(o);
    if (texts.empty() || (texts.size() == 1 && texts[0].text.empty())) {
        throw quip::EvalError("empty input: nothing to score");
    }

    std::vector<quip::QuipResult> results;
    results.reserve(texts.size());
    for (const NamedText& t : texts) results.push_back(quip::quip_score(t.text, sketch));
    const quip::AggregateQuip agg = quip::aggregate(results, !o.count_short);

    if (o.as_json) {
        json doc;
        json items = json::array();
        for (std::size_t i = 0; i < texts.size(); ++i) {
            const quip::QuipResult& r = results[i];
            json item = {{"id", texts[i].id},
                         {"total_grams", r.total_grams},
                         {"hit_grams", r.hit_grams}};
            if (r.score.has_value()) {
                item["score"] = *r.score;
                item["score_x100"] = *r.score * 100.0;
            } else {
                item["score"] = nullptr;
                item["score_x100"] = nullptr;
            }
            json spans = json::array();
            for (const quip::Span& s : r.spans) spans.push_back(json::array({s.begin, s.end}));
            item["spans"] = std::move(spans);
            items.push_back(std::move(item));
        }
        doc["texts"] = std::move(items);
        doc["aggregate"] = {{"macro", agg.macro},
                            {"macro_x100", agg.macro * 100.0},
                            {"micro", agg.micro},
                            {"micro_x100", agg.micro * 100.0},
                            {"scored_texts", agg.scored_texts},
                            {"skipped_texts", agg.skipped_texts}};
        if (sketch.ngram().stride > 1) doc["strided_lower_bound"] = true;
        std::cout << doc.dump(2) << "\n";
        return;
    }

    for (std::size_t i = 0; i < texts.size(); ++i) {
        const quip::QuipResult& r = results[i];
        std::cout << texts[i].id << "\t";
        if (r.score.has_value()) {
            std::cout << fixed4(*r.score) << "\t(" << fixed2(*r.score * 100.0) << ")";
        } else {
            std::cout << "-\t(too short)";
        }
        std::cout << "\t" << r.hit_grams << "/" << r.total_grams << "\n";
    }
    std::cout << "macro " << fixed4(agg.macro) << " (" << fixed2(agg.macro * 100.0) << ")"
              << "  micro " << fixed4(agg.micro) << " (" << fixed2(agg.micro * 100.0) << ")"
              << "  scored " << agg.scored_texts << "  skipped " << agg.skipped_texts << "\n";
    if (sketch.ngram().stride > 1) {
        std::cout << "note: sketch was indexed with stride > 1; scores are lower bounds\n";
    }
}

// ---------------------------------------------------------------------------
// highlight
// ---------------------------------------------------------------------------

struct HighlightOpts {
    std::string sketch;
    std::string input;
    std::string text;
    bool as_json = false;
};

void run_highlight(const HighlightOpts& o) {
    const quip::BloomSketch sketch = quip::load_sketch(std::filesystem::path(o.sketch));
    std::string text = o.text;
    if (text.empty()) {
        if (o.input.empty()) {
            throw quip::InvalidArgument("highlight needs an input file or --text");
        }
        std::ifstream in(o.input, std::ios::binary);
        if (!in) throw quip::IoError("cannot open " + o.input);
        text.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    }

    const quip::QuipResult result = quip::quip_score(text, sketch);
    const std::string normalized = quip::normalize(text, sketch.ngram());

    if (o.as_json) {
        json doc;
        doc["normalized_text"] = normalized;
        json spans = json::array();
        for (const quip::Span& s : result.spans) spans.push_back(json::array({s.begin, s.end}));
        doc["spans"] = std::move(spans);
        doc["total_grams"] = result.total_grams;
        doc["hit_grams"] = result.hit_grams;
        if (result.score.has_value()) {
            doc["score"] = *result.score;
            doc["score_x100"] = *result.score * 100.0;
        } else {
            doc["score"] = nullptr;
            doc["score_x100"] = nullptr;
        }
        std::cout << doc.dump(2) << "\n";
        return;
    }
    std::cout << quip::annotate_spans(normalized, result.spans, "\x1b[35m", "\x1b[0m") << "\n";
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalOpts {
    std::string sketch;
    std::string generations;
    std::string catalog;
    bool lenient = false;
    std::string format = "table";  // table | json
    std::string out_prefix;
    bool dump_catalog = false;
    bool bins = false;
    std::string bins_prompt;
    std::vector<std::uint64_t> bin_edges;
};

json bins_to_json(const std::vector<quip::PopularityBin>& bins) {
    json arr = json::array();
    for (const quip::PopularityBin& bin : bins) {
        json item;
        item["lower"] = bin.lower;
        if (bin.upper.has_value()) {
            item["upper"] = *bin.upper;
        } else {
            item["upper"] = nullptr;
        }
        auto series = [](const quip::SeriesStat& s) {
            return json{{"mean", s.mean},
                        {"std_error", s.std_error},
                        {"n", s.n},
                        {"std_error_defined", s.std_error_defined}};
        };
        item["grounding"] = series(bin.grounding);
        item["null"] = series(bin.null_prompt);
        arr.push_back(std::move(item));
    }
    return arr;
}

std::string bins_to_table(const std::vector<quip::PopularityBin>& bins) {
    std::string out = "bin                 series     n  mean    std_err\n";
    for (const quip::PopularityBin& bin : bins) {
        std::string range = "[" + std::to_string(bin.lower) + ", " +
                            (bin.upper ? std::to_string(*bin.upper) : "inf") + ")";
        range.resize(20, ' ');
        auto line = [&](const char* name, const quip::SeriesStat& s) {
            out += range + name + "  " + std::to_string(s.n) + "  " + fixed4(s.mean) + "  " +
                   fixed4(s.std_error) + (s.std_error_defined ? "" : " (undefined)") + "\n";
        };
        line("grounding", bin.grounding);
        line("null     ", bin.null_prompt);
    }
    return out;
}

std::vector<quip::PopularityBin> compute_bins(const EvalOpts& o,
                                              const std::vector<quip::GenerationRecord>& records,
                                              const quip::BloomSketch& sketch,
                                              const quip::PromptCatalog& catalog) {
    std::string grounding_id = o.bins_prompt;
    if (grounding_id.empty()) {
        // If the run contains exactly one non-null prompt, compare that one.
        std::vector<std::string> seen;
        for (const auto& rec : records) {
            if (rec.prompt_id != catalog.null_prompt().id &&
                std::find(seen.begin(), seen.end(), rec.prompt_id) == seen.end()) {
                seen.push_back(rec.prompt_id);
            }
        }
        if (seen.size() != 1) {
            throw quip::InvalidArgument(
                "--bins needs --bins-prompt when the run has several non-null prompts");
        }
        grounding_id = seen[0];
    }

    struct Pair {
        const quip::GenerationRecord* grounding = nullptr;
        const quip::GenerationRecord* null_rec = nullptr;
    };
    std::map<std::string, Pair> by_question;
    for (const auto& rec : records) {
        if (rec.prompt_id == grounding_id) by_question[rec.id].grounding = &rec;
        if (rec.prompt_id == catalog.null_prompt().id) by_question[rec.id].null_rec = &rec;
    }

    std::vector<std::pair<quip::ScorePair, std::uint64_t>> pairs;
    for (const auto& [id, pair] : by_question) {
        if (pair.grounding == nullptr || pair.null_rec == nullptr) continue;
        std::optional<std::uint64_t> count = pair.grounding->cooccurrence_count;
        if (!count.has_value()) count = pair.null_rec->cooccurrence_count;
        if (!count.has_value()) continue;
        quip::ScorePair scores;
        scores.grounding = quip::quip_score(quip::quip_target_text(*pair.grounding), sketch);
        scores.null_prompt = quip::quip_score(quip::quip_target_text(*pair.null_rec), sketch);
        pairs.emplace_back(std::move(scores), *count);
    }
    return o.bin_edges.empty() ? quip::popularity_bins(pairs)
                               : quip::popularity_bins(pairs, o.bin_edges);
}

void run_eval(const EvalOpts& o) {
    const quip::PromptCatalog catalog = o.catalog.empty()
                                            ? quip::PromptCatalog::builtin()
                                            : quip::PromptCatalog::from_json_file(o.catalog);
    if (o.dump_catalog) {
        std::cout << catalog.to_json_string() << "\n";
        return;
    }

    const quip::BloomSketch sketch = quip::load_sketch(std::filesystem::path(o.sketch));
    const quip::GenerationFile file = quip::read_generations(
        std::filesystem::path(o.generations), o.lenient);
    const quip::ScoreReport report = quip::evaluate_run(file.records, sketch, catalog);

    std::string bins_table;
    json bins_json;
    if (o.bins) {
        const auto bins = compute_bins(o, file.records, sketch, catalog);
        bins_table = bins_to_table(bins);
        bins_json = bins_to_json(bins);
    }

    if (o.format == "json") {
        json doc = json::parse(report.to_json_string());
        if (o.bins) doc["popularity_bins"] = bins_json;
        if (file.skipped_lines > 0) doc["skipped_lines"] = file.skipped_lines;
        std::cout << doc.dump(2) << "\n";
    } else if (o.format == "table") {
        std::cout << report.to_table_string();
        if (o.bins) std::cout << "\n" << bins_table;
        if (file.skipped_lines > 0) {
            std::cout << "skipped " << file.skipped_lines << " malformed line(s)\n";
        }
    } else {
        throw quip::InvalidArgument("unknown output format: " + o.format);
    }

    if (!o.out_prefix.empty()) {
        {
            std::ofstream out(o.out_prefix + ".json");
            if (!out) throw quip::IoError("cannot write " + o.out_prefix + ".json");
            json doc = json::parse(report.to_json_string());
            if (o.bins) doc["popularity_bins"] = bins_json;
            out << doc.dump(2) << "\n";
        }
        {
            std::ofstream out(o.out_prefix + ".txt");
            if (!out) throw quip::IoError("cannot write " + o.out_prefix + ".txt");
            out << report.to_table_string();
            if (o.bins) out << "\n" << bins_table;
        }
    }
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

struct InspectOpts {
    std::string sketch;
    bool as_json = false;
    bool full = false;
};

void run_inspect(const InspectOpts& o) {
    const quip::SketchInfo info = quip::read_sketch_info(std::filesystem::path(o.sketch));
    const auto file_size = std::filesystem::file_size(o.sketch);

    std::optional<quip::BloomSketch> loaded;
    if (o.full) loaded = quip::load_sketch(std::filesystem::path(o.sketch));

    if (o.as_json) {
        json doc = {
            {"path", o.sketch},
            {"file_bytes", file_size},
            {"format_version", info.version},
            {"bits", info.bits},
            {"num_hashes", info.num_hashes},
            {"seed", info.seed},
            {"hash_id", info.hash_id},
            {"ngram_width", info.ngram.width},
            {"ngram_stride", info.ngram.stride},
            {"normalization", std::string(quip::to_string(info.ngram.normalization))},
            {"ngram_fingerprint", info.ngram_fingerprint},
            {"corpus_label", info.corpus_label},
            {"inserted_count", info.inserted_count},
        };
        if (loaded.has_value()) {
            doc["set_bits"] = loaded->set_bit_count();
            doc["fill_fraction"] = loaded->fill_fraction();
            doc["estimated_fpr"] = loaded->estimate_fpr();
        }
        std::cout << doc.dump(2) << "\n";
        return;
    }

    std::cout << "path:              " << o.sketch << "\n"
              << "file bytes:        " << file_size << "\n"
              << "format version:    " << info.version << "\n"
              << "bits (m):          " << info.bits << "\n"
              << "hashes (k):        " << info.num_hashes << "\n"
              << "seed:              " << info.seed << "\n"
              << "hash id:           " << info.hash_id << "\n"
              << "ngram width:       " << info.ngram.width << "\n"
              << "ngram stride:      " << info.ngram.stride << "\n"
              << "normalization:     " << quip::to_string(info.ngram.normalization) << "\n"
              << "ngram fingerprint: " << info.ngram_fingerprint << "\n"
              << "corpus label:      " << info.corpus_label << "\n"
              << "inserted count:    " << info.inserted_count << "\n";
    if (loaded.has_value()) {
        std::cout << "set bits:          " << loaded->set_bit_count() << "\n"
                  << "fill fraction:     " << fixed4(loaded->fill_fraction()) << "\n"
                  << "estimated fpr:     " << loaded->estimate_fpr() << "\n";
    }
}

// ---------------------------------------------------------------------------
// serve
// ---------------------------------------------------------------------------

struct ServeOpts {
    std::vector<std::string> sketches;  // NAME=PATH or PATH
    std::string host = "127.0.0.1";
    int port = 8080;
    std::size_t max_body = 8 * 1024 * 1024;
};

void run_serve(const ServeOpts& o) {
    quip::service::ServiceConfig config;
    config.max_body_bytes = o.max_body;
    quip::service::QueryService service(config);

    for (const std::string& spec : o.sketches) {
        std::string name, path;
        const std::size_t eq = spec.find('=');
        if (eq == std::string::npos) {
            path = spec;
            name = std::filesystem::path(spec).stem().string();
        } else {
            name = spec.substr(0, eq);
            path = spec.substr(eq + 1);
        }
        quip::BloomSketch sketch = quip::load_sketch(std::filesystem::path(path));
        std::cout << "mounted " << name << ": " << sketch.bit_count() << " bits, k="
                  << sketch.num_hashes() << ", label \"" << sketch.corpus_label() << "\"\n";
        service.add_sketch(std::move(name), std::move(sketch));
    }

    std::cout << "listening on http://" << o.host << ":" << o.port << "\n";
    if (!service.serve(o.host, o.port)) {
        throw quip::IoError("cannot bind " + o.host + ":" + std::to_string(o.port));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"corpus n-gram membership sketches and quoting metrics"};
    app.require_subcommand(1);

    auto build = std::make_shared<BuildOpts>();
    CLI::App* build_cmd = app.add_subcommand("build", "index a corpus into a sketch file");
    build_cmd->add_option("--corpus", build->corpus, "corpus path")->required();
    build_cmd->add_option("--format", build->format, "jsonl | text | dir")
        ->check(CLI::IsMember({"jsonl", "text", "plain-text", "dir", "dir-tree"}));
    build_cmd->add_option("--text-field", build->text_field, "JSONL text field");
    build_cmd->add_option("--id-field", build->id_field, "JSONL id field");
    build_cmd->add_flag("--lenient", build->lenient, "skip malformed JSONL lines");
    build_cmd->add_option("--out", build->out, "output sketch path")->required();
    build_cmd->add_option("--expected-items", build->expected_items, "planned gram count")
        ->required()
        ->check(CLI::PositiveNumber);
    build_cmd->add_option("--target-fpr", build->target_fpr, "target false-positive rate")
        ->check(CLI::Range(0.0, 0.5));
    build_cmd->add_option("--width", build->width, "gram width in characters (default 25)");
    build_cmd->add_option("--stride", build->stride, "indexing stride (default 1)");
    build_cmd->add_option("--normalize", build->normalize,
                          "none | lowercase | collapse-whitespace | lowercase+collapse");
    build_cmd->add_option("--shards", build->shards, "parallel shard count")
        ->check(CLI::PositiveNumber);
    build_cmd->add_option("--seed", build->seed, "hash seed");
    build_cmd->add_option("--label", build->label, "corpus label stored in the header");
    build_cmd->callback([build] { run_build(*build); });

    auto score = std::make_shared<ScoreOpts>();
    CLI::App* score_cmd = app.add_subcommand("score", "QUIP-score texts against a sketch");
    score_cmd->add_option("--sketch", score->sketch, "sketch file")->required();
    score_cmd->add_option("input", score->input, "text source")->required();
    score_cmd->add_option("--format", score->format, "text | lines | jsonl")
        ->check(CLI::IsMember({"text", "lines", "jsonl"}));
    score_cmd->add_option("--text-field", score->text_field, "JSONL text field");
    score_cmd->add_flag("--json", score->as_json, "JSON output");
    score_cmd->add_flag("--count-short", score->count_short,
                        "count too-short texts as score 0 instead of skipping them");
    score_cmd->callback([score] { run_score(*score); });

    auto highlight = std::make_shared<HighlightOpts>();
    CLI::App* highlight_cmd =
        app.add_subcommand("highlight", "mark quoted spans in a text");
    highlight_cmd->add_option("--sketch", highlight->sketch, "sketch file")->required();
    highlight_cmd->add_option("input", highlight->input, "text file");
    highlight_cmd->add_option("--text", highlight->text, "literal text instead of a file");
    highlight_cmd->add_flag("--json", highlight->as_json, "span offsets as JSON");
    highlight_cmd->callback([highlight] { run_highlight(*highlight); });

    auto eval = std::make_shared<EvalOpts>();
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a generation run");
    eval_cmd->add_option("--sketch", eval->sketch, "sketch file");
    eval_cmd->add_option("--generations", eval->generations, "generations JSONL");
    eval_cmd->add_option("--catalog", eval->catalog, "prompt catalog JSON (default: built-in)");
    eval_cmd->add_flag("--lenient", eval->lenient, "skip malformed JSONL lines");
    eval_cmd->add_option("--format", eval->format, "table | json")
        ->check(CLI::IsMember({"table", "json"}));
    eval_cmd->add_option("--out", eval->out_prefix, "write <prefix>.json and <prefix>.txt");
    eval_cmd->add_flag("--dump-catalog", eval->dump_catalog, "print the catalog and exit");
    eval_cmd->add_flag("--bins", eval->bins, "report popularity bins over cooccurrence counts");
    eval_cmd->add_option("--bins-prompt", eval->bins_prompt, "grounding prompt id for --bins");
    eval_cmd->add_option("--bin-edges", eval->bin_edges, "bin edges (default powers of ten)");
    eval_cmd->callback([eval] {
        if (!eval->dump_catalog && (eval->sketch.empty() || eval->generations.empty())) {
            throw CLI::RequiredError("--sketch and --generations");
        }
        run_eval(*eval);
    });

    auto inspect = std::make_shared<InspectOpts>();
    CLI::App* inspect_cmd = app.add_subcommand("inspect", "print a sketch file's header");
    inspect_cmd->add_option("sketch", inspect->sketch, "sketch file")->required();
    inspect_cmd->add_flag("--json", inspect->as_json, "JSON output");
    inspect_cmd->add_flag("--full", inspect->full, "also load the bit array for fill stats");
    inspect_cmd->callback([inspect] { run_inspect(*inspect); });

    auto serve = std::make_shared<ServeOpts>();
    CLI::App* serve_cmd = app.add_subcommand("serve", "HTTP query service over loaded sketches");
    serve_cmd->add_option("--sketch", serve->sketches, "NAME=PATH or PATH (repeatable)")
        ->required();
    serve_cmd->add_option("--host", serve->host, "bind address");
    serve_cmd->add_option("--port", serve->port, "bind port");
    serve_cmd->add_option("--max-body", serve->max_body, "request body cap in bytes");
    serve_cmd->callback([serve] { run_serve(*serve); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const quip::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const quip::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const quip::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
