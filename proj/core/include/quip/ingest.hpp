#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "quip/sketch.hpp"

namespace quip {

struct Document {
    std::string id;
    std::string text;
};

enum class CorpusFormat {
    plain_text,  // one document per file
    jsonl,       // one document per line
    dir_tree,    // recursive plain_text over a directory
};

CorpusFormat corpus_format_from_string(std::string_view name);
std::string_view to_string(CorpusFormat format);

struct ReaderOptions {
    std::string text_field = "text";
    std::string id_field = "id";
    /// With lenient set, malformed JSONL lines are skipped and counted instead
    /// of aborting the run.
    bool lenient = false;
};

/// Pull-based document stream. Memory use is independent of corpus size.
class DocumentReader {
public:
    virtual ~DocumentReader() = default;

    /// Next document, or nullopt at end of stream.
    /// Throws IoError / JsonlError (strict mode) on bad input.
    virtual std::optional<Document> next() = 0;

    virtual std::uint64_t bytes_read() const = 0;
    /// Lines skipped so far under lenient mode.
    virtual std::uint64_t skipped() const { return 0; }
};

std::unique_ptr<DocumentReader> open_corpus(const std::filesystem::path& source,
                                            CorpusFormat format, ReaderOptions options = {});

/// JSONL over an arbitrary stream (e.g. stdin). `name` is used in messages.
std::unique_ptr<DocumentReader> jsonl_reader(std::istream& in, ReaderOptions options = {},
                                             std::string name = "<stream>");

struct IngestStats {
    std::uint64_t documents = 0;
    std::uint64_t grams_inserted = 0;
    std::uint64_t bytes_read = 0;
    std::uint64_t skipped_documents = 0;
    std::chrono::duration<double> elapsed{0};
    double final_fill_fraction = 0.0;
    double estimated_fpr = 0.0;
    /// Set when more than 2x the planned item count was inserted. The sketch
    /// still answers queries; its false-positive rate is just higher than
    /// planned, and estimated_fpr reports the real figure.
    bool capacity_exceeded = false;
};

struct BuildOptions {
    std::uint32_t shards = 1;
    std::uint64_t seed = kDefaultSketchSeed;
    std::string corpus_label;
};

/// Streams every document through gram extraction into a sketch sized by
/// `plan`. With shards > 1 the documents fan out round-robin to one builder
/// thread per shard and the per-shard sketches are OR-merged at the end; the
/// resulting bits are identical for any shard count and document order.
std::pair<BloomSketch, IngestStats> build_sketch(DocumentReader& documents,
                                                 const SketchPlan& plan,
                                                 const NgramConfig& config,
                                                 const BuildOptions& options = {});

}  // namespace quip
