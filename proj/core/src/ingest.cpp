#include "quip/ingest.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <exception>
#include <fstream>
#include <istream>
#include <mutex>
#include <thread>
#include <vector>

#include <json.hpp>

namespace quip {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_whole_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed to read " + path.string());
    return text;
}

bool is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

class JsonlReader final : public DocumentReader {
public:
    JsonlReader(std::istream& in, ReaderOptions options, std::string name)
        : in_(in), options_(std::move(options)), name_(std::move(name)) {}

    std::optional<Document> next() override {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            bytes_ += line.size() + 1;
            if (is_blank(line)) continue;
            if (!line.empty() && line.back() == '\r') line.pop_back();

            json obj = json::parse(line, nullptr, /*allow_exceptions=*/false);
            std::string problem;
            if (obj.is_discarded()) {
                problem = "invalid JSON";
            } else if (!obj.is_object()) {
                problem = "line is not a JSON object";
            } else if (!obj.contains(options_.text_field)) {
                problem = "missing \"" + options_.text_field + "\" field";
            } else if (!obj[options_.text_field].is_string()) {
                problem = "\"" + options_.text_field + "\" is not a string";
            }
            if (!problem.empty()) {
                if (options_.lenient) {
                    ++skipped_;
                    continue;
                }
                throw JsonlError(line_no_, name_ + ":" + std::to_string(line_no_) + ": " + problem);
            }

            Document doc;
            doc.text = obj[options_.text_field].get<std::string>();
            if (obj.contains(options_.id_field) && obj[options_.id_field].is_string()) {
                doc.id = obj[options_.id_field].get<std::string>();
            } else {
                doc.id = std::to_string(line_no_);
            }
            return doc;
        }
        if (in_.bad()) throw IoError("failed while reading " + name_);
        return std::nullopt;
    }

    std::uint64_t bytes_read() const override { return bytes_; }
    std::uint64_t skipped() const override { return skipped_; }

private:
    std::istream& in_;
    ReaderOptions options_;
    std::string name_;
    std::size_t line_no_ = 0;
    std::uint64_t bytes_ = 0;
    std::uint64_t skipped_ = 0;
};

class OwningJsonlReader final : public DocumentReader {
public:
    OwningJsonlReader(const fs::path& path, ReaderOptions options)
        : file_(path, std::ios::binary), inner_(file_, std::move(options), path.string()) {
        if (!file_) throw IoError("cannot open " + path.string());
    }

    std::optional<Document> next() override { return inner_.next(); }
    std::uint64_t bytes_read() const override { return inner_.bytes_read(); }
    std::uint64_t skipped() const override { return inner_.skipped(); }

private:
    std::ifstream file_;
    JsonlReader inner_;
};

/// One document per file, in sorted path order.
class FileListReader final : public DocumentReader {
public:
    FileListReader(std::vector<fs::path> paths, fs::path base)
        : paths_(std::move(paths)), base_(std::move(base)) {
        std::sort(paths_.begin(), paths_.end());
    }

    std::optional<Document> next() override {
        if (index_ >= paths_.size()) return std::nullopt;
        const fs::path& path = paths_[index_++];
        Document doc;
        doc.id = base_.empty() ? path.string() : fs::relative(path, base_).string();
        doc.text = read_whole_file(path);
        bytes_ += doc.text.size();
        return doc;
    }

    std::uint64_t bytes_read() const override { return bytes_; }

private:
    std::vector<fs::path> paths_;
    fs::path base_;
    std::size_t index_ = 0;
    std::uint64_t bytes_ = 0;
};

std::vector<fs::path> collect_tree(const fs::path& root) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (auto it = fs::recursive_directory_iterator(root, ec);
         it != fs::recursive_directory_iterator(); it.increment(ec)) {
        if (ec) throw IoError("cannot walk " + root.string() + ": " + ec.message());
        if (it->is_regular_file()) files.push_back(it->path());
    }
    if (ec) throw IoError("cannot walk " + root.string() + ": " + ec.message());
    return files;
}

/// Fixed-capacity handoff between the reader thread and shard builders.
class DocumentQueue {
public:
    explicit DocumentQueue(std::size_t capacity) : capacity_(capacity) {}

    void push(Document doc) {
        std::unique_lock lock(mutex_);
        not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
        if (closed_) return;
        items_.push_back(std::move(doc));
        not_empty_.notify_one();
    }

    std::optional<Document> pop() {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
        if (items_.empty()) return std::nullopt;
        Document doc = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return doc;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

private:
    std::mutex mutex_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<Document> items_;
    std::size_t capacity_;
    bool closed_ = false;
};

/// Keeps a short FIFO of hashed grams so the probe words for gram i are
/// prefetched while grams i-1..i-15 are still being inserted.
class BatchInserter {
public:
    explicit BatchInserter(BloomSketch& sketch) : sketch_(sketch) {}

    void push(hash::Hash128 h) {
        sketch_.prefetch_hashed(h);
        if (count_ == kDepth) {
            sketch_.insert_hashed(pending_[head_]);
            pending_[head_] = h;
            head_ = (head_ + 1) % kDepth;
        } else {
            pending_[(head_ + count_) % kDepth] = h;
            ++count_;
        }
    }

    void flush() {
        while (count_ > 0) {
            sketch_.insert_hashed(pending_[head_]);
            head_ = (head_ + 1) % kDepth;
            --count_;
        }
    }

private:
    static constexpr std::size_t kDepth = 16;
    BloomSketch& sketch_;
    hash::Hash128 pending_[kDepth];
    std::size_t head_ = 0;
    std::size_t count_ = 0;
};

std::uint64_t index_document(const Document& doc, const NgramConfig& config,
                             BloomSketch& sketch, BatchInserter& inserter) {
    const std::string normalized = normalize(doc.text, config);
    std::uint64_t grams = 0;
    for_each_gram(normalized, config.width, config.stride,
                  [&](std::string_view window, std::size_t) {
                      inserter.push(sketch.hash_gram(window));
                      ++grams;
                  });
    return grams;
}

}  // namespace

CorpusFormat corpus_format_from_string(std::string_view name) {
    if (name == "plain-text" || name == "text") return CorpusFormat::plain_text;
    if (name == "jsonl") return CorpusFormat::jsonl;
    if (name == "dir-tree" || name == "dir") return CorpusFormat::dir_tree;
    throw InvalidArgument("unknown corpus format: " + std::string(name));
}

std::string_view to_string(CorpusFormat format) {
    switch (format) {
        case CorpusFormat::plain_text: return "plain-text";
        case CorpusFormat::jsonl: return "jsonl";
        case CorpusFormat::dir_tree: return "dir-tree";
    }
    return "plain-text";
}

std::unique_ptr<DocumentReader> open_corpus(const fs::path& source, CorpusFormat format,
                                            ReaderOptions options) {
    std::error_code ec;
    if (!fs::exists(source, ec)) throw IoError("no such path: " + source.string());
    switch (format) {
        case CorpusFormat::jsonl:
            return std::make_unique<OwningJsonlReader>(source, std::move(options));
        case CorpusFormat::plain_text:
            return std::make_unique<FileListReader>(std::vector<fs::path>{source}, fs::path{});
        case CorpusFormat::dir_tree:
            if (!fs::is_directory(source)) {
                throw IoError(source.string() + " is not a directory");
            }
            return std::make_unique<FileListReader>(collect_tree(source), source);
    }
    throw InvalidArgument("unknown corpus format");
}

std::unique_ptr<DocumentReader> jsonl_reader(std::istream& in, ReaderOptions options,
                                             std::string name) {
    return std::make_unique<JsonlReader>(in, std::move(options), std::move(name));
}

std::pair<BloomSketch, IngestStats> build_sketch(DocumentReader& documents,
                                                 const SketchPlan& plan,
                                                 const NgramConfig& config,
                                                 const BuildOptions& options) {
    if (options.shards < 1) throw InvalidArgument("shards must be >= 1");
    config.validate();

    const auto started = std::chrono::steady_clock::now();
    IngestStats stats;

    BloomSketch result = BloomSketch::from_plan(plan, config, options.corpus_label, options.seed);

    if (options.shards == 1) {
        BatchInserter inserter(result);
        while (auto doc = documents.next()) {
            stats.grams_inserted += index_document(*doc, config, result, inserter);
            ++stats.documents;
        }
        inserter.flush();
    } else {
        const std::uint32_t shards = options.shards;
        std::vector<BloomSketch> parts;
        parts.reserve(shards);
        for (std::uint32_t s = 0; s < shards; ++s) {
            parts.push_back(BloomSketch::from_plan(plan, config, options.corpus_label, options.seed));
        }

        std::vector<std::unique_ptr<DocumentQueue>> queues;
        for (std::uint32_t s = 0; s < shards; ++s) {
            queues.push_back(std::make_unique<DocumentQueue>(128));
        }

        std::vector<std::uint64_t> gram_counts(shards, 0);
        std::vector<std::uint64_t> doc_counts(shards, 0);
        std::vector<std::exception_ptr> worker_errors(shards);
        std::vector<std::thread> workers;
        workers.reserve(shards);
        for (std::uint32_t s = 0; s < shards; ++s) {
            workers.emplace_back([&, s] {
                try {
                    BatchInserter inserter(parts[s]);
                    while (auto doc = queues[s]->pop()) {
                        gram_counts[s] += index_document(*doc, config, parts[s], inserter);
                        ++doc_counts[s];
                    }
                    inserter.flush();
                } catch (...) {
                    worker_errors[s] = std::current_exception();
                    // Unblock the reader; the run is failing anyway.
                    queues[s]->close();
                }
            });
        }

        std::exception_ptr reader_error;
        std::uint64_t dispatched = 0;
        try {
            while (auto doc = documents.next()) {
                queues[dispatched % shards]->push(std::move(*doc));
                ++dispatched;
            }
        } catch (...) {
            reader_error = std::current_exception();
        }
        for (auto& q : queues) q->close();
        for (auto& t : workers) t.join();
        if (reader_error) std::rethrow_exception(reader_error);
        for (auto& err : worker_errors) {
            if (err) std::rethrow_exception(err);
        }

        // Merge in shard order; OR makes the outcome order-independent anyway.
        for (std::uint32_t s = 0; s < shards; ++s) {
            result = merge(result, parts[s]);
            stats.grams_inserted += gram_counts[s];
            stats.documents += doc_counts[s];
        }
        // merge() concatenates differing labels; here they are all identical.
        result.set_corpus_label(options.corpus_label);
    }

    stats.bytes_read = documents.bytes_read();
    stats.skipped_documents = documents.skipped();
    stats.elapsed = std::chrono::steady_clock::now() - started;
    stats.final_fill_fraction = result.fill_fraction();
    stats.estimated_fpr = result.estimate_fpr();
    stats.capacity_exceeded = stats.grams_inserted > 2 * plan.expected_items;
    return {std::move(result), stats};
}

}  // namespace quip
