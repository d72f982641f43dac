#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "quip/errors.hpp"
#include "quip/hash.hpp"
#include "quip/ngram.hpp"

namespace quip {

/// Seed written into sketches unless the builder overrides it.
inline constexpr std::uint64_t kDefaultSketchSeed = 0x51554950;  // "QUIP"

/// Default false-positive target for released sketches.
inline constexpr double kDefaultTargetFpr = 0.001;

/// Output of the standard Bloom sizing rule:
///   m = ceil(-n ln p / (ln 2)^2),  k = max(1, round((m/n) ln 2)).
struct SketchPlan {
    std::uint64_t bits = 0;           // m
    std::uint32_t num_hashes = 0;     // k
    std::uint64_t expected_items = 0; // n
    double target_fpr = 0.0;          // p
};

/// Throws InvalidArgument unless expected_items >= 1 and 0 < target_fpr <= 0.5.
/// k is capped at 32 (the sketch limit); the cap only binds below p ~ 2e-10.
SketchPlan plan_sketch(std::uint64_t expected_items, double target_fpr);

/// A Bloom-filter membership sketch over character n-grams: the queryable
/// record of which windows occur in a reference corpus.
///
/// Membership is computed from one 128-bit hash of the normalized gram's
/// UTF-8 bytes, split into halves (h1, h2); bit indices follow double
/// hashing, index_i = (h1 + i*h2) mod m for i in [0, k). Inserted grams
/// always report present; absent grams report present with probability
/// roughly (set_bits/m)^k.
///
/// A sketch is mutable only while its builder owns it. Once built (or
/// loaded) it is immutable and safe to query from any number of threads.
class BloomSketch {
public:
    /// Requires bits >= 64, 1 <= num_hashes <= 32, and a valid ngram config.
    BloomSketch(std::uint64_t bits, std::uint32_t num_hashes, std::uint64_t seed,
                NgramConfig ngram, std::string corpus_label);

    /// Builds an empty sketch from a plan. Plans below the 64-bit floor are
    /// raised to it; the header always records the size actually in use.
    static BloomSketch from_plan(const SketchPlan& plan, NgramConfig ngram,
                                 std::string corpus_label,
                                 std::uint64_t seed = kDefaultSketchSeed);

    // -- membership ---------------------------------------------------------

    void insert(std::string_view gram_text);
    void insert(const Gram& gram) { insert(gram.text); }

    bool contains(std::string_view gram_text) const;
    /// Fingerprint-checked variant: throws MismatchError when `config` differs
    /// from the config the sketch was built with.
    bool contains(const Gram& gram, const NgramConfig& config) const;

    hash::Hash128 hash_gram(std::string_view gram_text) const {
        return hash::murmur3_x64_128(gram_text, seed_);
    }
    void insert_hashed(hash::Hash128 h);
    bool contains_hashed(hash::Hash128 h) const;
    /// Hints the cache lines of all k probe words into cache.
    void prefetch_hashed(hash::Hash128 h) const;

    // -- statistics ----------------------------------------------------------

    std::uint64_t set_bit_count() const;
    double fill_fraction() const;
    /// (set_bits / m)^k — the exact expected false-positive rate at the
    /// current fill.
    double estimate_fpr() const;

    // -- header accessors ----------------------------------------------------

    std::uint64_t bit_count() const { return bits_; }
    std::uint32_t num_hashes() const { return num_hashes_; }
    std::uint64_t seed() const { return seed_; }
    std::string_view hash_id() const { return hash::kHashId; }
    const NgramConfig& ngram() const { return ngram_; }
    std::uint64_t ngram_fingerprint() const { return ngram_fingerprint_; }
    const std::string& corpus_label() const { return corpus_label_; }
    void set_corpus_label(std::string label) { corpus_label_ = std::move(label); }
    /// Count of insert calls, not distinct items.
    std::uint64_t inserted_count() const { return inserted_count_; }

    const std::vector<std::uint64_t>& words() const { return words_; }

    /// Header-and-bits equality (corpus_label included).
    bool operator==(const BloomSketch&) const = default;

    friend BloomSketch merge(const BloomSketch& a, const BloomSketch& b);
    friend BloomSketch load_sketch(std::istream& in);

private:
    std::uint64_t probe_index(hash::Hash128 h, std::uint32_t i) const;

    std::uint64_t bits_ = 0;
    std::uint32_t num_hashes_ = 0;
    std::uint64_t seed_ = 0;
    NgramConfig ngram_{};
    std::uint64_t ngram_fingerprint_ = 0;
    std::string corpus_label_;
    std::uint64_t inserted_count_ = 0;
    std::uint64_t mod_inverse_ = 0;  // floor(2^64 / bits_), 0 when bits_ is a power of two
    std::vector<std::uint64_t> words_;
};

/// Bitwise OR of two sketches built with identical m, k, seed, hash and ngram
/// parameters; throws MismatchError otherwise. Labels are joined with '+'
/// when they differ. inserted_count adds.
BloomSketch merge(const BloomSketch& a, const BloomSketch& b);

// -- serialization -----------------------------------------------------------
//
// Sketch file layout (all integers little-endian):
//   magic "QUIPSK01" (8 bytes)
//   format version        u16   (currently 1)
//   header length         u32   (byte length of the header block)
//   header block:
//     bits (m)            u64
//     num_hashes (k)      u16
//     seed                u64
//     hash_id             u32 length + UTF-8 bytes
//     ngram width         u16
//     ngram stride        u16
//     normalization code  u8
//     corpus_label        u32 length + UTF-8 bytes
//     inserted_count      u64
//   bit array: ceil(m/64) words of u64; bit i lives in word i/64 at bit i%64,
//     bits past m-1 in the last word are zero
//   checksum              u64  (murmur3_x64_128 with seed 0 over every
//                               preceding byte of the file; low half h1)

void save_sketch(const BloomSketch& sketch, std::ostream& out);
void save_sketch(const BloomSketch& sketch, const std::filesystem::path& path);

BloomSketch load_sketch(std::istream& in);
BloomSketch load_sketch(const std::filesystem::path& path);

/// Everything knowable without reading the bit array.
struct SketchInfo {
    std::uint16_t version = 0;
    std::uint64_t bits = 0;
    std::uint32_t num_hashes = 0;
    std::uint64_t seed = 0;
    std::string hash_id;
    NgramConfig ngram;
    std::uint64_t ngram_fingerprint = 0;
    std::string corpus_label;
    std::uint64_t inserted_count = 0;
};

SketchInfo read_sketch_info(std::istream& in);
SketchInfo read_sketch_info(const std::filesystem::path& path);

}  // namespace quip
