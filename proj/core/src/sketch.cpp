#include "quip/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <utility>

namespace quip {

namespace {

constexpr std::string_view kMagic = "QUIPSK01";
constexpr std::uint16_t kFormatVersion = 1;
// m u64 + k u16 + seed u64 + hash_id len u32 + width u16 + stride u16 +
// norm u8 + label len u32 + inserted u64
constexpr std::size_t kMinHeaderLen = 8 + 2 + 8 + 4 + 2 + 2 + 1 + 4 + 8;
constexpr std::size_t kMaxHeaderLen = 1 << 20;

std::uint64_t word_count_for(std::uint64_t bits) { return (bits + 63) / 64; }

void append_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

void append_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_string(std::string& out, std::string_view s) {
    if (s.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw InvalidArgument("string field too long for sketch header");
    }
    append_u32(out, static_cast<std::uint32_t>(s.size()));
    out.append(s);
}

/// Bounds-checked little-endian reads over a parsed header block.
struct Cursor {
    const unsigned char* p;
    std::size_t remaining;

    void need(std::size_t n) const {
        if (remaining < n) throw FormatError(FormatFault::bad_header, "sketch header too short");
    }
    std::uint8_t u8() {
        need(1);
        std::uint8_t v = p[0];
        p += 1;
        remaining -= 1;
        return v;
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        p += 2;
        remaining -= 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(p[i]) << (8 * i);
        p += 4;
        remaining -= 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(p[i]) << (8 * i);
        p += 8;
        remaining -= 8;
        return v;
    }
    std::string str() {
        const std::uint32_t len = u32();
        need(len);
        std::string v(reinterpret_cast<const char*>(p), len);
        p += len;
        remaining -= len;
        return v;
    }
};

/// Reads exactly n bytes or reports how many arrived.
std::size_t read_some(std::istream& in, char* dst, std::size_t n) {
    in.read(dst, static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(in.gcount());
}

void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
    if (read_some(in, dst, n) != n) {
        throw FormatError(FormatFault::truncated,
                          std::string("sketch file truncated while reading ") + what);
    }
}

std::string build_header(const BloomSketch& s) {
    std::string header;
    append_u64(header, s.bit_count());
    append_u16(header, static_cast<std::uint16_t>(s.num_hashes()));
    append_u64(header, s.seed());
    append_string(header, s.hash_id());
    append_u16(header, s.ngram().width);
    append_u16(header, s.ngram().stride);
    header.push_back(static_cast<char>(s.ngram().normalization));
    append_string(header, s.corpus_label());
    append_u64(header, s.inserted_count());
    return header;
}

struct ParsedHeader {
    std::uint64_t bits;
    std::uint32_t num_hashes;
    std::uint64_t seed;
    std::string hash_id;
    NgramConfig ngram;
    std::string corpus_label;
    std::uint64_t inserted_count;
};

ParsedHeader parse_header(const std::string& raw) {
    Cursor c{reinterpret_cast<const unsigned char*>(raw.data()), raw.size()};
    ParsedHeader h;
    h.bits = c.u64();
    h.num_hashes = c.u16();
    h.seed = c.u64();
    h.hash_id = c.str();
    h.ngram.width = c.u16();
    h.ngram.stride = c.u16();
    const std::uint8_t norm = c.u8();
    h.corpus_label = c.str();
    h.inserted_count = c.u64();
    // Bytes past the known fields are tolerated; header_len exists so readers
    // can skip additions within a format version.

    if (norm > static_cast<std::uint8_t>(Normalization::lowercase_collapse)) {
        throw FormatError(FormatFault::bad_header, "unknown normalization code");
    }
    h.ngram.normalization = static_cast<Normalization>(norm);
    if (h.hash_id != hash::kHashId) {
        throw FormatError(FormatFault::bad_header, "unsupported hash_id: " + h.hash_id);
    }
    try {
        h.ngram.validate();
    } catch (const InvalidArgument& e) {
        throw FormatError(FormatFault::bad_header, e.what());
    }
    if (h.bits < 64) throw FormatError(FormatFault::bad_header, "bit count below 64");
    if (h.num_hashes < 1 || h.num_hashes > 32) {
        throw FormatError(FormatFault::bad_header, "hash count out of range");
    }
    return h;
}

/// Shared front matter: magic, version, header block. Feeds `cs` if non-null.
std::string read_prefix(std::istream& in, hash::Murmur3Stream* cs) {
    char magic[8];
    read_exact(in, magic, sizeof magic, "magic");
    if (std::string_view(magic, sizeof magic) != kMagic) {
        throw FormatError(FormatFault::bad_magic, "not a sketch file (bad magic)");
    }
    char fixed[6];
    read_exact(in, fixed, sizeof fixed, "version");
    const std::uint16_t version =
        static_cast<std::uint16_t>(static_cast<unsigned char>(fixed[0]) |
                                   (static_cast<unsigned char>(fixed[1]) << 8));
    if (version != kFormatVersion) {
        throw FormatError(FormatFault::unsupported_version,
                          "unsupported sketch format version " + std::to_string(version));
    }
    std::uint32_t header_len = 0;
    for (int i = 0; i < 4; ++i) {
        header_len |= std::uint32_t(static_cast<unsigned char>(fixed[2 + i])) << (8 * i);
    }
    if (header_len < kMinHeaderLen || header_len > kMaxHeaderLen) {
        throw FormatError(FormatFault::bad_header, "implausible header length");
    }
    std::string header(header_len, '\0');
    read_exact(in, header.data(), header_len, "header");
    if (cs != nullptr) {
        cs->update(magic, sizeof magic);
        cs->update(fixed, sizeof fixed);
        cs->update(header);
    }
    return header;
}

}  // namespace

SketchPlan plan_sketch(std::uint64_t expected_items, double target_fpr) {
    if (expected_items < 1) throw InvalidArgument("expected_items must be >= 1");
    if (!(target_fpr > 0.0) || target_fpr > 0.5) {
        throw InvalidArgument("target_fpr must be in (0, 0.5]");
    }
    const double ln2 = std::log(2.0);
    const double m_exact = -static_cast<double>(expected_items) * std::log(target_fpr) / (ln2 * ln2);
    SketchPlan plan;
    plan.bits = static_cast<std::uint64_t>(std::ceil(m_exact));
    const double bits_per_item = static_cast<double>(plan.bits) / static_cast<double>(expected_items);
    const auto k = static_cast<std::int64_t>(std::llround(bits_per_item * ln2));
    plan.num_hashes = static_cast<std::uint32_t>(std::clamp<std::int64_t>(k, 1, 32));
    plan.expected_items = expected_items;
    plan.target_fpr = target_fpr;
    return plan;
}

BloomSketch::BloomSketch(std::uint64_t bits, std::uint32_t num_hashes, std::uint64_t seed,
                         NgramConfig ngram, std::string corpus_label)
    : bits_(bits),
      num_hashes_(num_hashes),
      seed_(seed),
      ngram_(ngram),
      corpus_label_(std::move(corpus_label)) {
    if (bits_ < 64) throw InvalidArgument("sketch needs at least 64 bits");
    if (num_hashes_ < 1 || num_hashes_ > 32) {
        throw InvalidArgument("num_hashes must be in [1, 32]");
    }
    ngram_.validate();
    ngram_fingerprint_ = ngram_.fingerprint();
    mod_inverse_ = (bits_ & (bits_ - 1)) == 0 ? 0 : ~0ULL / bits_;
    words_.assign(word_count_for(bits_), 0);
}

BloomSketch BloomSketch::from_plan(const SketchPlan& plan, NgramConfig ngram,
                                   std::string corpus_label, std::uint64_t seed) {
    return BloomSketch(std::max<std::uint64_t>(plan.bits, 64), plan.num_hashes, seed,
                       ngram, std::move(corpus_label));
}

std::uint64_t BloomSketch::probe_index(hash::Hash128 h, std::uint32_t i) const {
    const std::uint64_t a = h.h1 + std::uint64_t(i) * h.h2;
    if (mod_inverse_ == 0) return a & (bits_ - 1);
    const auto q = static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(a) * mod_inverse_) >> 64);
    std::uint64_t r = a - q * bits_;
    while (r >= bits_) r -= bits_;
    return r;
}

void BloomSketch::insert(std::string_view gram_text) { insert_hashed(hash_gram(gram_text)); }

void BloomSketch::insert_hashed(hash::Hash128 h) {
    for (std::uint32_t i = 0; i < num_hashes_; ++i) {
        const std::uint64_t idx = probe_index(h, i);
        words_[idx >> 6] |= 1ULL << (idx & 63);
    }
    ++inserted_count_;
}

bool BloomSketch::contains(std::string_view gram_text) const {
    return contains_hashed(hash_gram(gram_text));
}

bool BloomSketch::contains(const Gram& gram, const NgramConfig& config) const {
    if (config.fingerprint() != ngram_fingerprint_) {
        throw MismatchError("gram config fingerprint does not match the sketch");
    }
    return contains(gram.text);
}

bool BloomSketch::contains_hashed(hash::Hash128 h) const {
    for (std::uint32_t i = 0; i < num_hashes_; ++i) {
        const std::uint64_t idx = probe_index(h, i);
        if ((words_[idx >> 6] & (1ULL << (idx & 63))) == 0) return false;
    }
    return true;
}

void BloomSketch::prefetch_hashed(hash::Hash128 h) const {
    for (std::uint32_t i = 0; i < num_hashes_; ++i) {
        const std::uint64_t idx = probe_index(h, i);
        __builtin_prefetch(words_.data() + (idx >> 6), 1, 3);
    }
}

std::uint64_t BloomSketch::set_bit_count() const {
    std::uint64_t count = 0;
    for (std::uint64_t w : words_) count += std::popcount(w);
    return count;
}

double BloomSketch::fill_fraction() const {
    return static_cast<double>(set_bit_count()) / static_cast<double>(bits_);
}

double BloomSketch::estimate_fpr() const {
    return std::pow(fill_fraction(), static_cast<double>(num_hashes_));
}

BloomSketch merge(const BloomSketch& a, const BloomSketch& b) {
    if (a.bits_ != b.bits_ || a.num_hashes_ != b.num_hashes_ || a.seed_ != b.seed_ ||
        a.ngram_ != b.ngram_) {
        throw MismatchError("cannot merge sketches with different parameters");
    }
    BloomSketch out = a;
    for (std::size_t i = 0; i < out.words_.size(); ++i) out.words_[i] |= b.words_[i];
    out.inserted_count_ += b.inserted_count_;
    if (a.corpus_label_ != b.corpus_label_ && !b.corpus_label_.empty()) {
        out.corpus_label_ = a.corpus_label_.empty() ? b.corpus_label_
                                                    : a.corpus_label_ + "+" + b.corpus_label_;
    }
    return out;
}

void save_sketch(const BloomSketch& sketch, std::ostream& out) {
    const std::string header = build_header(sketch);
    std::string prefix(kMagic);
    append_u16(prefix, kFormatVersion);
    append_u32(prefix, static_cast<std::uint32_t>(header.size()));
    prefix += header;

    hash::Murmur3Stream cs(0);
    cs.update(prefix);
    out.write(prefix.data(), static_cast<std::streamsize>(prefix.size()));

    const auto& words = sketch.words();
    if constexpr (std::endian::native == std::endian::little) {
        const char* bytes = reinterpret_cast<const char*>(words.data());
        const std::size_t n = words.size() * 8;
        cs.update(bytes, n);
        out.write(bytes, static_cast<std::streamsize>(n));
    } else {
        std::string buf;
        buf.reserve(8192);
        for (std::uint64_t w : words) {
            append_u64(buf, w);
            if (buf.size() == 8192) {
                cs.update(buf);
                out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
                buf.clear();
            }
        }
        cs.update(buf);
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }

    std::string trailer;
    append_u64(trailer, cs.digest().h1);
    out.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
    if (!out) throw IoError("failed to write sketch");
}

void save_sketch(const BloomSketch& sketch, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    save_sketch(sketch, out);
    out.flush();
    if (!out) throw IoError("failed to write " + path.string());
}

BloomSketch load_sketch(std::istream& in) {
    hash::Murmur3Stream cs(0);
    const ParsedHeader h = parse_header(read_prefix(in, &cs));

    const std::uint64_t word_count = word_count_for(h.bits);
    std::vector<std::uint64_t> words;
    try {
        words.resize(word_count);
    } catch (const std::exception&) {
        throw FormatError(FormatFault::bad_header, "declared bit array does not fit in memory");
    }
    char* dst = reinterpret_cast<char*>(words.data());
    read_exact(in, dst, word_count * 8, "bit array");
    cs.update(dst, word_count * 8);
    if constexpr (std::endian::native != std::endian::little) {
        for (auto& w : words) w = __builtin_bswap64(w);
    }

    char trailer[8];
    read_exact(in, trailer, sizeof trailer, "checksum");
    std::uint64_t stored = 0;
    for (int i = 0; i < 8; ++i) {
        stored |= std::uint64_t(static_cast<unsigned char>(trailer[i])) << (8 * i);
    }
    if (stored != cs.digest().h1) {
        throw FormatError(FormatFault::checksum_mismatch, "sketch checksum mismatch");
    }

    if (h.bits % 64 != 0) {
        const std::uint64_t live = (1ULL << (h.bits % 64)) - 1;
        if ((words.back() & ~live) != 0) {
            throw FormatError(FormatFault::bad_header, "bits set past the declared length");
        }
    }

    BloomSketch sketch(h.bits, h.num_hashes, h.seed, h.ngram, h.corpus_label);
    sketch.words_ = std::move(words);
    sketch.inserted_count_ = h.inserted_count;
    return sketch;
}

BloomSketch load_sketch(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return load_sketch(in);
}

SketchInfo read_sketch_info(std::istream& in) {
    const ParsedHeader h = parse_header(read_prefix(in, nullptr));
    SketchInfo info;
    info.version = kFormatVersion;
    info.bits = h.bits;
    info.num_hashes = h.num_hashes;
    info.seed = h.seed;
    info.hash_id = h.hash_id;
    info.ngram = h.ngram;
    info.ngram_fingerprint = h.ngram.fingerprint();
    info.corpus_label = h.corpus_label;
    info.inserted_count = h.inserted_count;
    return info;
}

SketchInfo read_sketch_info(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_sketch_info(in);
}

}  // namespace quip
