#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace quip::hash {

/// Identifier written into sketch headers. Any implementation claiming this id
/// must produce bit-identical digests for the same (bytes, seed).
inline constexpr std::string_view kHashId = "murmur3_x64_128";

struct Hash128 {
    std::uint64_t h1 = 0;
    std::uint64_t h2 = 0;

    bool operator==(const Hash128&) const = default;
};

/// MurmurHash3 x64/128 over `len` bytes. Both internal lanes start at `seed`,
/// which matches the reference implementation for seeds below 2^32.
Hash128 murmur3_x64_128(const void* data, std::size_t len, std::uint64_t seed);

inline Hash128 murmur3_x64_128(std::string_view bytes, std::uint64_t seed) {
    return murmur3_x64_128(bytes.data(), bytes.size(), seed);
}

/// Incremental variant for hashing data that is not contiguous in memory
/// (e.g. a sketch file as it streams through a buffer). Equivalent to the
/// one-shot function over the concatenation of all update() calls.
class Murmur3Stream {
public:
    explicit Murmur3Stream(std::uint64_t seed = 0) : h1_(seed), h2_(seed) {}

    void update(const void* data, std::size_t len);
    void update(std::string_view bytes) { update(bytes.data(), bytes.size()); }

    /// May be called repeatedly; does not consume the stream state.
    Hash128 digest() const;

private:
    std::uint64_t h1_;
    std::uint64_t h2_;
    std::uint64_t total_ = 0;
    unsigned char tail_[16] = {};
    std::size_t tail_len_ = 0;
};

}  // namespace quip::hash
