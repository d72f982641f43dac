#include "quip/hash.hpp"

#include <cstring>

namespace quip::hash {

namespace {

constexpr std::uint64_t kC1 = 0x87c37b91114253d5ULL;
constexpr std::uint64_t kC2 = 0x4cf5ad432745937fULL;

inline std::uint64_t rotl64(std::uint64_t x, int r) { return (x << r) | (x >> (64 - r)); }

inline std::uint64_t fmix64(std::uint64_t k) {
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    k *= 0xc4ceb9fe1a85ec53ULL;
    k ^= k >> 33;
    return k;
}

inline std::uint64_t load64(const unsigned char* p) {
    std::uint64_t v;
    std::memcpy(&v, p, 8);  // little-endian hosts; byte order pinned by tests
    return v;
}

inline void mix_block(std::uint64_t& h1, std::uint64_t& h2, std::uint64_t k1, std::uint64_t k2) {
    k1 *= kC1;
    k1 = rotl64(k1, 31);
    k1 *= kC2;
    h1 ^= k1;
    h1 = rotl64(h1, 27);
    h1 += h2;
    h1 = h1 * 5 + 0x52dce729;

    k2 *= kC2;
    k2 = rotl64(k2, 33);
    k2 *= kC1;
    h2 ^= k2;
    h2 = rotl64(h2, 31);
    h2 += h1;
    h2 = h2 * 5 + 0x38495ab5;
}

inline Hash128 finalize(std::uint64_t h1, std::uint64_t h2, const unsigned char* tail,
                        std::size_t tail_len, std::uint64_t total_len) {
    std::uint64_t k1 = 0, k2 = 0;
    switch (tail_len) {
        case 15: k2 ^= std::uint64_t(tail[14]) << 48; [[fallthrough]];
        case 14: k2 ^= std::uint64_t(tail[13]) << 40; [[fallthrough]];
        case 13: k2 ^= std::uint64_t(tail[12]) << 32; [[fallthrough]];
        case 12: k2 ^= std::uint64_t(tail[11]) << 24; [[fallthrough]];
        case 11: k2 ^= std::uint64_t(tail[10]) << 16; [[fallthrough]];
        case 10: k2 ^= std::uint64_t(tail[9]) << 8; [[fallthrough]];
        case 9:
            k2 ^= std::uint64_t(tail[8]);
            k2 *= kC2;
            k2 = rotl64(k2, 33);
            k2 *= kC1;
            h2 ^= k2;
            [[fallthrough]];
        case 8: k1 ^= std::uint64_t(tail[7]) << 56; [[fallthrough]];
        case 7: k1 ^= std::uint64_t(tail[6]) << 48; [[fallthrough]];
        case 6: k1 ^= std::uint64_t(tail[5]) << 40; [[fallthrough]];
        case 5: k1 ^= std::uint64_t(tail[4]) << 32; [[fallthrough]];
        case 4: k1 ^= std::uint64_t(tail[3]) << 24; [[fallthrough]];
        case 3: k1 ^= std::uint64_t(tail[2]) << 16; [[fallthrough]];
        case 2: k1 ^= std::uint64_t(tail[1]) << 8; [[fallthrough]];
        case 1:
            k1 ^= std::uint64_t(tail[0]);
            k1 *= kC1;
            k1 = rotl64(k1, 31);
            k1 *= kC2;
            h1 ^= k1;
            break;
        case 0: break;
    }

    h1 ^= total_len;
    h2 ^= total_len;
    h1 += h2;
    h2 += h1;
    h1 = fmix64(h1);
    h2 = fmix64(h2);
    h1 += h2;
    h2 += h1;
    return {h1, h2};
}

}  // namespace

Hash128 murmur3_x64_128(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h1 = seed, h2 = seed;

    const std::size_t nblocks = len / 16;
    for (std::size_t i = 0; i < nblocks; ++i) {
        mix_block(h1, h2, load64(p + i * 16), load64(p + i * 16 + 8));
    }
    return finalize(h1, h2, p + nblocks * 16, len & 15, len);
}

void Murmur3Stream::update(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    total_ += len;

    if (tail_len_ > 0) {
        const std::size_t need = 16 - tail_len_;
        const std::size_t take = len < need ? len : need;
        std::memcpy(tail_ + tail_len_, p, take);
        tail_len_ += take;
        p += take;
        len -= take;
        if (tail_len_ < 16) return;
        mix_block(h1_, h2_, load64(tail_), load64(tail_ + 8));
        tail_len_ = 0;
    }

    while (len >= 16) {
        mix_block(h1_, h2_, load64(p), load64(p + 8));
        p += 16;
        len -= 16;
    }

    if (len > 0) {
        std::memcpy(tail_, p, len);
        tail_len_ = len;
    }
}

Hash128 Murmur3Stream::digest() const {
    return finalize(h1_, h2_, tail_, tail_len_, total_);
}

}  // namespace quip::hash
