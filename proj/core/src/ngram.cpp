#include "quip/ngram.hpp"

#include "quip/hash.hpp"

namespace quip {

std::string_view to_string(Normalization n) {
    switch (n) {
        case Normalization::none: return "none";
        case Normalization::lowercase: return "lowercase";
        case Normalization::collapse_whitespace: return "collapse-whitespace";
        case Normalization::lowercase_collapse: return "lowercase+collapse";
    }
    return "none";
}

Normalization normalization_from_string(std::string_view name) {
    if (name == "none") return Normalization::none;
    if (name == "lowercase") return Normalization::lowercase;
    if (name == "collapse-whitespace") return Normalization::collapse_whitespace;
    if (name == "lowercase+collapse") return Normalization::lowercase_collapse;
    throw InvalidArgument("unknown normalization policy: " + std::string(name));
}

void NgramConfig::validate() const {
    if (width < 2) throw InvalidArgument("ngram width must be >= 2");
    if (stride < 1) throw InvalidArgument("ngram stride must be >= 1");
    if (stride > width) throw InvalidArgument("ngram stride must not exceed width");
}

std::uint64_t NgramConfig::fingerprint() const {
    // Canonical byte layout, little-endian: tag, width u16, stride u16, norm u8.
    unsigned char buf[13 + 5];
    std::string_view tag = "quip.ngram.v1";
    for (std::size_t i = 0; i < tag.size(); ++i) buf[i] = static_cast<unsigned char>(tag[i]);
    buf[13] = static_cast<unsigned char>(width & 0xFF);
    buf[14] = static_cast<unsigned char>(width >> 8);
    buf[15] = static_cast<unsigned char>(stride & 0xFF);
    buf[16] = static_cast<unsigned char>(stride >> 8);
    buf[17] = static_cast<unsigned char>(normalization);
    return hash::murmur3_x64_128(buf, sizeof buf, 0).h1;
}

std::string normalize(std::string_view text, const NgramConfig& config) {
    switch (config.normalization) {
        case Normalization::none:
            return std::string(text);
        case Normalization::lowercase:
            return unicode::lowercase(text);
        case Normalization::collapse_whitespace:
            return unicode::collapse_whitespace(text);
        case Normalization::lowercase_collapse:
            return unicode::collapse_whitespace(unicode::lowercase(text));
    }
    return std::string(text);
}

std::size_t gram_count(std::size_t scalar_len, std::uint16_t width, std::uint16_t stride) {
    if (scalar_len < width) return 0;
    const std::size_t positions = scalar_len - width + 1;
    return (positions + stride - 1) / stride;
}

std::vector<Gram> extract_grams(std::string_view text, const NgramConfig& config,
                                std::optional<std::uint16_t> stride_override) {
    config.validate();
    const std::uint16_t stride = stride_override.value_or(config.stride);
    if (stride < 1 || stride > config.width) {
        throw InvalidArgument("stride override out of range");
    }
    const std::string normalized = normalize(text, config);

    std::vector<Gram> grams;
    grams.reserve(gram_count(unicode::scalar_length(normalized), config.width, stride));
    for_each_gram(normalized, config.width, stride, [&](std::string_view window, std::size_t offset) {
        grams.push_back(Gram{std::string(window), offset});
    });
    return grams;
}

}  // namespace quip
