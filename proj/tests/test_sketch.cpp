#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "quip/sketch.hpp"
#include "support/corpus.hpp"
#include "support/tmpdir.hpp"

using quip::BloomSketch;
using quip::FormatError;
using quip::FormatFault;
using quip::NgramConfig;
using quip::plan_sketch;
using quip::SketchPlan;

namespace {

std::string random_gram(std::mt19937_64& rng, std::size_t len = 25) {
    std::string g(len, '\0');
    for (char& c : g) c = static_cast<char>('a' + rng() % 26);
    return g;
}

BloomSketch small_sketch(std::uint64_t items = 10000, double fpr = 0.01) {
    return BloomSketch::from_plan(plan_sketch(items, fpr), NgramConfig{}, "test-corpus");
}

}  // namespace

TEST_CASE("sizing formula matches high-precision evaluation") {
    SUBCASE("one million items at 1%") {
        const SketchPlan p = plan_sketch(1'000'000, 0.01);
        CHECK(p.bits >= 9'585'058);
        CHECK(p.bits <= 9'585'060);
        CHECK(p.num_hashes == 7);
    }
    SUBCASE("boundary: one item at 0.5") {
        const SketchPlan p = plan_sketch(1, 0.5);
        CHECK(p.bits == 2);
        CHECK(p.num_hashes == 1);
    }
    SUBCASE("ten thousand items at 0.1%") {
        const SketchPlan p = plan_sketch(10'000, 0.001);
        CHECK(p.bits == 143'776);
        CHECK(p.num_hashes == 10);
    }
}

TEST_CASE("plan rejects out-of-range arguments") {
    CHECK_THROWS_AS(plan_sketch(0, 0.01), quip::InvalidArgument);
    CHECK_THROWS_AS(plan_sketch(100, 0.0), quip::InvalidArgument);
    CHECK_THROWS_AS(plan_sketch(100, 0.6), quip::InvalidArgument);
    CHECK_THROWS_AS(plan_sketch(100, 2.0), quip::InvalidArgument);
    CHECK_THROWS_AS(plan_sketch(100, -0.1), quip::InvalidArgument);
}

TEST_CASE("tiny plans are raised to the 64-bit floor") {
    const BloomSketch s = BloomSketch::from_plan(plan_sketch(1, 0.5), NgramConfig{}, "");
    CHECK(s.bit_count() == 64);
}

TEST_CASE("inserted grams always report present") {
    BloomSketch s = small_sketch();
    std::mt19937_64 rng(123);
    std::vector<std::string> grams;
    for (int i = 0; i < 5000; ++i) grams.push_back(random_gram(rng));
    for (const auto& g : grams) s.insert(g);
    for (const auto& g : grams) CHECK(s.contains(g));
    CHECK(s.inserted_count() == grams.size());
}

TEST_CASE("fresh sketch contains nothing") {
    const BloomSketch s = small_sketch();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) CHECK_FALSE(s.contains(random_gram(rng)));
    CHECK(s.set_bit_count() == 0);
    CHECK(s.estimate_fpr() == 0.0);
}

TEST_CASE("insert is idempotent with respect to membership and bits") {
    BloomSketch s = small_sketch();
    s.insert("the same gram of twenty-five");
    const auto words_after_one = s.words();
    s.insert("the same gram of twenty-five");
    CHECK(s.words() == words_after_one);
    CHECK(s.contains("the same gram of twenty-five"));
    CHECK(s.inserted_count() == 2);  // counts calls, not distinct items
}

TEST_CASE("measured FPR stays within twice the target") {
    const std::uint64_t n = 20000;
    const double target = 0.01;
    BloomSketch s = BloomSketch::from_plan(plan_sketch(n, target), NgramConfig{}, "");

    std::mt19937_64 rng(2024);
    std::unordered_set<std::string> members;
    while (members.size() < n) members.insert(random_gram(rng));
    for (const auto& g : members) s.insert(g);

    std::size_t false_positives = 0;
    const std::size_t probes = 100000;
    for (std::size_t i = 0; i < probes; ++i) {
        std::string g = random_gram(rng);
        while (members.count(g)) g = random_gram(rng);
        if (s.contains(g)) ++false_positives;
    }
    const double measured = static_cast<double>(false_positives) / probes;
    CHECK(measured <= 2 * target);
    // estimate_fpr at the planned fill should agree with the measurement.
    CHECK(s.estimate_fpr() <= 3 * target);
    CHECK(measured <= 3 * s.estimate_fpr() + 0.001);
}

TEST_CASE("estimate_fpr extremes") {
    BloomSketch s(128, 4, 1, NgramConfig{}, "");
    CHECK(s.estimate_fpr() == 0.0);
    std::mt19937_64 rng(77);
    while (s.set_bit_count() < 128) s.insert(random_gram(rng));
    CHECK(s.fill_fraction() == 1.0);
    CHECK(s.estimate_fpr() == 1.0);
}

TEST_CASE("merge ORs bits and adds counts") {
    BloomSketch a = small_sketch();
    BloomSketch b = small_sketch();
    std::mt19937_64 rng(9);
    std::vector<std::string> in_a, in_b;
    for (int i = 0; i < 200; ++i) in_a.push_back(random_gram(rng));
    for (int i = 0; i < 300; ++i) in_b.push_back(random_gram(rng));
    for (const auto& g : in_a) a.insert(g);
    for (const auto& g : in_b) b.insert(g);

    const BloomSketch ab = merge(a, b);
    for (const auto& g : in_a) CHECK(ab.contains(g));
    for (const auto& g : in_b) CHECK(ab.contains(g));
    CHECK(ab.inserted_count() == a.inserted_count() + b.inserted_count());

    SUBCASE("commutes bit for bit") {
        const BloomSketch ba = merge(b, a);
        CHECK(ab.words() == ba.words());
        CHECK(ab.inserted_count() == ba.inserted_count());
    }
    SUBCASE("merging with empty is the identity on bits") {
        const BloomSketch with_empty = merge(a, small_sketch());
        CHECK(with_empty.words() == a.words());
    }
}

TEST_CASE("merge rejects parameter mismatches") {
    const BloomSketch base(1024, 4, 7, NgramConfig{}, "x");
    CHECK_THROWS_AS(merge(base, BloomSketch(2048, 4, 7, NgramConfig{}, "x")),
                    quip::MismatchError);
    CHECK_THROWS_AS(merge(base, BloomSketch(1024, 5, 7, NgramConfig{}, "x")),
                    quip::MismatchError);
    CHECK_THROWS_AS(merge(base, BloomSketch(1024, 4, 8, NgramConfig{}, "x")),
                    quip::MismatchError);
    NgramConfig other;
    other.width = 13;
    CHECK_THROWS_AS(merge(base, BloomSketch(1024, 4, 7, other, "x")), quip::MismatchError);
}

TEST_CASE("fingerprint-checked contains") {
    BloomSketch s = small_sketch();
    quip::Gram gram{std::string(25, 'q'), 0};
    s.insert(gram);
    CHECK(s.contains(gram, s.ngram()));
    NgramConfig other = s.ngram();
    other.width = 24;
    CHECK_THROWS_AS(s.contains(gram, other), quip::MismatchError);
}

TEST_CASE("save/load round trip is bit-exact") {
    quip::test::TempDir tmp;
    BloomSketch s = small_sketch();
    std::mt19937_64 rng(31);
    std::vector<std::string> members;
    for (int i = 0; i < 2000; ++i) members.push_back(random_gram(rng));
    for (const auto& g : members) s.insert(g);
    s.set_corpus_label("round-trip corpus");

    const auto path = tmp.file("sketch.quipsk");
    quip::save_sketch(s, path);
    const BloomSketch loaded = quip::load_sketch(path);

    CHECK(loaded == s);
    CHECK(loaded.corpus_label() == "round-trip corpus");
    CHECK(loaded.inserted_count() == s.inserted_count());

    // Identical answers on members and random probes.
    for (const auto& g : members) CHECK(loaded.contains(g));
    for (int i = 0; i < 10000; ++i) {
        const std::string g = random_gram(rng);
        CHECK(loaded.contains(g) == s.contains(g));
    }

    SUBCASE("save-load-save yields identical bytes") {
        const auto path2 = tmp.file("sketch2.quipsk");
        quip::save_sketch(loaded, path2);
        std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
        const std::string b1((std::istreambuf_iterator<char>(f1)),
                             std::istreambuf_iterator<char>());
        const std::string b2((std::istreambuf_iterator<char>(f2)),
                             std::istreambuf_iterator<char>());
        CHECK(b1 == b2);
        CHECK(!b1.empty());
    }
}

TEST_CASE("load rejects damaged files with the right fault") {
    quip::test::TempDir tmp;
    BloomSketch s = small_sketch(100, 0.01);
    s.insert(std::string(25, 'a'));
    const auto path = tmp.file("good.quipsk");
    quip::save_sketch(s, path);

    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    REQUIRE(bytes.size() > 64);

    auto load_from = [](const std::string& data) {
        std::istringstream stream(data);
        return quip::load_sketch(stream);
    };

    SUBCASE("corrupted magic") {
        std::string bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(load_from(bad), FormatError);
        try {
            load_from(bad);
        } catch (const FormatError& e) {
            CHECK(e.fault() == FormatFault::bad_magic);
        }
    }
    SUBCASE("unsupported version") {
        std::string bad = bytes;
        bad[8] = 99;
        try {
            load_from(bad);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.fault() == FormatFault::unsupported_version);
        }
    }
    SUBCASE("truncated payload") {
        for (std::size_t keep : {bytes.size() - 1, bytes.size() - 9, std::size_t{20},
                                 std::size_t{5}}) {
            try {
                load_from(bytes.substr(0, keep));
                FAIL("expected FormatError for length " << keep);
            } catch (const FormatError& e) {
                CHECK(e.fault() == FormatFault::truncated);
            }
        }
    }
    SUBCASE("flipped payload bit fails the checksum") {
        std::string bad = bytes;
        bad[bytes.size() - 20] = static_cast<char>(bad[bytes.size() - 20] ^ 0x10);
        try {
            load_from(bad);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.fault() == FormatFault::checksum_mismatch);
        }
    }
}

TEST_CASE("header can be inspected without the payload") {
    quip::test::TempDir tmp;
    NgramConfig config;
    config.width = 12;
    config.stride = 3;
    config.normalization = quip::Normalization::lowercase_collapse;
    BloomSketch s(4096, 5, 42, config, "header-probe");
    s.insert(std::string(12, 'z'));
    const auto path = tmp.file("s.quipsk");
    quip::save_sketch(s, path);

    const quip::SketchInfo info = quip::read_sketch_info(path);
    CHECK(info.bits == 4096);
    CHECK(info.num_hashes == 5);
    CHECK(info.seed == 42);
    CHECK(info.hash_id == "murmur3_x64_128");
    CHECK(info.ngram.width == 12);
    CHECK(info.ngram.stride == 3);
    CHECK(info.ngram.normalization == quip::Normalization::lowercase_collapse);
    CHECK(info.corpus_label == "header-probe");
    CHECK(info.inserted_count == 1);
    CHECK(info.ngram_fingerprint == config.fingerprint());
}

TEST_CASE("committed fixture loads with pinned probe answers") {
    // Written once by tests/make_fixtures.cpp; guards cross-platform and
    // cross-release stability of the file format and hash.
    const std::filesystem::path path =
        std::filesystem::path(QUIP_TEST_DATA_DIR) / "fixture.quipsk";
    const BloomSketch s = quip::load_sketch(path);
    CHECK(s.bit_count() >= 64);
    CHECK(s.corpus_label() == "fixture-corpus-v1");

    std::ifstream probes_file(std::filesystem::path(QUIP_TEST_DATA_DIR) / "fixture_probes.txt");
    REQUIRE(probes_file.good());
    std::string line;
    std::size_t checked = 0;
    while (std::getline(probes_file, line)) {
        if (line.empty()) continue;
        REQUIRE(line.size() > 2);
        const bool expected = line[0] == '1';
        const std::string gram = line.substr(2);
        CHECK(s.contains(gram) == expected);
        ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("megabyte-scale round trip keeps every probe answer") {
    quip::test::TempDir tmp;
    // ~1 MB of bit array.
    BloomSketch s = BloomSketch::from_plan(plan_sketch(900000, 0.01), NgramConfig{}, "big");
    std::mt19937_64 rng(404);
    std::vector<std::string> grams;
    for (int i = 0; i < 20000; ++i) grams.push_back(random_gram(rng));
    for (const auto& g : grams) s.insert(g);

    const auto path = tmp.file("big.quipsk");
    quip::save_sketch(s, path);
    const BloomSketch loaded = quip::load_sketch(path);
    for (int i = 0; i < 10000; ++i) {
        CHECK(loaded.contains(grams[static_cast<std::size_t>(i) % grams.size()]));
        const std::string probe = random_gram(rng);
        CHECK(loaded.contains(probe) == s.contains(probe));
    }
}
