#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "quip/score.hpp"
#include "quip/sketch.hpp"

namespace {

std::string random_text(std::size_t length, std::uint64_t seed) {
    static constexpr char kAlphabet[] = "abcdefghijklmnopqrstuvwxyz      ,.";
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, sizeof(kAlphabet) - 2);
    std::string text;
    text.reserve(length);
    for (std::size_t i = 0; i < length; ++i) text.push_back(kAlphabet[pick(rng)]);
    return text;
}

quip::BloomSketch make_sketch(std::uint64_t items, double fpr) {
    auto sketch = quip::BloomSketch::from_plan(quip::plan_sketch(items, fpr), quip::NgramConfig{},
                                               "bench");
    const std::string corpus = random_text(items + 24, 7);
    quip::for_each_gram(corpus, 25, 1,
                        [&](std::string_view w, std::size_t) { sketch.insert(w); });
    return sketch;
}

void BM_Murmur3Gram(benchmark::State& state) {
    const std::string text = random_text(25, 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(quip::hash::murmur3_x64_128(text, 42));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) * 25);
}
BENCHMARK(BM_Murmur3Gram);

void BM_SketchInsert(benchmark::State& state) {
    auto sketch = quip::BloomSketch::from_plan(
        quip::plan_sketch(static_cast<std::uint64_t>(state.range(0)), 0.01), quip::NgramConfig{},
        "bench");
    const std::string corpus = random_text(static_cast<std::size_t>(state.range(0)) + 24, 3);
    std::vector<quip::hash::Hash128> hashes;
    quip::for_each_gram(corpus, 25, 1, [&](std::string_view w, std::size_t) {
        hashes.push_back(sketch.hash_gram(w));
    });
    std::size_t i = 0;
    for (auto _ : state) {
        sketch.insert_hashed(hashes[i]);
        i = (i + 1) % hashes.size();
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SketchInsert)->Arg(1 << 16)->Arg(1 << 22);

void BM_SketchContains(benchmark::State& state) {
    const auto sketch = make_sketch(1 << 20, 0.01);
    const std::string probes = random_text(4096 + 24, 13);
    std::vector<quip::hash::Hash128> hashes;
    quip::for_each_gram(probes, 25, 1, [&](std::string_view w, std::size_t) {
        hashes.push_back(sketch.hash_gram(w));
    });
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sketch.contains_hashed(hashes[i]));
        i = (i + 1) % hashes.size();
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SketchContains);

void BM_QuipScore1k(benchmark::State& state) {
    const auto sketch = make_sketch(1 << 20, 0.01);
    const std::string text = random_text(1000, 17);
    for (auto _ : state) {
        benchmark::DoNotOptimize(quip::quip_score(text, sketch));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QuipScore1k);

}  // namespace

BENCHMARK_MAIN();
