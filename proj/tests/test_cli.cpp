#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "quip/score.hpp"
#include "quip/sketch.hpp"
#include "support/oracle.hpp"
#include "support/tmpdir.hpp"

using nlohmann::json;
using quip::test::TempDir;

namespace {

struct CliResult {
    int code = -1;
    std::string output;  // stdout and stderr combined
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(QUIP_CLI_PATH) + " " + args + " 2>&1";
    CliResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
    const int status = pclose(pipe);
    result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::filesystem::path data_file(const std::string& name) {
    return std::filesystem::path(QUIP_TEST_DATA_DIR) / name;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string first_corpus_text() {
    std::ifstream in(data_file("toy_corpus.jsonl"));
    std::string line;
    REQUIRE(std::getline(in, line));
    return json::parse(line)["text"].get<std::string>();
}

/// Builds a toy sketch once per test binary run.
const std::filesystem::path& shared_sketch() {
    static TempDir tmp;
    static std::filesystem::path path = [&] {
        const auto out = tmp.file("toy.quipsk");
        const CliResult r = run_cli("build --corpus " + data_file("toy_corpus.jsonl").string() +
                                    " --format jsonl --out " + out.string() +
                                    " --expected-items 4000 --target-fpr 0.000001" +
                                    " --label toy-corpus");
        REQUIRE(r.code == 0);
        return out;
    }();
    return path;
}

}  // namespace

TEST_CASE("build writes a sketch and prints stats") {
    TempDir tmp;
    const auto out = tmp.file("s.quipsk");
    const CliResult r = run_cli("build --corpus " + data_file("toy_corpus.jsonl").string() +
                                " --format jsonl --out " + out.string() +
                                " --expected-items 4000 --label demo");
    CHECK(r.code == 0);
    CHECK(std::filesystem::exists(out));
    CHECK(r.output.find("grams inserted") != std::string::npos);
    CHECK(r.output.find("estimated fpr") != std::string::npos);

    const quip::SketchInfo info = quip::read_sketch_info(out);
    CHECK(info.corpus_label == "demo");
    CHECK(info.inserted_count > 0);
}

TEST_CASE("build rejects an impossible false-positive target as usage") {
    TempDir tmp;
    const CliResult r = run_cli("build --corpus " + data_file("toy_corpus.jsonl").string() +
                                " --out " + tmp.file("x.quipsk").string() +
                                " --expected-items 100 --target-fpr 2.0");
    CHECK(r.code == 2);
}

TEST_CASE("shard count does not change the output file") {
    TempDir tmp;
    const std::string base = "build --corpus " + data_file("toy_corpus.jsonl").string() +
                             " --format jsonl --expected-items 4000 --label same";
    const auto one = tmp.file("one.quipsk");
    const auto four = tmp.file("four.quipsk");
    CHECK(run_cli(base + " --out " + one.string() + " --shards 1").code == 0);
    CHECK(run_cli(base + " --out " + four.string() + " --shards 4").code == 0);
    CHECK(slurp(one) == slurp(four));
}

TEST_CASE("score reports 1.0 for an indexed document") {
    TempDir tmp;
    const auto text_file = tmp.file("doc.txt");
    std::ofstream(text_file, std::ios::binary) << first_corpus_text();

    const CliResult r =
        run_cli("score --sketch " + shared_sketch().string() + " " + text_file.string());
    CHECK(r.code == 0);
    CHECK(r.output.find("1.0000") != std::string::npos);
    CHECK(r.output.find("macro 1.0000") != std::string::npos);
}

TEST_CASE("scoring an empty file is a data error") {
    TempDir tmp;
    const auto empty = tmp.file("empty.txt");
    std::ofstream(empty, std::ios::binary);
    const CliResult r =
        run_cli("score --sketch " + shared_sketch().string() + " " + empty.string());
    CHECK(r.code == 4);
    CHECK(r.output.find("empty input") != std::string::npos);
}

TEST_CASE("score --json matches an independent oracle over the fixture generations") {
    // Oracle: exact gram set over the toy corpus.
    quip::test::ExactGramSet oracle((quip::NgramConfig()));
    {
        std::ifstream in(data_file("toy_corpus.jsonl"));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            oracle.add_document(json::parse(line)["text"].get<std::string>());
        }
    }

    const CliResult r = run_cli("score --sketch " + shared_sketch().string() + " --format jsonl" +
                                " --text-field output --json " +
                                data_file("generations.jsonl").string());
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.output);
    REQUIRE(doc["texts"].size() > 0);

    std::ifstream gen_in(data_file("generations.jsonl"));
    std::string line;
    std::size_t i = 0;
    while (std::getline(gen_in, line)) {
        if (line.empty()) continue;
        const std::string text = json::parse(line)["output"].get<std::string>();
        const double expected = oracle.score(text);
        const json& got = doc["texts"][i++];
        if (expected < 0) {
            CHECK(got["score"].is_null());
        } else {
            CHECK(got["score"].get<double>() == expected);
        }
    }
    CHECK(i == doc["texts"].size());
}

TEST_CASE("highlight spans equal the library computation") {
    TempDir tmp;
    const std::string text = first_corpus_text().substr(5, 90) + " and some novel trailing text";
    const auto text_file = tmp.file("t.txt");
    std::ofstream(text_file, std::ios::binary) << text;

    const CliResult r = run_cli("highlight --sketch " + shared_sketch().string() + " --json " +
                                text_file.string());
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.output);

    const quip::BloomSketch sketch = quip::load_sketch(shared_sketch());
    const quip::QuipResult expected = quip::quip_score(text, sketch);
    REQUIRE(doc["spans"].size() == expected.spans.size());
    for (std::size_t i = 0; i < expected.spans.size(); ++i) {
        CHECK(doc["spans"][i][0] == expected.spans[i].begin);
        CHECK(doc["spans"][i][1] == expected.spans[i].end);
    }
    CHECK(doc["hit_grams"] == expected.hit_grams);

    SUBCASE("no-hit text comes back unmarked") {
        const CliResult plain = run_cli("highlight --sketch " + shared_sketch().string() +
                                        " --text \"nothing from the corpus appears here at "
                                        "all in this sentence\"");
        REQUIRE(plain.code == 0);
        CHECK(plain.output.find("\x1b[35m") == std::string::npos);
    }
    SUBCASE("fully quoted text is fully marked") {
        const auto quoted_file = tmp.file("q.txt");
        std::ofstream(quoted_file, std::ios::binary) << first_corpus_text().substr(0, 80);
        const CliResult marked = run_cli("highlight --sketch " + shared_sketch().string() + " " +
                                         quoted_file.string());
        REQUIRE(marked.code == 0);
        CHECK(marked.output.rfind("\x1b[35m", 0) == 0);  // opens at the start
    }
}

TEST_CASE("eval produces a grounded-beats-null report") {
    const CliResult r = run_cli("eval --sketch " + shared_sketch().string() + " --generations " +
                                data_file("generations.jsonl").string() + " --format json");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.output);
    REQUIRE(doc["rows"].size() >= 2);
    CHECK(doc["rows"][0]["prompt_id"] == "null");
    CHECK(doc["rows"][0]["delta_quip_vs_null"] == 0.0);

    double null_macro = doc["rows"][0]["quip_macro"].get<double>();
    bool found_grounded = false;
    for (const auto& row : doc["rows"]) {
        if (row["prompt_id"] == "attributed") {
            found_grounded = true;
            CHECK(row["quip_macro"].get<double>() > null_macro + 0.2);
            CHECK(row["quip_direction"] == "gain");
        }
    }
    CHECK(found_grounded);

    SUBCASE("table and json carry the same numbers") {
        const CliResult table = run_cli("eval --sketch " + shared_sketch().string() +
                                        " --generations " +
                                        data_file("generations.jsonl").string());
        REQUIRE(table.code == 0);
        for (const auto& row : doc["rows"]) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.4f", row["quip_macro"].get<double>());
            CHECK(table.output.find(buf) != std::string::npos);
        }
    }
    SUBCASE("popularity bins from cooccurrence counts") {
        const CliResult bins = run_cli("eval --sketch " + shared_sketch().string() +
                                       " --generations " +
                                       data_file("generations.jsonl").string() +
                                       " --format json --bins --bins-prompt attributed");
        REQUIRE(bins.code == 0);
        const json bdoc = json::parse(bins.output);
        REQUIRE(bdoc.contains("popularity_bins"));
        std::uint64_t total = 0;
        for (const auto& bin : bdoc["popularity_bins"]) {
            total += bin["grounding"]["n"].get<std::uint64_t>();
        }
        CHECK(total == 6);  // one pair per fixture question
    }
}

TEST_CASE("eval without a null-prompt row is a data error") {
    TempDir tmp;
    const auto gen = tmp.file("no_null.jsonl");
    std::ofstream(gen) << R"({"id":"a","dataset":"eli5","prompt_id":"attributed",)"
                       << R"("question":"?","output":"text long enough to have many windows )"
                       << R"(but no null row","golds":["g"]})" << "\n";
    const CliResult r = run_cli("eval --sketch " + shared_sketch().string() + " --generations " +
                                gen.string());
    CHECK(r.code == 4);
    CHECK(r.output.find("null") != std::string::npos);
}

TEST_CASE("eval --dump-catalog prints the stock prompts") {
    const CliResult r = run_cli("eval --dump-catalog");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.output);
    CHECK(doc.size() == 12);
}

TEST_CASE("inspect prints the header and survives --json") {
    const CliResult r = run_cli("inspect " + shared_sketch().string());
    REQUIRE(r.code == 0);
    CHECK(r.output.find("murmur3_x64_128") != std::string::npos);
    CHECK(r.output.find("toy-corpus") != std::string::npos);

    const CliResult j = run_cli("inspect --json --full " + shared_sketch().string());
    REQUIRE(j.code == 0);
    const json doc = json::parse(j.output);
    CHECK(doc["ngram_width"] == 25);
    CHECK(doc["fill_fraction"].get<double>() > 0.0);
}

TEST_CASE("inspect rejects a corrupted file as a data error") {
    const CliResult r = run_cli("inspect " + data_file("fixture_badmagic.quipsk").string());
    CHECK(r.code == 4);
    CHECK(r.output.find("magic") != std::string::npos);
}

TEST_CASE("usage errors exit with the usage code") {
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("score").code == 2);           // missing required options
    CHECK(run_cli("build --corpus x").code == 2);
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("io errors exit with the io code") {
    const CliResult r = run_cli("score --sketch /no/such/sketch.quipsk /etc/hostname");
    CHECK(r.code == 3);
}
