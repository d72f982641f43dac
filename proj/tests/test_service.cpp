#include <doctest.h>

#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "quip/score.hpp"
#include "service.hpp"
#include "support/corpus.hpp"

using nlohmann::json;
using quip::BloomSketch;
using quip::NgramConfig;
using quip::plan_sketch;
using quip::service::QueryService;
using quip::service::ServiceConfig;

namespace {

std::string fixture_doc() {
    std::mt19937_64 rng(8601);
    return quip::test::synthetic_text(rng, 300);
}

BloomSketch fixture_sketch() {
    auto sketch = BloomSketch::from_plan(plan_sketch(1000, 1e-4), NgramConfig{}, "wiki-toy");
    const std::string doc = fixture_doc();
    quip::for_each_gram(doc, 25, 1, [&](std::string_view w, std::size_t) { sketch.insert(w); });
    return sketch;
}

struct RunningService {
    QueryService service;
    int port = 0;

    explicit RunningService(ServiceConfig config = {}) : service(config) {
        service.add_sketch("wiki", fixture_sketch());
        port = service.start_background("127.0.0.1");
        REQUIRE(port > 0);
    }
    ~RunningService() { service.stop(); }

    httplib::Client client() { return httplib::Client("127.0.0.1", port); }
};

}  // namespace

TEST_CASE("health lists mounted sketches") {
    RunningService running;
    auto client = running.client();
    const auto res = client.Get("/health");
    REQUIRE(res);
    CHECK(res->status == 200);
    const json body = json::parse(res->body);
    CHECK(body["status"] == "ok");
    REQUIRE(body["sketches"].size() == 1);
    CHECK(body["sketches"][0]["name"] == "wiki");
    CHECK(body["sketches"][0]["corpus_label"] == "wiki-toy");
    CHECK(body["sketches"][0]["ngram_width"] == 25);
}

TEST_CASE("quip endpoint scores indexed text as 1.0") {
    RunningService running;
    auto client = running.client();
    const std::string quote = fixture_doc().substr(10, 80);
    const json req = {{"sketch", "wiki"}, {"texts", {quote, "short"}}};
    const auto res = client.Post("/quip", req.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    const json body = json::parse(res->body);
    REQUIRE(body["results"].size() == 2);
    CHECK(body["results"][0]["score"] == 1.0);
    CHECK(body["results"][0]["score_x100"] == 100.0);
    CHECK(body["results"][0]["total_grams"] == 80 - 25 + 1);
    CHECK(body["results"][0]["spans"].size() == 1);
    CHECK(body["results"][1]["score"].is_null());  // below one window
}

TEST_CASE("contains endpoint answers per gram") {
    RunningService running;
    auto client = running.client();
    const std::string doc = fixture_doc();
    const std::string member = doc.substr(0, 25);
    const json req = {{"sketch", "wiki"},
                      {"grams", {member, std::string(25, 'Z') + "!!!"}}};
    const auto res = client.Post("/contains", req.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    const json body = json::parse(res->body);
    REQUIRE(body["bits"].size() == 2);
    CHECK(body["bits"][0] == true);
    CHECK(body["bits"][1] == false);
}

TEST_CASE("unknown sketch name is a 404 with an error body") {
    RunningService running;
    auto client = running.client();
    const json req = {{"sketch", "nope"}, {"texts", {"whatever"}}};
    const auto res = client.Post("/quip", req.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 404);
    const json body = json::parse(res->body);
    CHECK(std::string(body["error"]).find("nope") != std::string::npos);
}

TEST_CASE("malformed bodies are 400s") {
    RunningService running;
    auto client = running.client();
    for (const std::string bad : {"{not json", "[1,2,3]", "{\"sketch\": \"wiki\"}",
                                  "{\"sketch\": \"wiki\", \"texts\": \"not-an-array\"}"}) {
        const auto res = client.Post("/quip", bad, "application/json");
        REQUIRE(res);
        CHECK(res->status == 400);
    }
}

TEST_CASE("oversized payloads are rejected with 413") {
    ServiceConfig config;
    config.max_body_bytes = 1024;
    RunningService running(config);
    auto client = running.client();
    const json req = {{"sketch", "wiki"}, {"texts", {std::string(4096, 'x')}}};
    const auto res = client.Post("/quip", req.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 413);
}

TEST_CASE("64 concurrent calls match serial results") {
    RunningService running;
    const std::string doc = fixture_doc();
    const json req = {{"sketch", "wiki"},
                      {"texts", {doc.substr(0, 60), doc.substr(100, 90), "unrelated text that "
                                                                         "is long enough to "
                                                                         "window properly"}}};
    const std::string req_body = req.dump();

    auto serial_client = running.client();
    const auto serial = serial_client.Post("/quip", req_body, "application/json");
    REQUIRE(serial);
    const std::string expected = serial->body;

    std::vector<std::thread> threads;
    std::vector<std::string> bodies(64);
    std::vector<int> statuses(64, 0);
    for (int i = 0; i < 64; ++i) {
        threads.emplace_back([&, i] {
            httplib::Client client("127.0.0.1", running.port);
            const auto res = client.Post("/quip", req_body, "application/json");
            if (res) {
                statuses[i] = res->status;
                bodies[i] = res->body;
            }
        });
    }
    for (auto& t : threads) t.join();
    for (int i = 0; i < 64; ++i) {
        CHECK(statuses[i] == 200);
        CHECK(bodies[i] == expected);
    }
}
