#include "service.hpp"

#include <thread>
#include <utility>

// Default backlog of 5 drops connections under concurrent load.
#define CPPHTTPLIB_LISTEN_BACKLOG 128
#include <httplib.h>
#include <json.hpp>

#include "quip/score.hpp"

namespace quip::service {

namespace {

using nlohmann::json;

void reply_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
    reply_json(res, status, json{{"error", message}});
}

json spans_to_json(const std::vector<Span>& spans) {
    json arr = json::array();
    for (const Span& s : spans) arr.push_back(json::array({s.begin, s.end}));
    return arr;
}

}  // namespace

struct QueryService::Impl {
    ServiceConfig config;
    std::map<std::string, BloomSketch> sketches;
    httplib::Server server;
    std::thread background;

    const BloomSketch* find(const json& body, httplib::Response& res) {
        if (!body.contains("sketch") || !body["sketch"].is_string()) {
            reply_error(res, 400, "body needs a \"sketch\" name");
            return nullptr;
        }
        const std::string name = body["sketch"].get<std::string>();
        auto it = sketches.find(name);
        if (it == sketches.end()) {
            reply_error(res, 404, "unknown sketch: " + name);
            return nullptr;
        }
        return &it->second;
    }

    void route() {
        server.set_payload_max_length(config.max_body_bytes);

        server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            json list = json::array();
            for (const auto& [name, sketch] : sketches) {
                list.push_back({
                    {"name", name},
                    {"corpus_label", sketch.corpus_label()},
                    {"bits", sketch.bit_count()},
                    {"num_hashes", sketch.num_hashes()},
                    {"inserted_count", sketch.inserted_count()},
                    {"ngram_width", sketch.ngram().width},
                    {"ngram_stride", sketch.ngram().stride},
                    {"normalization", std::string(to_string(sketch.ngram().normalization))},
                });
            }
            reply_json(res, 200, json{{"status", "ok"}, {"sketches", std::move(list)}});
        });

        server.Post("/contains", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
            if (body.is_discarded() || !body.is_object()) {
                return reply_error(res, 400, "malformed JSON body");
            }
            const BloomSketch* sketch = find(body, res);
            if (sketch == nullptr) return;
            if (!body.contains("grams") || !body["grams"].is_array()) {
                return reply_error(res, 400, "body needs a \"grams\" array");
            }
            json bits = json::array();
            for (const json& gram : body["grams"]) {
                if (!gram.is_string()) {
                    return reply_error(res, 400, "grams must be strings");
                }
                bits.push_back(sketch->contains(gram.get<std::string>()));
            }
            reply_json(res, 200, json{{"bits", std::move(bits)}});
        });

        server.Post("/quip", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
            if (body.is_discarded() || !body.is_object()) {
                return reply_error(res, 400, "malformed JSON body");
            }
            const BloomSketch* sketch = find(body, res);
            if (sketch == nullptr) return;
            if (!body.contains("texts") || !body["texts"].is_array()) {
                return reply_error(res, 400, "body needs a \"texts\" array");
            }
            json results = json::array();
            for (const json& text : body["texts"]) {
                if (!text.is_string()) {
                    return reply_error(res, 400, "texts must be strings");
                }
                const QuipResult r = quip_score(text.get<std::string>(), *sketch);
                json item = {
                    {"total_grams", r.total_grams},
                    {"hit_grams", r.hit_grams},
                    {"spans", spans_to_json(r.spans)},
                };
                if (r.score.has_value()) {
                    item["score"] = *r.score;
                    item["score_x100"] = *r.score * 100.0;
                } else {
                    item["score"] = nullptr;
                    item["score_x100"] = nullptr;
                }
                results.push_back(std::move(item));
            }
            reply_json(res, 200, json{{"results", std::move(results)}});
        });
    }
};

QueryService::QueryService(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = config;
}

QueryService::~QueryService() { stop(); }

void QueryService::add_sketch(std::string name, BloomSketch sketch) {
    impl_->sketches.insert_or_assign(std::move(name), std::move(sketch));
}

std::vector<std::string> QueryService::sketch_names() const {
    std::vector<std::string> names;
    names.reserve(impl_->sketches.size());
    for (const auto& [name, _] : impl_->sketches) names.push_back(name);
    return names;
}

bool QueryService::serve(const std::string& host, int port) {
    impl_->route();
    return impl_->server.listen(host, port);
}

int QueryService::start_background(const std::string& host) {
    impl_->route();
    const int port = impl_->server.bind_to_any_port(host);
    if (port < 0) return port;
    impl_->background = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

void QueryService::stop() {
    impl_->server.stop();
    if (impl_->background.joinable()) impl_->background.join();
}

}  // namespace quip::service
