#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "quip/sketch.hpp"

namespace quip::service {

struct ServiceConfig {
    /// Requests with larger bodies are rejected with 413.
    std::size_t max_body_bytes = 8 * 1024 * 1024;
};

/// JSON-over-HTTP query surface for a set of loaded sketches. Sketches are
/// mounted before the listener starts and never change, so request handling
/// is stateless and runs concurrently without locks.
///
/// Endpoints:
///   GET  /health            -> {"status", "sketches": [...]}
///   POST /contains          {"sketch", "grams": [..]} -> {"bits": [..]}
///   POST /quip              {"sketch", "texts": [..]} -> {"results": [..]}
class QueryService {
public:
    explicit QueryService(ServiceConfig config = {});
    ~QueryService();

    QueryService(const QueryService&) = delete;
    QueryService& operator=(const QueryService&) = delete;

    /// Mount a sketch under `name`. Call before serving.
    void add_sketch(std::string name, BloomSketch sketch);

    std::vector<std::string> sketch_names() const;

    /// Serves until stop(); returns false when the port cannot be bound.
    bool serve(const std::string& host, int port);

    /// Binds an OS-chosen port, serves on a background thread, and returns
    /// the port once the listener is ready.
    int start_background(const std::string& host);

    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace quip::service
