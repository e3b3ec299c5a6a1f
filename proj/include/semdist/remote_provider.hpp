#pragma once

#include "semdist/count_provider.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

namespace semdist {

struct RemoteEndpointConfig {
    // Full URL with exactly one `{q}` placeholder for the percent-encoded
    // query, e.g. "http://host:8080/search?q={q}".
    std::string url_template;
    // Dotted path into the JSON response ("searchInformation.totalResults",
    // numeric segments index arrays). Empty means the whole body is the count.
    std::string count_path;
    int min_interval_ms = 1000;
    int max_retries = 3;
    // N for total queries; remote engines do not answer "how many pages do
    // you index" directly.
    std::optional<uint64_t> total_count;
};

// HTTP hit-count client. Requests are serialized and rate limited to
// min_interval_ms; failures retry with doubling backoff. Single terms are
// sent quoted ("term"), pairs as two quoted terms joined by a space.
class RemoteProvider : public CountProvider {
public:
    explicit RemoteProvider(RemoteEndpointConfig cfg);

    std::string_view name() const override { return "remote"; }

    // Exposed for tests: query string built for a count query.
    static std::string query_text(const CountQuery& query);

protected:
    uint64_t fetch(const CountQuery& query) override;

private:
    void rate_limit_wait();

    RemoteEndpointConfig cfg_;
    std::chrono::steady_clock::time_point last_request_{};
    bool any_request_ = false;
};

// Parses a count out of a JSON document via a dotted path; accepts integer,
// float, and digit-string values. Throws ParseError.
uint64_t extract_count(const std::string& body, const std::string& count_path);

} // namespace semdist
