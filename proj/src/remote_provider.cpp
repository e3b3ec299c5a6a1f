#include "semdist/remote_provider.hpp"

#include "semdist/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <thread>

namespace semdist {

namespace {

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string path;   // path + query, starts with '/'
};

SplitUrl split_url(const std::string& url) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        fail(ErrorKind::InvalidParameter, "url_template needs a scheme: " + url);
    size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos)
        return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

} // namespace

RemoteProvider::RemoteProvider(RemoteEndpointConfig cfg) : cfg_(std::move(cfg)) {
    size_t first = cfg_.url_template.find("{q}");
    if (first == std::string::npos ||
        cfg_.url_template.find("{q}", first + 1) != std::string::npos)
        fail(ErrorKind::InvalidParameter, "url_template must contain exactly one {q}");
    if (cfg_.min_interval_ms < 0)
        fail(ErrorKind::InvalidParameter, "min_interval must be >= 0");
    if (cfg_.max_retries < 0)
        fail(ErrorKind::InvalidParameter, "max_retries must be >= 0");
}

std::string RemoteProvider::query_text(const CountQuery& query) {
    switch (query.kind) {
    case QueryKind::single:
        return "\"" + query.term1 + "\"";
    case QueryKind::pair:
        return "\"" + query.term1 + "\" \"" + query.term2 + "\"";
    case QueryKind::total:
        return "";
    }
    return "";
}

void RemoteProvider::rate_limit_wait() {
    if (cfg_.min_interval_ms <= 0)
        return;
    auto interval = std::chrono::milliseconds(cfg_.min_interval_ms);
    auto now = std::chrono::steady_clock::now();
    if (any_request_ && now < last_request_ + interval)
        std::this_thread::sleep_until(last_request_ + interval);
}

uint64_t RemoteProvider::fetch(const CountQuery& query) {
    if (query.kind == QueryKind::total) {
        if (cfg_.total_count)
            return *cfg_.total_count;
        fail(ErrorKind::UpstreamError,
             "remote endpoint has no configured N; set total_count");
    }

    std::string url = cfg_.url_template;
    size_t pos = url.find("{q}");
    url.replace(pos, 3, percent_encode(query_text(query)));
    SplitUrl parts = split_url(url);

    std::string last_error;
    int attempts = cfg_.max_retries + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            int base = cfg_.min_interval_ms > 0 ? cfg_.min_interval_ms : 100;
            std::this_thread::sleep_for(std::chrono::milliseconds(base << (attempt - 1)));
        }
        rate_limit_wait();
        httplib::Client client(parts.origin);
        client.set_connection_timeout(10);
        client.set_read_timeout(30);
        auto res = client.Get(parts.path);
        last_request_ = std::chrono::steady_clock::now();
        any_request_ = true;
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }
        return extract_count(res->body, cfg_.count_path);
    }
    fail(ErrorKind::UpstreamError, "gave up after " + std::to_string(attempts) +
                                       " attempts (" + last_error + ") for " + url);
}

uint64_t extract_count(const std::string& body, const std::string& count_path) {
    auto as_count = [](const nlohmann::json& node) -> uint64_t {
        if (node.is_number_unsigned())
            return node.get<uint64_t>();
        if (node.is_number_integer()) {
            auto v = node.get<int64_t>();
            if (v < 0)
                fail(ErrorKind::ParseError, "negative count in response");
            return static_cast<uint64_t>(v);
        }
        if (node.is_number_float()) {
            double v = node.get<double>();
            if (v < 0 || !std::isfinite(v))
                fail(ErrorKind::ParseError, "non-finite or negative count in response");
            return static_cast<uint64_t>(std::llround(v));
        }
        if (node.is_string()) {
            unsigned long long v = 0;
            if (!parse_u64(node.get<std::string>(), v))
                fail(ErrorKind::ParseError,
                     "count string is not a number: " + node.get<std::string>());
            return v;
        }
        fail(ErrorKind::ParseError, "count node is not numeric: " + node.dump());
    };

    if (count_path.empty()) {
        std::string trimmed = normalize_term(body);
        unsigned long long v = 0;
        if (!parse_u64(trimmed, v))
            fail(ErrorKind::ParseError, "response body is not a bare count");
        return v;
    }

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, std::string("bad JSON response: ") + e.what());
    }
    nlohmann::json node = doc;
    for (const std::string& seg : split(count_path, '.')) {
        if (node.is_array()) {
            unsigned long long idx = 0;
            if (!parse_u64(seg, idx) || idx >= node.size())
                fail(ErrorKind::ParseError, "count_path index '" + seg + "' out of range");
            node = node[idx];
        } else if (node.is_object()) {
            if (!node.contains(seg))
                fail(ErrorKind::ParseError, "count_path key '" + seg + "' missing");
            node = node[seg];
        } else {
            fail(ErrorKind::ParseError, "count_path descends into scalar at '" + seg + "'");
        }
    }
    return as_count(node);
}

} // namespace semdist
