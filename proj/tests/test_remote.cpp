#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "semdist/error.hpp"
#include "semdist/remote_provider.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <thread>

using namespace semdist;

namespace {

class TestServer {
public:
    explicit TestServer(std::function<void(const httplib::Request&, httplib::Response&)> handler)
        : handler_(std::move(handler)) {
        server_.Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
            ++requests_;
            handler_(req, res);
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~TestServer() {
        server_.stop();
        thread_.join();
    }

    std::string url_template() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/search?q={q}";
    }

    int requests() const { return requests_; }

private:
    std::function<void(const httplib::Request&, httplib::Response&)> handler_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    std::atomic<int> requests_{0};
};

RemoteEndpointConfig fast_config(const std::string& url, const std::string& count_path) {
    RemoteEndpointConfig cfg;
    cfg.url_template = url;
    cfg.count_path = count_path;
    cfg.min_interval_ms = 0;
    cfg.max_retries = 1;
    cfg.total_count = 1000000;
    return cfg;
}

} // namespace

TEST_CASE("query encoding: quoted single terms and quoted pairs") {
    std::string seen_single, seen_pair;
    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
        std::string q = req.get_param_value("q");
        if (q.find(' ') == std::string::npos)
            seen_single = q;
        else
            seen_pair = q;
        res.set_content("{\"count\": 7}", "application/json");
    });

    RemoteProvider provider(fast_config(server.url_template(), "count"));
    CHECK(provider.single_count("horse") == 7);
    CHECK(provider.pair_count("rider", "horse") == 7);
    CHECK(seen_single == "\"horse\"");
    CHECK(seen_pair == "\"horse\" \"rider\"");
}

TEST_CASE("count_path walks objects, arrays, and digit strings") {
    CHECK(extract_count(R"({"a":{"b":42}})", "a.b") == 42);
    CHECK(extract_count(R"({"items":[{"n":"123"}]})", "items.0.n") == 123);
    CHECK(extract_count(R"({"x": 99.0})", "x") == 99);
    CHECK(extract_count("  314\n", "") == 314);
    CHECK_THROWS_AS(extract_count(R"({"a":1})", "b"), Error);
    CHECK_THROWS_AS(extract_count("not json", "a"), Error);
    CHECK_THROWS_AS(extract_count(R"({"a":"x"})", "a"), Error);
    CHECK_THROWS_AS(extract_count(R"({"a":-5})", "a"), Error);
}

TEST_CASE("string-encoded counts parse") {
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"searchInformation":{"totalResults":"8058044651"}})",
                        "application/json");
    });
    RemoteProvider provider(
        fast_config(server.url_template(), "searchInformation.totalResults"));
    CHECK(provider.single_count("horse") == 8058044651ull);
}

TEST_CASE("retries recover from transient failures") {
    std::atomic<int> failures{2};
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        if (failures-- > 0) {
            res.status = 500;
            return;
        }
        res.set_content("{\"count\": 5}", "application/json");
    });
    RemoteEndpointConfig cfg = fast_config(server.url_template(), "count");
    cfg.max_retries = 3;
    RemoteProvider provider(cfg);
    CHECK(provider.single_count("horse") == 5);
    CHECK(server.requests() == 3);
    // retries are one logical fetch
    CHECK(provider.stats().fetches == 1);
}

TEST_CASE("persistent failure raises UpstreamError after max retries") {
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
    });
    RemoteEndpointConfig cfg = fast_config(server.url_template(), "count");
    cfg.max_retries = 1;
    RemoteProvider provider(cfg);
    try {
        provider.single_count("horse");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UpstreamError);
    }
    CHECK(server.requests() == 2);
}

TEST_CASE("malformed response raises ParseError") {
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        res.set_content("<html>oops</html>", "text/html");
    });
    RemoteProvider provider(fast_config(server.url_template(), "count"));
    CHECK_THROWS_AS(provider.single_count("horse"), Error);
}

TEST_CASE("min_interval rate limits consecutive requests") {
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"count\": 1}", "application/json");
    });
    RemoteEndpointConfig cfg = fast_config(server.url_template(), "count");
    cfg.min_interval_ms = 120;
    RemoteProvider provider(cfg);
    auto start = std::chrono::steady_clock::now();
    provider.single_count("one");
    provider.single_count("two");
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    CHECK(elapsed >= 120);
}

TEST_CASE("total queries use the configured N") {
    RemoteEndpointConfig cfg;
    cfg.url_template = "http://127.0.0.1:1/search?q={q}";
    cfg.total_count = 4285199774ull;
    RemoteProvider provider(cfg);
    CHECK(provider.total_count() == 4285199774ull);

    RemoteEndpointConfig no_n;
    no_n.url_template = "http://127.0.0.1:1/search?q={q}";
    RemoteProvider unconfigured(no_n);
    CHECK_THROWS_AS(unconfigured.total_count(), Error);
}

TEST_CASE("url template validation") {
    RemoteEndpointConfig cfg;
    cfg.url_template = "http://h/no-placeholder";
    CHECK_THROWS_AS(RemoteProvider{cfg}, Error);
    cfg.url_template = "http://h/a={q}&b={q}";
    CHECK_THROWS_AS(RemoteProvider{cfg}, Error);
}
