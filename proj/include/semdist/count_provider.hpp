#pragma once

#include "semdist/corpus_index.hpp"
#include "semdist/text.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace semdist {

enum class QueryKind : uint8_t { single, pair, total };

std::string_view to_string(QueryKind kind);

// A normalized count query. Pair terms are stored in canonical (sorted)
// order so (x, y) and (y, x) are one key; terms are trimmed and case-folded.
struct CountQuery {
    QueryKind kind = QueryKind::total;
    std::string term1;
    std::string term2;

    static CountQuery single(std::string_view term);
    static CountQuery pair(std::string_view a, std::string_view b);
    static CountQuery total();

    friend auto operator<=>(const CountQuery&, const CountQuery&) = default;
};

struct ProviderStats {
    uint64_t fetches = 0;     // distinct upstream calls
    uint64_t cache_hits = 0;  // answers served from cache
};

// Uniform count source with a built-in memoizing cache and fetch accounting.
// Thread-safe: the cache lock also serializes upstream fetches, so a query
// asked k times costs exactly one upstream call.
class CountProvider {
public:
    virtual ~CountProvider() = default;

    virtual std::string_view name() const = 0;

    uint64_t get_count(const CountQuery& query);
    uint64_t single_count(std::string_view term) { return get_count(CountQuery::single(term)); }
    uint64_t pair_count(std::string_view a, std::string_view b) {
        return get_count(CountQuery::pair(a, b));
    }
    uint64_t total_count() { return get_count(CountQuery::total()); }

    // Proximity counts are only available from corpus-backed providers.
    virtual std::optional<uint64_t> near_count(std::string_view, std::string_view, uint32_t) {
        return std::nullopt;
    }

    ProviderStats stats() const;
    size_t cache_size() const;

    // Seed a cache entry without touching accounting.
    void preload(const CountQuery& query, uint64_t count);

    // Cache file: one record per line, `kind<TAB>term1<TAB>term2<TAB>count`,
    // lines sorted lexicographically, pair terms in canonical order.
    size_t load_cache(const std::filesystem::path& path);
    void flush_cache(const std::filesystem::path& path) const;

protected:
    virtual uint64_t fetch(const CountQuery& query) = 0;

private:
    mutable std::mutex mu_;
    std::map<CountQuery, uint64_t> cache_;
    ProviderStats stats_;
};

// Deterministic provider over a local corpus index.
class CorpusProvider : public CountProvider {
public:
    enum class NMode { pages, occurrences };

    explicit CorpusProvider(std::shared_ptr<const CorpusIndex> index,
                            NMode mode = NMode::pages);

    std::string_view name() const override { return "corpus"; }
    std::optional<uint64_t> near_count(std::string_view t1, std::string_view t2,
                                       uint32_t window) override;

protected:
    uint64_t fetch(const CountQuery& query) override;

private:
    std::shared_ptr<const CorpusIndex> index_;
    uint64_t n_value_;
};

// Provider backed purely by a persisted cache file; any miss is an error.
class CacheOnlyProvider : public CountProvider {
public:
    CacheOnlyProvider() = default;
    explicit CacheOnlyProvider(const std::filesystem::path& cache_file);

    std::string_view name() const override { return "cache"; }

protected:
    uint64_t fetch(const CountQuery& query) override;
};

} // namespace semdist
