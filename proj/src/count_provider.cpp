#include "semdist/count_provider.hpp"

#include "semdist/error.hpp"

#include <algorithm>
#include <fstream>

namespace semdist {

std::string_view to_string(QueryKind kind) {
    switch (kind) {
    case QueryKind::single: return "single";
    case QueryKind::pair: return "pair";
    case QueryKind::total: return "total";
    }
    return "?";
}

namespace {

std::string checked_term(std::string_view raw) {
    std::string t = normalize_term(raw);
    if (t.empty())
        fail(ErrorKind::InvalidParameter, "empty query term");
    if (t.find('\t') != std::string::npos || t.find('\n') != std::string::npos)
        fail(ErrorKind::InvalidParameter, "query term contains tab or newline");
    return t;
}

} // namespace

CountQuery CountQuery::single(std::string_view term) {
    CountQuery q;
    q.kind = QueryKind::single;
    q.term1 = checked_term(term);
    return q;
}

CountQuery CountQuery::pair(std::string_view a, std::string_view b) {
    CountQuery q;
    q.kind = QueryKind::pair;
    q.term1 = checked_term(a);
    q.term2 = checked_term(b);
    if (q.term2 < q.term1)
        std::swap(q.term1, q.term2);
    return q;
}

CountQuery CountQuery::total() {
    return CountQuery{};
}

uint64_t CountProvider::get_count(const CountQuery& query) {
    std::lock_guard lock(mu_);
    auto it = cache_.find(query);
    if (it != cache_.end()) {
        ++stats_.cache_hits;
        return it->second;
    }
    uint64_t count = fetch(query);
    ++stats_.fetches;
    cache_.emplace(query, count);
    return count;
}

ProviderStats CountProvider::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

size_t CountProvider::cache_size() const {
    std::lock_guard lock(mu_);
    return cache_.size();
}

void CountProvider::preload(const CountQuery& query, uint64_t count) {
    std::lock_guard lock(mu_);
    cache_[query] = count;
}

size_t CountProvider::load_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::IoError, "cannot open cache file " + path.string());

    size_t loaded = 0;
    std::string line;
    size_t line_no = 0;
    std::lock_guard lock(mu_);
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto bad = [&](const std::string& what) {
            fail(ErrorKind::FormatError,
                 path.string() + ":" + std::to_string(line_no) + ": " + what);
        };
        std::vector<std::string> fields = split(line, '\t');
        if (fields.size() != 4)
            bad("expected 4 tab-separated fields, got " + std::to_string(fields.size()));
        CountQuery q;
        if (fields[0] == "single") {
            if (fields[1].empty() || !fields[2].empty())
                bad("single record needs term1 only");
            q = CountQuery::single(fields[1]);
        } else if (fields[0] == "pair") {
            if (fields[1].empty() || fields[2].empty())
                bad("pair record needs term1 and term2");
            q = CountQuery::pair(fields[1], fields[2]);
        } else if (fields[0] == "total") {
            if (!fields[1].empty() || !fields[2].empty())
                bad("total record takes no terms");
            q = CountQuery::total();
        } else {
            bad("unknown record kind '" + fields[0] + "'");
        }
        unsigned long long count = 0;
        if (!parse_u64(fields[3], count))
            bad("bad count '" + fields[3] + "'");
        cache_[q] = count;
        ++loaded;
    }
    if (in.bad())
        fail(ErrorKind::IoError, "read failure on " + path.string());
    return loaded;
}

void CountProvider::flush_cache(const std::filesystem::path& path) const {
    std::vector<std::string> lines;
    {
        std::lock_guard lock(mu_);
        lines.reserve(cache_.size());
        for (const auto& [q, count] : cache_) {
            std::string line(to_string(q.kind));
            line += '\t';
            line += q.term1;
            line += '\t';
            line += q.term2;
            line += '\t';
            line += std::to_string(count);
            lines.push_back(std::move(line));
        }
    }
    std::sort(lines.begin(), lines.end());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::IoError, "cannot write cache file " + path.string());
    for (const auto& line : lines)
        out << line << '\n';
    if (!out)
        fail(ErrorKind::IoError, "write failure on " + path.string());
}

CorpusProvider::CorpusProvider(std::shared_ptr<const CorpusIndex> index, NMode mode)
    : index_(std::move(index)) {
    n_value_ = mode == NMode::pages ? index_->doc_count() : index_->occurrence_count();
    // N is corpus metadata, known at construction; total queries never
    // count as fetches.
    preload(CountQuery::total(), n_value_);
}

uint64_t CorpusProvider::fetch(const CountQuery& query) {
    switch (query.kind) {
    case QueryKind::single:
        return index_->term_page_count(query.term1);
    case QueryKind::pair:
        return index_->pair_page_count(query.term1, query.term2);
    case QueryKind::total:
        return n_value_;
    }
    fail(ErrorKind::ParseError, "unreachable query kind");
}

std::optional<uint64_t> CorpusProvider::near_count(std::string_view t1, std::string_view t2,
                                                   uint32_t window) {
    return index_->near_count(normalize_term(t1), normalize_term(t2), window);
}

CacheOnlyProvider::CacheOnlyProvider(const std::filesystem::path& cache_file) {
    load_cache(cache_file);
}

uint64_t CacheOnlyProvider::fetch(const CountQuery& query) {
    std::string what(to_string(query.kind));
    if (!query.term1.empty()) {
        what += " '" + query.term1 + "'";
        if (!query.term2.empty())
            what += " '" + query.term2 + "'";
    }
    fail(ErrorKind::UpstreamError, what + " not in cache and provider has no upstream");
}

} // namespace semdist
