#pragma once

#include "semdist/corpus_index.hpp"
#include "semdist/count_provider.hpp"
#include "semdist/text.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace testutil {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(SEMDIST_FIXTURES) / name;
}

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        static std::mt19937_64 rng(std::random_device{}());
        for (int i = 0; i < 100; ++i) {
            auto candidate = base / ("semdist_test_" + std::to_string(rng()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string slurp(const std::filesystem::path& path) {
    return semdist::read_file(path.string());
}

inline std::shared_ptr<semdist::CorpusIndex> make_corpus(const std::vector<std::string>& docs,
                                                         semdist::TokenizerConfig cfg = {}) {
    return std::make_shared<semdist::CorpusIndex>(semdist::CorpusIndex::build(docs, cfg));
}

// Random corpus over a small vocabulary; documents are space-joined terms.
inline std::vector<std::string> random_docs(std::mt19937_64& rng, size_t n_docs,
                                            const std::vector<std::string>& vocab,
                                            size_t max_len = 30) {
    std::vector<std::string> docs;
    std::uniform_int_distribution<size_t> len_dist(0, max_len);
    std::uniform_int_distribution<size_t> word_dist(0, vocab.size() - 1);
    for (size_t d = 0; d < n_docs; ++d) {
        size_t len = len_dist(rng);
        std::string doc;
        for (size_t i = 0; i < len; ++i) {
            if (i > 0)
                doc += ' ';
            doc += vocab[word_dist(rng)];
        }
        docs.push_back(doc);
    }
    return docs;
}

// Independent per-document scan oracles, computed straight from the raw
// document texts with the same tokenizer.
struct NaiveCounts {
    std::vector<std::vector<std::string>> docs;

    explicit NaiveCounts(const std::vector<std::string>& raw,
                         const semdist::TokenizerConfig& cfg = {}) {
        for (const std::string& d : raw)
            docs.push_back(semdist::tokenize(d, cfg));
    }

    static std::vector<size_t> occurrences(const std::vector<std::string>& doc,
                                           const std::vector<std::string>& phrase) {
        std::vector<size_t> starts;
        if (phrase.empty() || doc.size() < phrase.size())
            return starts;
        for (size_t i = 0; i + phrase.size() <= doc.size(); ++i) {
            bool hit = true;
            for (size_t j = 0; j < phrase.size() && hit; ++j)
                hit = doc[i + j] == phrase[j];
            if (hit)
                starts.push_back(i);
        }
        return starts;
    }

    uint64_t single(const std::string& term, const semdist::TokenizerConfig& cfg = {}) const {
        auto phrase = semdist::tokenize(term, cfg);
        uint64_t count = 0;
        for (const auto& doc : docs)
            if (!occurrences(doc, phrase).empty())
                ++count;
        return count;
    }

    uint64_t pair(const std::string& a, const std::string& b,
                  const semdist::TokenizerConfig& cfg = {}) const {
        auto pa = semdist::tokenize(a, cfg);
        auto pb = semdist::tokenize(b, cfg);
        uint64_t count = 0;
        for (const auto& doc : docs)
            if (!occurrences(doc, pa).empty() && !occurrences(doc, pb).empty())
                ++count;
        return count;
    }

    uint64_t near(const std::string& a, const std::string& b, uint32_t window,
                  const semdist::TokenizerConfig& cfg = {}) const {
        auto pa = semdist::tokenize(a, cfg);
        auto pb = semdist::tokenize(b, cfg);
        uint64_t count = 0;
        for (const auto& doc : docs) {
            auto sa = occurrences(doc, pa);
            auto sb = occurrences(doc, pb);
            bool hit = false;
            for (size_t x : sa) {
                for (size_t y : sb) {
                    size_t gap = x > y ? x - y : y - x;
                    if (gap <= window) {
                        hit = true;
                        break;
                    }
                }
                if (hit)
                    break;
            }
            if (hit)
                ++count;
        }
        return count;
    }
};

// Provider preloaded with explicit counts; anything else is a cache miss.
inline std::unique_ptr<semdist::CacheOnlyProvider> preloaded_provider(
    uint64_t total,
    const std::vector<std::pair<std::string, uint64_t>>& singles,
    const std::vector<std::tuple<std::string, std::string, uint64_t>>& pairs) {
    auto p = std::make_unique<semdist::CacheOnlyProvider>();
    p->preload(semdist::CountQuery::total(), total);
    for (const auto& [term, count] : singles)
        p->preload(semdist::CountQuery::single(term), count);
    for (const auto& [a, b, count] : pairs)
        p->preload(semdist::CountQuery::pair(a, b), count);
    return p;
}

} // namespace testutil
