#pragma once

#include "semdist/text.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace semdist {

// Inverted index over a document collection. Acts as the local search
// engine: answers page counts for single terms, pair co-occurrence,
// proximity co-occurrence, and the corpus totals used as the normalizer N.
//
// Construction is single-writer; a built index is immutable and safe for
// concurrent readers.
class CorpusIndex {
public:
    CorpusIndex() = default;

    // Each element of `documents` is the raw text of one document.
    static CorpusIndex build(const std::vector<std::string>& documents,
                             const TokenizerConfig& cfg = {});

    // One document per line. Empty lines are empty documents; they count
    // toward N but never match a query.
    static CorpusIndex from_lines(std::istream& in, const TokenizerConfig& cfg = {});
    static CorpusIndex from_lines_file(const std::filesystem::path& path,
                                       const TokenizerConfig& cfg = {});

    // One document per regular file, in lexicographic path order.
    static CorpusIndex from_directory(const std::filesystem::path& dir,
                                      const TokenizerConfig& cfg = {});

    uint64_t doc_count() const { return doc_count_; }
    uint64_t occurrence_count() const { return occurrence_count_; }
    size_t term_count() const { return postings_.size(); }
    const TokenizerConfig& tokenizer() const { return cfg_; }

    // A multiword term matches a document iff its token sequence occurs
    // contiguously (phrase semantics). Unknown terms count 0.
    uint64_t term_page_count(std::string_view term) const;
    uint64_t pair_page_count(std::string_view t1, std::string_view t2) const;

    // Documents where some occurrence of t1 and some occurrence of t2 are
    // within `window` token offsets. Throws InvalidWindow when window == 0.
    uint64_t near_count(std::string_view t1, std::string_view t2, uint32_t window) const;

    void save(const std::filesystem::path& path) const;
    static CorpusIndex load(const std::filesystem::path& path);

    static constexpr std::string_view kMagic = "SEMDIST-IDX v1";

private:
    struct Posting {
        std::vector<uint32_t> docs;                  // ascending, unique
        std::vector<std::vector<uint32_t>> offsets;  // aligned with docs, ascending
    };

    // Documents matching a (possibly multiword) term, with the token offset
    // of each match start.
    struct Matches {
        std::vector<uint32_t> docs;
        std::vector<std::vector<uint32_t>> starts;
    };

    Matches match(std::string_view term) const;

    std::map<std::string, Posting, std::less<>> postings_;
    uint64_t doc_count_ = 0;
    uint64_t occurrence_count_ = 0;
    TokenizerConfig cfg_;
};

} // namespace semdist
