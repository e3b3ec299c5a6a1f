#include "semdist/corpus_index.hpp"

#include "semdist/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace semdist {

CorpusIndex CorpusIndex::build(const std::vector<std::string>& documents,
                               const TokenizerConfig& cfg) {
    validate(cfg);
    if (documents.empty())
        fail(ErrorKind::EmptyCorpus, "no documents in input");

    CorpusIndex index;
    index.cfg_ = cfg;
    index.doc_count_ = documents.size();
    for (uint32_t doc = 0; doc < documents.size(); ++doc) {
        std::vector<std::string> tokens = tokenize(documents[doc], cfg);
        index.occurrence_count_ += tokens.size();
        for (uint32_t off = 0; off < tokens.size(); ++off) {
            Posting& p = index.postings_[tokens[off]];
            if (p.docs.empty() || p.docs.back() != doc) {
                p.docs.push_back(doc);
                p.offsets.emplace_back();
            }
            p.offsets.back().push_back(off);
        }
    }
    return index;
}

CorpusIndex CorpusIndex::from_lines(std::istream& in, const TokenizerConfig& cfg) {
    std::vector<std::string> docs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        docs.push_back(line);
    }
    if (in.bad())
        fail(ErrorKind::IoError, "read failure after document " + std::to_string(docs.size()));
    return build(docs, cfg);
}

CorpusIndex CorpusIndex::from_lines_file(const std::filesystem::path& path,
                                         const TokenizerConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::IoError, "cannot open " + path.string());
    return from_lines(in, cfg);
}

CorpusIndex CorpusIndex::from_directory(const std::filesystem::path& dir,
                                        const TokenizerConfig& cfg) {
    std::error_code ec;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.is_regular_file())
            files.push_back(entry.path());
    }
    if (ec)
        fail(ErrorKind::IoError, "cannot read directory " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.generic_string() < b.generic_string(); });

    std::vector<std::string> docs;
    docs.reserve(files.size());
    for (const auto& f : files)
        docs.push_back(read_file(f.string()));
    if (docs.empty())
        fail(ErrorKind::EmptyCorpus, "no files in " + dir.string());
    return build(docs, cfg);
}

CorpusIndex::Matches CorpusIndex::match(std::string_view term) const {
    Matches m;
    std::vector<std::string> tokens = tokenize(term, cfg_);
    if (tokens.empty())
        return m;

    auto first = postings_.find(tokens[0]);
    if (first == postings_.end())
        return m;
    if (tokens.size() == 1) {
        m.docs = first->second.docs;
        m.starts = first->second.offsets;
        return m;
    }

    std::vector<const Posting*> parts;
    parts.push_back(&first->second);
    for (size_t i = 1; i < tokens.size(); ++i) {
        auto it = postings_.find(tokens[i]);
        if (it == postings_.end())
            return m;
        parts.push_back(&it->second);
    }

    // Phrase match: every token present at consecutive offsets.
    const Posting& head = *parts[0];
    for (size_t d = 0; d < head.docs.size(); ++d) {
        uint32_t doc = head.docs[d];
        std::vector<uint32_t> starts;
        for (uint32_t start : head.offsets[d]) {
            bool ok = true;
            for (size_t i = 1; i < parts.size() && ok; ++i) {
                const Posting& p = *parts[i];
                auto dit = std::lower_bound(p.docs.begin(), p.docs.end(), doc);
                if (dit == p.docs.end() || *dit != doc) {
                    ok = false;
                    break;
                }
                const auto& offs = p.offsets[static_cast<size_t>(dit - p.docs.begin())];
                ok = std::binary_search(offs.begin(), offs.end(),
                                        start + static_cast<uint32_t>(i));
            }
            if (ok)
                starts.push_back(start);
        }
        if (!starts.empty()) {
            m.docs.push_back(doc);
            m.starts.push_back(std::move(starts));
        }
    }
    return m;
}

uint64_t CorpusIndex::term_page_count(std::string_view term) const {
    return match(term).docs.size();
}

uint64_t CorpusIndex::pair_page_count(std::string_view t1, std::string_view t2) const {
    Matches m1 = match(t1);
    if (m1.docs.empty())
        return 0;
    Matches m2 = match(t2);
    if (m2.docs.empty())
        return 0;
    std::vector<uint32_t> both;
    std::set_intersection(m1.docs.begin(), m1.docs.end(), m2.docs.begin(), m2.docs.end(),
                          std::back_inserter(both));
    return both.size();
}

uint64_t CorpusIndex::near_count(std::string_view t1, std::string_view t2,
                                 uint32_t window) const {
    if (window == 0)
        fail(ErrorKind::InvalidWindow, "window must be >= 1");
    Matches m1 = match(t1);
    Matches m2 = match(t2);
    uint64_t count = 0;
    size_t i = 0, j = 0;
    while (i < m1.docs.size() && j < m2.docs.size()) {
        if (m1.docs[i] < m2.docs[j]) {
            ++i;
        } else if (m2.docs[j] < m1.docs[i]) {
            ++j;
        } else {
            const auto& a = m1.starts[i];
            const auto& b = m2.starts[j];
            size_t x = 0, y = 0;
            bool hit = false;
            while (x < a.size() && y < b.size()) {
                uint32_t pa = a[x], pb = b[y];
                uint32_t gap = pa > pb ? pa - pb : pb - pa;
                if (gap <= window) {
                    hit = true;
                    break;
                }
                if (pa < pb)
                    ++x;
                else
                    ++y;
            }
            if (hit)
                ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

void CorpusIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::IoError, "cannot write " + path.string());
    out << kMagic << '\n';
    out << "fold " << (cfg_.fold_case ? 1 : 0) << '\n';
    out << "extra " << cfg_.extra_word_chars.size();
    if (!cfg_.extra_word_chars.empty())
        out << ' ' << cfg_.extra_word_chars;
    out << '\n';
    out << "docs " << doc_count_ << '\n';
    out << "occ " << occurrence_count_ << '\n';
    out << "terms " << postings_.size() << '\n';
    for (const auto& [term, posting] : postings_) {
        out << "T " << term << ' ' << posting.docs.size() << '\n';
        for (size_t d = 0; d < posting.docs.size(); ++d) {
            out << "D " << posting.docs[d] << ' ' << posting.offsets[d].size();
            for (uint32_t off : posting.offsets[d])
                out << ' ' << off;
            out << '\n';
        }
    }
    if (!out)
        fail(ErrorKind::IoError, "write failure on " + path.string());
}

namespace {

[[noreturn]] void bad_index(const std::filesystem::path& path, const std::string& what) {
    fail(ErrorKind::FormatError, path.string() + ": " + what);
}

} // namespace

CorpusIndex CorpusIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::IoError, "cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        bad_index(path, "bad magic or unsupported version");

    CorpusIndex index;
    auto read_header = [&](const char* key) -> std::string {
        if (!std::getline(in, line))
            bad_index(path, std::string("truncated header, expected ") + key);
        std::istringstream ss(line);
        std::string k;
        ss >> k;
        if (k != key)
            bad_index(path, "expected header '" + std::string(key) + "', got '" + k + "'");
        std::string rest;
        std::getline(ss, rest);
        if (!rest.empty() && rest.front() == ' ')
            rest.erase(rest.begin());
        return rest;
    };

    unsigned long long v = 0;
    if (!parse_u64(read_header("fold"), v) || v > 1)
        bad_index(path, "bad fold flag");
    index.cfg_.fold_case = v == 1;

    std::string extra = read_header("extra");
    size_t sp = extra.find(' ');
    std::string len_part = sp == std::string::npos ? extra : extra.substr(0, sp);
    if (!parse_u64(len_part, v))
        bad_index(path, "bad extra length");
    std::string chars = sp == std::string::npos ? "" : extra.substr(sp + 1);
    if (chars.size() != v)
        bad_index(path, "extra chars length mismatch");
    index.cfg_.extra_word_chars = chars;

    if (!parse_u64(read_header("docs"), v))
        bad_index(path, "bad docs count");
    index.doc_count_ = v;
    if (!parse_u64(read_header("occ"), v))
        bad_index(path, "bad occurrence count");
    index.occurrence_count_ = v;
    if (!parse_u64(read_header("terms"), v))
        bad_index(path, "bad terms count");
    size_t nterms = v;

    for (size_t t = 0; t < nterms; ++t) {
        if (!std::getline(in, line))
            bad_index(path, "truncated at term " + std::to_string(t));
        std::istringstream ss(line);
        std::string tag, term;
        unsigned long long ndocs = 0;
        if (!(ss >> tag >> term >> ndocs) || tag != "T")
            bad_index(path, "bad term record: " + line);
        Posting posting;
        for (unsigned long long d = 0; d < ndocs; ++d) {
            if (!std::getline(in, line))
                bad_index(path, "truncated postings for term " + term);
            std::istringstream ds(line);
            unsigned long long doc = 0, npos = 0;
            if (!(ds >> tag >> doc >> npos) || tag != "D")
                bad_index(path, "bad posting record: " + line);
            if (doc >= index.doc_count_)
                bad_index(path, "doc id out of range: " + std::to_string(doc));
            if (!posting.docs.empty() && posting.docs.back() >= doc)
                bad_index(path, "postings out of order for term " + term);
            std::vector<uint32_t> offsets;
            offsets.reserve(npos);
            for (unsigned long long p = 0; p < npos; ++p) {
                unsigned long long off = 0;
                if (!(ds >> off))
                    bad_index(path, "truncated offsets for term " + term);
                if (!offsets.empty() && offsets.back() >= off)
                    bad_index(path, "offsets out of order for term " + term);
                offsets.push_back(static_cast<uint32_t>(off));
            }
            posting.docs.push_back(static_cast<uint32_t>(doc));
            posting.offsets.push_back(std::move(offsets));
        }
        index.postings_.emplace(std::move(term), std::move(posting));
    }
    return index;
}

} // namespace semdist
