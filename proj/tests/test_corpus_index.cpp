#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

#include "semdist/corpus_index.hpp"
#include "semdist/error.hpp"

#include <sstream>

using namespace semdist;
using testutil::NaiveCounts;

TEST_CASE("doc count equals number of input documents") {
    auto idx = testutil::make_corpus({"one", "two", "three", "four"});
    CHECK(idx->doc_count() == 4);
}

TEST_CASE("case folding dedups within a document") {
    auto idx = testutil::make_corpus({"Horse, horse rider"});
    CHECK(idx->term_page_count("horse") == 1);
    CHECK(idx->term_page_count("HORSE") == 1);
    CHECK(idx->occurrence_count() == 3);
}

TEST_CASE("multiword terms use phrase semantics") {
    auto idx = testutil::make_corpus({"the horse rider fell", "rider of the horse"});
    CHECK(idx->term_page_count("horse rider") == 1);
    CHECK(idx->term_page_count("rider horse") == 0);
    CHECK(idx->pair_page_count("horse rider", "fell") == 1);
}

TEST_CASE("unknown and universal terms") {
    auto idx = testutil::make_corpus({"a b", "a c", "a"});
    CHECK(idx->term_page_count("zzz") == 0);
    CHECK(idx->term_page_count("a") == idx->doc_count());
}

TEST_CASE("pair counts: identity and disjoint") {
    auto idx = testutil::make_corpus({"cat dog", "cat", "bird"});
    CHECK(idx->pair_page_count("cat", "cat") == idx->term_page_count("cat"));
    CHECK(idx->pair_page_count("dog", "bird") == 0);
    CHECK(idx->pair_page_count("cat", "dog") == idx->pair_page_count("dog", "cat"));
}

TEST_CASE("near counts") {
    auto idx = testutil::make_corpus({"alpha beta", "alpha x x x x x x x x x x x x beta"});
    CHECK(idx->near_count("alpha", "beta", 1) == 1);
    CHECK(idx->near_count("alpha", "beta", 13) == 2);
    CHECK_THROWS_AS(idx->near_count("alpha", "beta", 0), Error);

    std::string far = "alpha";
    for (int i = 0; i < 50; ++i)
        far += " filler" + std::to_string(i);
    far += " beta";
    auto idx2 = testutil::make_corpus({far});
    CHECK(idx2->near_count("alpha", "beta", 10) == 0);
}

TEST_CASE("random corpora match the naive scan oracle") {
    std::vector<std::string> vocab;
    for (int i = 0; i < 12; ++i)
        vocab.push_back("w" + std::to_string(i));
    std::mt19937_64 rng(7);
    for (int round = 0; round < 3; ++round) {
        auto docs = testutil::random_docs(rng, 60, vocab);
        auto idx = testutil::make_corpus(docs);
        NaiveCounts oracle(docs);
        for (const auto& a : vocab) {
            CHECK(idx->term_page_count(a) == oracle.single(a));
            for (const auto& b : vocab) {
                CHECK(idx->pair_page_count(a, b) == oracle.pair(a, b));
                CHECK(idx->near_count(a, b, 3) == oracle.near(a, b, 3));
            }
        }
    }
}

TEST_CASE("count monotonicity and symmetry") {
    std::mt19937_64 rng(11);
    std::vector<std::string> vocab{"p", "q", "r", "s"};
    auto docs = testutil::random_docs(rng, 100, vocab);
    auto idx = testutil::make_corpus(docs);
    for (const auto& a : vocab) {
        for (const auto& b : vocab) {
            uint64_t near = idx->near_count(a, b, 2);
            uint64_t pair = idx->pair_page_count(a, b);
            CHECK(near <= pair);
            CHECK(pair <= std::min(idx->term_page_count(a), idx->term_page_count(b)));
            CHECK(idx->term_page_count(a) <= idx->doc_count());
            CHECK(pair == idx->pair_page_count(b, a));
            CHECK(near == idx->near_count(b, a, 2));
        }
    }
}

TEST_CASE("empty corpus is an error; empty documents count toward N") {
    CHECK_THROWS_AS(testutil::make_corpus({}), Error);
    auto idx = testutil::make_corpus({"", "only doc with text", ""});
    CHECK(idx->doc_count() == 3);
    CHECK(idx->term_page_count("text") == 1);
}

TEST_CASE("save/load round trip preserves all counts byte-exactly") {
    std::mt19937_64 rng(3);
    std::vector<std::string> vocab{"aa", "bb", "cc", "dd", "ee"};
    auto docs = testutil::random_docs(rng, 1000, vocab);
    auto idx = testutil::make_corpus(docs);

    testutil::TempDir tmp;
    auto path = tmp.file("index.txt");
    idx->save(path);
    CorpusIndex loaded = CorpusIndex::load(path);

    CHECK(loaded.doc_count() == idx->doc_count());
    CHECK(loaded.occurrence_count() == idx->occurrence_count());
    for (const auto& a : vocab) {
        CHECK(loaded.term_page_count(a) == idx->term_page_count(a));
        for (const auto& b : vocab) {
            CHECK(loaded.pair_page_count(a, b) == idx->pair_page_count(a, b));
            CHECK(loaded.near_count(a, b, 5) == idx->near_count(a, b, 5));
        }
    }

    auto path2 = tmp.file("index2.txt");
    loaded.save(path2);
    CHECK(testutil::slurp(path) == testutil::slurp(path2));
}

TEST_CASE("load rejects truncated or foreign files") {
    testutil::TempDir tmp;
    auto idx = testutil::make_corpus({"a b c", "b c d"});
    auto path = tmp.file("index.txt");
    idx->save(path);

    std::string full = testutil::slurp(path);
    auto truncated = tmp.file("broken.txt");
    testutil::write_file(truncated, full.substr(0, full.size() / 2));
    CHECK_THROWS_AS(CorpusIndex::load(truncated), Error);

    auto foreign = tmp.file("foreign.txt");
    testutil::write_file(foreign, "SEMDIST-IDX v999\n");
    try {
        CorpusIndex::load(foreign);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::FormatError);
    }
}

TEST_CASE("identical inputs build identical indexes") {
    std::vector<std::string> docs{"x y z", "z y", "y"};
    testutil::TempDir tmp;
    auto p1 = tmp.file("a.txt");
    auto p2 = tmp.file("b.txt");
    testutil::make_corpus(docs)->save(p1);
    testutil::make_corpus(docs)->save(p2);
    CHECK(testutil::slurp(p1) == testutil::slurp(p2));
}

TEST_CASE("line and directory ingestion") {
    std::istringstream lines("first doc\nsecond doc\n\nfourth doc\n");
    CorpusIndex from_lines = CorpusIndex::from_lines(lines);
    CHECK(from_lines.doc_count() == 4);
    CHECK(from_lines.term_page_count("doc") == 3);

    testutil::TempDir tmp;
    testutil::write_file(tmp.file("b.txt"), "banana");
    testutil::write_file(tmp.file("a.txt"), "apple");
    CorpusIndex from_dir = CorpusIndex::from_directory(tmp.path());
    CHECK(from_dir.doc_count() == 2);
    // lexicographic path order: a.txt is doc 0
    CHECK(from_dir.term_page_count("apple") == 1);
    CHECK(from_dir.term_page_count("banana") == 1);
}

TEST_CASE("tokenizer config: no folding and extra word chars") {
    TokenizerConfig cfg;
    cfg.fold_case = false;
    auto idx = testutil::make_corpus({"Horse horse"}, cfg);
    CHECK(idx->term_page_count("Horse") == 1);
    CHECK(idx->term_page_count("horse") == 1);
    CHECK(idx->term_page_count("HORSE") == 0);

    TokenizerConfig hyphen;
    hyphen.extra_word_chars = "-";
    auto idx2 = testutil::make_corpus({"well-known fact"}, hyphen);
    CHECK(idx2->term_page_count("well-known") == 1);
    CHECK(idx2->term_page_count("well") == 0);

    TokenizerConfig bad;
    bad.extra_word_chars = " ";
    CHECK_THROWS_AS(testutil::make_corpus({"x"}, bad), Error);
}
