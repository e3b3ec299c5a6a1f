#pragma once

#include "semdist/anchor_svm.hpp"
#include "semdist/count_provider.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace semdist {

// Rectangular matrix of distances, rows = unknown terms, cols = basis terms.
struct BasisMatrix {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<double> values; // row-major

    double at(size_t r, size_t c) const { return values[r * cols + c]; }
};

BasisMatrix basis_matrix(CountProvider& provider, const std::vector<std::string>& row_terms,
                         const std::vector<std::string>& col_terms);

// Product-moment correlation over the flattened entries.
// Throws UndefinedCorrelation when either side has zero variance.
double pearson(const BasisMatrix& a, const BasisMatrix& b);

// Sectioned text: [known] lines "source<TAB>target", then [unknown-source]
// and [unknown-target], one term per line.
struct BilingualProblem {
    std::vector<std::pair<std::string, std::string>> known;
    std::vector<std::string> unknown_source;
    std::vector<std::string> unknown_target;

    static BilingualProblem load(std::istream& in, const std::string& origin = "problem");
    static BilingualProblem load_file(const std::filesystem::path& path);
};

struct TranslationResult {
    bool matched = false;                 // false = no positive correlation
    std::vector<size_t> permutation;      // unknown_source[i] -> unknown_target[perm[i]]
    double correlation = 0.0;             // best over all permutations
    std::vector<std::pair<std::string, std::string>> mapping; // induced word pairs
};

// Evaluates all k! row permutations of the target matrix against the source
// basis matrix and keeps the highest positive correlation. k <= 8.
TranslationResult translate_match(const BilingualProblem& problem,
                                  CountProvider& source_provider,
                                  CountProvider& target_provider);

struct TrialConfig {
    std::vector<std::filesystem::path> category_files;
    std::filesystem::path dictionary_file;
    uint64_t seed = 1;
    int bins = 10;
    // Per-category sizes: 50 train (25+25), 6 anchors (3 category + 3
    // dictionary), 20 test (10+10).
    size_t train_per_class = 25;
    size_t test_per_class = 10;
    size_t anchors_from_category = 3;
    size_t anchors_from_dictionary = 3;
};

struct CategoryOutcome {
    std::string name;
    bool completed = false;
    std::string note;       // skip reason when not completed
    double accuracy = 0.0;
    uint64_t fetches = 0;   // provider fetches consumed by this category
};

struct AccuracyStats {
    double mean = 0.0;
    double variance = 0.0; // population variance
    double stddev = 0.0;
};

AccuracyStats accuracy_stats(const std::vector<double>& accuracies);

struct TrialReport {
    std::vector<CategoryOutcome> categories;
    size_t completed = 0;
    AccuracyStats stats;
    int bins = 10;
    std::vector<size_t> histogram; // equal bins over [0, 1], top bin closed

    std::string per_category_csv() const; // category,accuracy,fetches
    std::string histogram_csv() const;    // bin_low,bin_high,count
    std::string summary_text() const;
};

TrialReport run_trial(const TrialConfig& config, CountProvider& provider);

} // namespace semdist
