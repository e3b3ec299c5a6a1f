#pragma once

#include "semdist/count_provider.hpp"
#include "semdist/svm.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace semdist {

// Ordered anchor words; the anchor order defines the feature dimensions.
struct AnchorSet {
    std::vector<std::string> anchors;

    explicit AnchorSet(std::vector<std::string> words);
    size_t size() const { return anchors.size(); }
};

struct FeatureVector {
    std::string word;
    std::vector<double> values; // values[i] = e(word, anchors[i]); may be +inf
};

FeatureVector featurize(CountProvider& provider, std::string_view word,
                        const AnchorSet& anchors);

// Replace +inf features by 1 + the maximum finite feature seen in the
// training vectors; the same replacement value is applied to test vectors.
// Throws InvalidFeature when no finite training feature exists.
double substitute_infinite_features(std::vector<FeatureVector>& train,
                                    std::vector<FeatureVector>* test);

struct CvGrid {
    std::vector<double> gammas;
    std::vector<double> costs;

    // gammas 2^-7..2^3, costs 2^-3..2^7
    static CvGrid defaults();
};

struct CvChoice {
    double gamma = 0.0;
    double c = 0.0;
    double mean_accuracy = 0.0;
};

// Five-fold stratified cross validation; the best mean fold accuracy wins,
// ties resolved toward the lexicographically smallest (gamma, C).
CvChoice cross_validate(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                        const CvGrid& grid, uint64_t seed);

// Sectioned text: [positive], [negative], [anchors], [test-positive],
// [test-negative]; one term per line; '#' starts a comment line.
struct ExperimentSpec {
    std::vector<std::string> pos_train;
    std::vector<std::string> neg_train;
    std::vector<std::string> anchors;
    std::vector<std::string> pos_test;
    std::vector<std::string> neg_test;

    static ExperimentSpec load(std::istream& in, const std::string& origin = "experiment");
    static ExperimentSpec load_file(const std::filesystem::path& path);
};

struct ExperimentReport {
    // 2x2 table, cells list the classified test terms
    std::vector<std::string> pos_test_pos_pred;
    std::vector<std::string> neg_test_pos_pred;
    std::vector<std::string> pos_test_neg_pred;
    std::vector<std::string> neg_test_neg_pred;
    std::vector<std::string> unclassifiable; // unknown test terms, excluded
    std::vector<std::string> warnings;

    double gamma = 0.0;
    double c = 0.0;
    double cv_accuracy = 0.0;

    size_t correct = 0;
    size_t total = 0;
    double accuracy = 0.0;

    std::string to_text() const;
};

ExperimentReport run_experiment(CountProvider& provider, const ExperimentSpec& spec,
                                uint64_t seed = 1);

} // namespace semdist
