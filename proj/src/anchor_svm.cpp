#include "semdist/anchor_svm.hpp"

#include "semdist/distances.hpp"
#include "semdist/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace semdist {

AnchorSet::AnchorSet(std::vector<std::string> words) : anchors(std::move(words)) {
    if (anchors.empty())
        fail(ErrorKind::InvalidParameter, "anchor set may not be empty");
    for (size_t i = 0; i < anchors.size(); ++i)
        for (size_t j = i + 1; j < anchors.size(); ++j)
            if (normalize_term(anchors[i]) == normalize_term(anchors[j]))
                fail(ErrorKind::InvalidParameter, "duplicate anchor '" + anchors[i] + "'");
}

FeatureVector featurize(CountProvider& provider, std::string_view word,
                        const AnchorSet& anchors) {
    FeatureVector v;
    v.word = std::string(word);
    v.values.reserve(anchors.size());
    for (const std::string& anchor : anchors.anchors)
        v.values.push_back(nwd(provider, word, anchor).value);
    return v;
}

double substitute_infinite_features(std::vector<FeatureVector>& train,
                                    std::vector<FeatureVector>* test) {
    double max_finite = -std::numeric_limits<double>::infinity();
    bool any_infinite = false;
    for (const FeatureVector& v : train) {
        for (double value : v.values) {
            if (std::isinf(value))
                any_infinite = true;
            else
                max_finite = std::max(max_finite, value);
        }
    }
    if (test)
        for (const FeatureVector& v : *test)
            for (double value : v.values)
                if (std::isinf(value))
                    any_infinite = true;
    if (!any_infinite)
        return 0.0;
    if (!std::isfinite(max_finite))
        fail(ErrorKind::InvalidFeature, "every training feature is infinite");
    double replacement = 1.0 + max_finite;
    auto apply = [&](std::vector<FeatureVector>& vectors) {
        for (FeatureVector& v : vectors)
            for (double& value : v.values)
                if (std::isinf(value))
                    value = replacement;
    };
    apply(train);
    if (test)
        apply(*test);
    return replacement;
}

CvGrid CvGrid::defaults() {
    CvGrid grid;
    for (int e = -7; e <= 3; ++e)
        grid.gammas.push_back(std::ldexp(1.0, e));
    for (int e = -3; e <= 7; ++e)
        grid.costs.push_back(std::ldexp(1.0, e));
    return grid;
}

CvChoice cross_validate(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                        const CvGrid& grid, uint64_t seed) {
    constexpr size_t kFolds = 5;
    if (x.size() != y.size() || x.empty())
        fail(ErrorKind::InvalidParameter, "vectors and labels must align");
    if (grid.gammas.empty() || grid.costs.empty())
        fail(ErrorKind::InvalidParameter, "empty cross-validation grid");

    std::vector<size_t> pos_idx, neg_idx;
    for (size_t i = 0; i < y.size(); ++i)
        (y[i] == 1 ? pos_idx : neg_idx).push_back(i);
    if (pos_idx.size() < kFolds || neg_idx.size() < kFolds)
        fail(ErrorKind::InsufficientData,
             "five-fold cross validation needs at least 5 examples per class");

    // Stratified folds: shuffle each class, deal round-robin.
    std::mt19937_64 rng(seed);
    std::shuffle(pos_idx.begin(), pos_idx.end(), rng);
    std::shuffle(neg_idx.begin(), neg_idx.end(), rng);
    std::vector<size_t> fold_of(x.size());
    for (size_t i = 0; i < pos_idx.size(); ++i)
        fold_of[pos_idx[i]] = i % kFolds;
    for (size_t i = 0; i < neg_idx.size(); ++i)
        fold_of[neg_idx[i]] = i % kFolds;

    CvChoice best;
    bool have_best = false;
    for (double gamma : grid.gammas) {
        for (double c : grid.costs) {
            double accuracy_sum = 0.0;
            for (size_t fold = 0; fold < kFolds; ++fold) {
                std::vector<std::vector<double>> train_x;
                std::vector<int> train_y;
                std::vector<size_t> eval_idx;
                for (size_t i = 0; i < x.size(); ++i) {
                    if (fold_of[i] == fold) {
                        eval_idx.push_back(i);
                    } else {
                        train_x.push_back(x[i]);
                        train_y.push_back(y[i]);
                    }
                }
                SvmModel model = SvmModel::train(train_x, train_y, gamma, c);
                size_t correct = 0;
                for (size_t i : eval_idx)
                    if (model.predict(x[i]) == y[i])
                        ++correct;
                accuracy_sum += static_cast<double>(correct) /
                                static_cast<double>(eval_idx.size());
            }
            double mean = accuracy_sum / static_cast<double>(kFolds);
            if (!have_best || mean > best.mean_accuracy) {
                best = {gamma, c, mean};
                have_best = true;
            }
        }
    }
    return best;
}

namespace {

std::vector<std::string>* section_of(ExperimentSpec& spec, const std::string& name) {
    if (name == "positive")
        return &spec.pos_train;
    if (name == "negative")
        return &spec.neg_train;
    if (name == "anchors")
        return &spec.anchors;
    if (name == "test-positive")
        return &spec.pos_test;
    if (name == "test-negative")
        return &spec.neg_test;
    return nullptr;
}

} // namespace

ExperimentSpec ExperimentSpec::load(std::istream& in, const std::string& origin) {
    ExperimentSpec spec;
    std::vector<std::string>* current = nullptr;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::string trimmed = line;
        size_t b = trimmed.find_first_not_of(" \t");
        if (b == std::string::npos)
            continue;
        trimmed = trimmed.substr(b, trimmed.find_last_not_of(" \t") - b + 1);
        if (trimmed[0] == '#')
            continue;
        if (trimmed.front() == '[' && trimmed.back() == ']') {
            std::string name = trimmed.substr(1, trimmed.size() - 2);
            current = section_of(spec, name);
            if (!current)
                fail(ErrorKind::FormatError, origin + ":" + std::to_string(line_no) +
                                                 ": unknown section [" + name + "]");
            continue;
        }
        if (!current)
            fail(ErrorKind::FormatError, origin + ":" + std::to_string(line_no) +
                                             ": term before any section header");
        current->push_back(trimmed);
    }
    if (spec.pos_train.empty() || spec.neg_train.empty())
        fail(ErrorKind::FormatError, origin + ": needs [positive] and [negative] terms");
    if (spec.anchors.empty())
        fail(ErrorKind::FormatError, origin + ": needs [anchors]");
    return spec;
}

ExperimentSpec ExperimentSpec::load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::IoError, "cannot open " + path.string());
    return load(in, path.string());
}

namespace {

std::string join_terms(const std::vector<std::string>& terms) {
    if (terms.empty())
        return "-";
    std::string out;
    for (size_t i = 0; i < terms.size(); ++i) {
        if (i > 0)
            out += ", ";
        out += terms[i];
    }
    return out;
}

} // namespace

std::string ExperimentReport::to_text() const {
    std::ostringstream out;
    out << "Testing Results\n";
    out << "\n";
    out << "                      Positive tests: " << join_terms(pos_test_pos_pred) << "\n";
    out << "Positive Predictions  Negative tests: " << join_terms(neg_test_pos_pred) << "\n";
    out << "\n";
    out << "                      Positive tests: " << join_terms(pos_test_neg_pred) << "\n";
    out << "Negative Predictions  Negative tests: " << join_terms(neg_test_neg_pred) << "\n";
    out << "\n";
    if (!unclassifiable.empty())
        out << "Unclassifiable (unknown terms, excluded): " << join_terms(unclassifiable)
            << "\n";
    double percent = total == 0 ? 0.0 : 100.0 * accuracy;
    out << "accuracy = " << correct << "/" << total << " = " << format_fixed(percent, 2)
        << "%\n";
    return out.str();
}

ExperimentReport run_experiment(CountProvider& provider, const ExperimentSpec& spec,
                                uint64_t seed) {
    AnchorSet anchors(spec.anchors);

    ExperimentReport report;
    std::vector<FeatureVector> train;
    std::vector<int> labels;
    for (const std::string& term : spec.pos_train) {
        train.push_back(featurize(provider, term, anchors));
        labels.push_back(1);
    }
    for (const std::string& term : spec.neg_train) {
        train.push_back(featurize(provider, term, anchors));
        labels.push_back(-1);
    }

    std::vector<FeatureVector> test;
    std::vector<int> test_labels;
    auto add_tests = [&](const std::vector<std::string>& terms, int label) {
        for (const std::string& term : terms) {
            try {
                test.push_back(featurize(provider, term, anchors));
                test_labels.push_back(label);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::UnknownTerm)
                    throw;
                report.unclassifiable.push_back(term);
                report.warnings.push_back("test term '" + term +
                                          "' is unknown to the provider; excluded");
            }
        }
    };
    add_tests(spec.pos_test, 1);
    add_tests(spec.neg_test, -1);

    substitute_infinite_features(train, &test);

    std::vector<std::vector<double>> train_x;
    train_x.reserve(train.size());
    for (const FeatureVector& v : train)
        train_x.push_back(v.values);

    CvChoice cv = cross_validate(train_x, labels, CvGrid::defaults(), seed);
    report.gamma = cv.gamma;
    report.c = cv.c;
    report.cv_accuracy = cv.mean_accuracy;

    SvmModel model = SvmModel::train(train_x, labels, cv.gamma, cv.c);
    for (size_t i = 0; i < test.size(); ++i) {
        int predicted = model.predict(test[i].values);
        bool is_positive_test = test_labels[i] == 1;
        if (predicted == 1)
            (is_positive_test ? report.pos_test_pos_pred : report.neg_test_pos_pred)
                .push_back(test[i].word);
        else
            (is_positive_test ? report.pos_test_neg_pred : report.neg_test_neg_pred)
                .push_back(test[i].word);
        if (predicted == test_labels[i])
            ++report.correct;
    }
    report.total = test.size();
    report.accuracy =
        report.total == 0 ? 0.0
                          : static_cast<double>(report.correct) / static_cast<double>(report.total);
    return report;
}

} // namespace semdist
