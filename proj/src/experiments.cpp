#include "semdist/experiments.hpp"

#include "semdist/distances.hpp"
#include "semdist/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace semdist {

BasisMatrix basis_matrix(CountProvider& provider, const std::vector<std::string>& row_terms,
                         const std::vector<std::string>& col_terms) {
    BasisMatrix m;
    m.rows = row_terms.size();
    m.cols = col_terms.size();
    m.values.reserve(m.rows * m.cols);
    for (const std::string& row : row_terms)
        for (const std::string& col : col_terms)
            m.values.push_back(nwd(provider, row, col).value);
    return m;
}

double pearson(const BasisMatrix& a, const BasisMatrix& b) {
    if (a.rows != b.rows || a.cols != b.cols)
        fail(ErrorKind::InvalidParameter, "correlation needs equal shapes");
    size_t n = a.values.size();
    if (n < 2)
        fail(ErrorKind::InvalidParameter, "correlation needs at least 2 entries");

    // Welford-style co-moment accumulation.
    double mean_a = 0.0, mean_b = 0.0, m2a = 0.0, m2b = 0.0, cab = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double count = static_cast<double>(i + 1);
        double da = a.values[i] - mean_a;
        double db = b.values[i] - mean_b;
        mean_a += da / count;
        mean_b += db / count;
        m2a += da * (a.values[i] - mean_a);
        m2b += db * (b.values[i] - mean_b);
        cab += da * (b.values[i] - mean_b);
    }
    if (m2a == 0.0 || m2b == 0.0)
        fail(ErrorKind::UndefinedCorrelation, "zero variance in flattened matrix");
    return cab / std::sqrt(m2a * m2b);
}

BilingualProblem BilingualProblem::load(std::istream& in, const std::string& origin) {
    BilingualProblem problem;
    enum class Section { none, known, unknown_source, unknown_target };
    Section current = Section::none;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        auto bad = [&](const std::string& what) {
            fail(ErrorKind::FormatError,
                 origin + ":" + std::to_string(line_no) + ": " + what);
        };
        std::string trimmed = line;
        size_t b = trimmed.find_first_not_of(" \t");
        if (b == std::string::npos)
            continue;
        size_t e = trimmed.find_last_not_of(" \t");
        trimmed = trimmed.substr(b, e - b + 1);
        if (trimmed[0] == '#')
            continue;
        if (trimmed.front() == '[' && trimmed.back() == ']') {
            std::string name = trimmed.substr(1, trimmed.size() - 2);
            if (name == "known")
                current = Section::known;
            else if (name == "unknown-source")
                current = Section::unknown_source;
            else if (name == "unknown-target")
                current = Section::unknown_target;
            else
                bad("unknown section [" + name + "]");
            continue;
        }
        switch (current) {
        case Section::none:
            bad("term before any section header");
            break;
        case Section::known: {
            std::vector<std::string> parts = split(trimmed, '\t');
            if (parts.size() != 2 || parts[0].empty() || parts[1].empty())
                bad("known pair must be 'source<TAB>target'");
            problem.known.emplace_back(parts[0], parts[1]);
            break;
        }
        case Section::unknown_source:
            problem.unknown_source.push_back(trimmed);
            break;
        case Section::unknown_target:
            problem.unknown_target.push_back(trimmed);
            break;
        }
    }

    if (problem.unknown_source.size() != problem.unknown_target.size())
        fail(ErrorKind::FormatError, origin + ": unknown term lists differ in size");
    if (problem.unknown_source.size() < 2)
        fail(ErrorKind::FormatError, origin + ": needs at least 2 unknown terms");
    if (problem.known.empty())
        fail(ErrorKind::FormatError, origin + ": needs at least one known pair");
    auto check_unique = [&](const std::vector<std::string>& terms, const char* what) {
        std::set<std::string> seen;
        for (const std::string& t : terms)
            if (!seen.insert(normalize_term(t)).second)
                fail(ErrorKind::FormatError,
                     origin + ": repeated term '" + t + "' in " + what);
    };
    check_unique(problem.unknown_source, "unknown-source");
    check_unique(problem.unknown_target, "unknown-target");
    return problem;
}

BilingualProblem BilingualProblem::load_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::IoError, "cannot open " + path.string());
    return load(in, path.string());
}

TranslationResult translate_match(const BilingualProblem& problem,
                                  CountProvider& source_provider,
                                  CountProvider& target_provider) {
    size_t k = problem.unknown_source.size();
    if (k > 8)
        fail(ErrorKind::TooManyUnknowns,
             "permutation search is limited to 8 unknowns (" + std::to_string(k) + " given)");

    std::vector<std::string> known_source, known_target;
    for (const auto& [src, dst] : problem.known) {
        known_source.push_back(src);
        known_target.push_back(dst);
    }

    BasisMatrix source = basis_matrix(source_provider, problem.unknown_source, known_source);
    BasisMatrix target = basis_matrix(target_provider, problem.unknown_target, known_target);

    // Infinite entries would poison the correlation; substitute per side the
    // same way the feature pipeline does.
    auto patch = [](BasisMatrix& m) {
        double max_finite = -std::numeric_limits<double>::infinity();
        for (double v : m.values)
            if (std::isfinite(v))
                max_finite = std::max(max_finite, v);
        for (double& v : m.values)
            if (std::isinf(v))
                v = std::isfinite(max_finite) ? 1.0 + max_finite : 1.0;
    };
    patch(source);
    patch(target);

    std::vector<size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);

    TranslationResult result;
    bool first = true;
    BasisMatrix permuted{target.rows, target.cols, std::vector<double>(target.values.size())};
    do {
        for (size_t r = 0; r < k; ++r)
            std::copy_n(target.values.begin() + static_cast<long>(perm[r] * target.cols),
                        target.cols, permuted.values.begin() + static_cast<long>(r * target.cols));
        double corr = pearson(source, permuted);
        if (first || corr > result.correlation) {
            result.correlation = corr;
            result.permutation = perm;
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    result.matched = result.correlation > 0.0;
    for (size_t i = 0; i < k; ++i)
        result.mapping.emplace_back(problem.unknown_source[i],
                                    problem.unknown_target[result.permutation[i]]);
    return result;
}

AccuracyStats accuracy_stats(const std::vector<double>& accuracies) {
    AccuracyStats stats;
    if (accuracies.empty())
        return stats;
    double n = static_cast<double>(accuracies.size());
    stats.mean = std::accumulate(accuracies.begin(), accuracies.end(), 0.0) / n;
    double ss = 0.0;
    for (double a : accuracies) {
        double d = a - stats.mean;
        ss += d * d;
    }
    stats.variance = ss / n;
    stats.stddev = std::sqrt(stats.variance);
    return stats;
}

namespace {

std::vector<std::string> load_terms(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::IoError, "cannot open " + path.string());
    std::vector<std::string> terms;
    std::set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::string term = normalize_term(line);
        if (term.empty() || term[0] == '#')
            continue;
        if (seen.insert(term).second)
            terms.push_back(term);
    }
    return terms;
}

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Draw `count` terms without replacement, excluding `taken`; the drawn terms
// are added to `taken`.
std::vector<std::string> draw(std::vector<std::string> pool, size_t count,
                              std::set<std::string>& taken, std::mt19937_64& rng) {
    std::erase_if(pool, [&](const std::string& t) { return taken.contains(t); });
    if (pool.size() < count)
        fail(ErrorKind::InsufficientData,
             "need " + std::to_string(count) + " terms, pool has " +
                 std::to_string(pool.size()));
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(count);
    for (const std::string& t : pool)
        taken.insert(t);
    return pool;
}

} // namespace

TrialReport run_trial(const TrialConfig& config, CountProvider& provider) {
    if (config.category_files.empty())
        fail(ErrorKind::InvalidParameter, "no category files given");
    if (config.bins < 1)
        fail(ErrorKind::InvalidParameter, "bins must be >= 1");

    std::vector<std::string> dictionary = load_terms(config.dictionary_file);

    TrialReport report;
    report.bins = config.bins;
    report.histogram.assign(static_cast<size_t>(config.bins), 0);

    std::vector<double> accuracies;
    for (size_t ci = 0; ci < config.category_files.size(); ++ci) {
        const auto& path = config.category_files[ci];
        CategoryOutcome outcome;
        outcome.name = path.stem().string();

        uint64_t fetches_before = provider.stats().fetches;
        try {
            std::vector<std::string> category = load_terms(path);
            std::mt19937_64 rng(mix_seed(config.seed, ci));

            // Positives, anchors, and tests never overlap within a category
            // run; negatives are dictionary draws disjoint from everything
            // drawn so far.
            std::set<std::string> taken;
            ExperimentSpec spec;
            spec.pos_train = draw(category, config.train_per_class, taken, rng);
            spec.pos_test = draw(category, config.test_per_class, taken, rng);
            std::vector<std::string> cat_anchors =
                draw(category, config.anchors_from_category, taken, rng);
            spec.neg_train = draw(dictionary, config.train_per_class, taken, rng);
            spec.neg_test = draw(dictionary, config.test_per_class, taken, rng);
            std::vector<std::string> dict_anchors =
                draw(dictionary, config.anchors_from_dictionary, taken, rng);

            spec.anchors = cat_anchors;
            spec.anchors.insert(spec.anchors.end(), dict_anchors.begin(), dict_anchors.end());

            ExperimentReport experiment = run_experiment(provider, spec, mix_seed(config.seed, ci));
            outcome.completed = true;
            outcome.accuracy = experiment.accuracy;
        } catch (const Error& e) {
            outcome.completed = false;
            outcome.note = e.what();
        }
        outcome.fetches = provider.stats().fetches - fetches_before;

        if (outcome.completed) {
            accuracies.push_back(outcome.accuracy);
            double clamped = std::clamp(outcome.accuracy, 0.0, 1.0);
            size_t bin = std::min(static_cast<size_t>(clamped * config.bins),
                                  static_cast<size_t>(config.bins - 1));
            ++report.histogram[bin];
            ++report.completed;
        }
        report.categories.push_back(std::move(outcome));
    }

    report.stats = accuracy_stats(accuracies);
    return report;
}

std::string TrialReport::per_category_csv() const {
    std::ostringstream out;
    out << "category,accuracy,fetches\n";
    for (const CategoryOutcome& c : categories) {
        out << c.name << ",";
        if (c.completed)
            out << format_fixed(c.accuracy, 4);
        else
            out << "skipped";
        out << "," << c.fetches << "\n";
    }
    return out.str();
}

std::string TrialReport::histogram_csv() const {
    std::ostringstream out;
    out << "bin_low,bin_high,count\n";
    for (size_t b = 0; b < histogram.size(); ++b) {
        double low = static_cast<double>(b) / bins;
        double high = static_cast<double>(b + 1) / bins;
        out << format_fixed(low, 2) << "," << format_fixed(high, 2) << "," << histogram[b]
            << "\n";
    }
    return out.str();
}

std::string TrialReport::summary_text() const {
    std::ostringstream out;
    out << "categories completed = " << completed << "/" << categories.size() << "\n";
    out << "mean accuracy = " << format_fixed(stats.mean, 4) << "\n";
    out << "variance = " << format_fixed(stats.variance, 6) << "\n";
    out << "stddev = " << format_fixed(stats.stddev, 4) << "\n";
    for (const CategoryOutcome& c : categories)
        if (!c.completed)
            out << "skipped " << c.name << ": " << c.note << "\n";
    return out.str();
}

} // namespace semdist
