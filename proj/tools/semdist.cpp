// semdist: similarity engine over page counts and compressors.
// Subcommands cover ingestion, count queries, NWD/NCD/PMI distances,
// distance matrices, quartet-tree clustering, anchor-SVM classification,
// translation matching, and randomized category trials.

#include "semdist/anchor_svm.hpp"
#include "semdist/compressor.hpp"
#include "semdist/corpus_index.hpp"
#include "semdist/count_provider.hpp"
#include "semdist/distances.hpp"
#include "semdist/error.hpp"
#include "semdist/experiments.hpp"
#include "semdist/matrix.hpp"
#include "semdist/quartet_tree.hpp"
#include "semdist/remote_provider.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace {

using namespace semdist;

struct ProviderOptions {
    std::string corpus;
    std::string cache;
    std::string remote;
    std::string count_path;
    std::string n_mode = "pages";
    std::optional<uint64_t> n_override;
    std::string load_cache;
    std::string save_cache;
    int min_interval_ms = 1000;
    int max_retries = 3;
};

void add_provider_flags(CLI::App* cmd, ProviderOptions& opts) {
    auto* corpus = cmd->add_option("--corpus", opts.corpus, "Saved corpus index file");
    auto* cache = cmd->add_option("--cache", opts.cache, "Count cache file (no upstream)");
    auto* remote =
        cmd->add_option("--remote", opts.remote, "Remote URL template with one {q}");
    corpus->excludes(cache)->excludes(remote);
    cache->excludes(remote);
    cmd->add_option("--count-path", opts.count_path,
                    "Dotted path to the count in the remote JSON response");
    cmd->add_option("--n-mode", opts.n_mode, "Normalizer for corpus providers")
        ->check(CLI::IsMember({"pages", "occurrences"}));
    cmd->add_option("--n", opts.n_override, "Override the total count N");
    cmd->add_option("--load-cache", opts.load_cache, "Preload cache entries from a file");
    cmd->add_option("--save-cache", opts.save_cache, "Write the provider cache on exit");
    cmd->add_option("--min-interval", opts.min_interval_ms,
                    "Minimum milliseconds between remote requests");
    cmd->add_option("--max-retries", opts.max_retries, "Remote retry limit");
}

std::unique_ptr<CountProvider> make_provider(const ProviderOptions& opts) {
    std::unique_ptr<CountProvider> provider;
    if (!opts.corpus.empty()) {
        auto index = std::make_shared<CorpusIndex>(CorpusIndex::load(opts.corpus));
        auto mode = opts.n_mode == "occurrences" ? CorpusProvider::NMode::occurrences
                                                 : CorpusProvider::NMode::pages;
        provider = std::make_unique<CorpusProvider>(std::move(index), mode);
    } else if (!opts.cache.empty()) {
        provider = std::make_unique<CacheOnlyProvider>(opts.cache);
    } else if (!opts.remote.empty()) {
        RemoteEndpointConfig cfg;
        cfg.url_template = opts.remote;
        cfg.count_path = opts.count_path;
        cfg.min_interval_ms = opts.min_interval_ms;
        cfg.max_retries = opts.max_retries;
        cfg.total_count = opts.n_override;
        provider = std::make_unique<RemoteProvider>(cfg);
    } else if (const char* env = std::getenv("SEMDIST_CACHE"); env && *env) {
        provider = std::make_unique<CacheOnlyProvider>(env);
    } else {
        fail(ErrorKind::InvalidParameter,
             "no provider: pass --corpus, --cache, or --remote (or set SEMDIST_CACHE)");
    }
    if (!opts.load_cache.empty())
        provider->load_cache(opts.load_cache);
    if (opts.n_override)
        provider->preload(CountQuery::total(), *opts.n_override);
    return provider;
}

void finish_provider(CountProvider& provider, const ProviderOptions& opts) {
    if (!opts.save_cache.empty())
        provider.flush_cache(opts.save_cache);
}

void write_text(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        fail(ErrorKind::IoError, "cannot write " + out_path);
    out << content;
}

std::vector<std::string> read_label_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::IoError, "cannot open " + path);
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            labels.push_back(line);
    }
    return labels;
}

int run(int argc, char** argv) {
    CLI::App app{"semdist: web/compression similarity distances and their applications"};
    app.require_subcommand(1);

    uint64_t seed = 1;
    int precision = 3;
    app.add_option("--seed", seed, "Seed for all randomized steps")->capture_default_str();
    app.add_option("--precision", precision, "Decimal places for printed numbers")
        ->capture_default_str();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Build a corpus index");
    std::string ingest_lines, ingest_dir, ingest_out, ingest_extra;
    bool ingest_no_fold = false;
    ingest->add_option("--lines", ingest_lines, "Text file, one document per line");
    ingest->add_option("--dir", ingest_dir, "Directory, one document per file");
    ingest->add_option("--out", ingest_out, "Index output path")->required();
    ingest->add_flag("--no-fold-case", ingest_no_fold, "Keep ASCII case");
    ingest->add_option("--extra-chars", ingest_extra, "Extra bytes treated as word characters");

    // counts
    auto* counts = app.add_subcommand("counts", "Query page counts");
    ProviderOptions counts_provider;
    add_provider_flags(counts, counts_provider);
    std::vector<std::string> counts_terms;
    bool counts_total = false, counts_near = false;
    uint32_t counts_window = 10;
    counts->add_option("terms", counts_terms, "One term (single) or two (pair)");
    counts->add_flag("--total", counts_total, "Query the normalizer N");
    counts->add_flag("--near", counts_near, "Proximity count (corpus providers)");
    counts->add_option("--window", counts_window, "NEAR window in tokens")
        ->capture_default_str();

    // nwd
    auto* nwd_cmd = app.add_subcommand("nwd", "Normalized web distance between two terms");
    ProviderOptions nwd_provider;
    add_provider_flags(nwd_cmd, nwd_provider);
    std::vector<std::string> nwd_terms;
    nwd_cmd->add_option("terms", nwd_terms, "Two terms")->expected(2);

    // ncd
    auto* ncd_cmd = app.add_subcommand("ncd", "Normalized compression distance between files");
    std::vector<std::string> ncd_files;
    std::string ncd_compressor = "deflate";
    ncd_cmd->add_option("files", ncd_files, "Two files")->expected(2);
    ncd_cmd->add_option("--compressor", ncd_compressor, "deflate | block | cmd:<argv>")
        ->capture_default_str();

    // pmi
    auto* pmi = app.add_subcommand("pmi", "PMI-IR association score");
    ProviderOptions pmi_provider;
    add_provider_flags(pmi, pmi_provider);
    std::vector<std::string> pmi_terms;
    bool pmi_near = false;
    uint32_t pmi_window = 10;
    pmi->add_option("terms", pmi_terms, "name1 name2 (score of name2 given name1)")
        ->expected(2);
    pmi->add_flag("--near", pmi_near, "Use the NEAR variant (score2)");
    pmi->add_option("--window", pmi_window, "NEAR window in tokens")->capture_default_str();

    // matrix
    auto* matrix_cmd = app.add_subcommand("matrix", "Pairwise distance matrix");
    ProviderOptions matrix_provider;
    add_provider_flags(matrix_cmd, matrix_provider);
    std::string matrix_metric = "nwd", matrix_labels_file, matrix_out, matrix_format = "csv";
    std::string matrix_compressor = "deflate";
    std::vector<std::string> matrix_labels;
    matrix_cmd->add_option("--metric", matrix_metric, "nwd | ncd | pmi")
        ->check(CLI::IsMember({"nwd", "ncd", "pmi"}))
        ->capture_default_str();
    matrix_cmd->add_option("--labels-file", matrix_labels_file,
                           "File with one label per line (files for ncd)");
    matrix_cmd->add_option("labels", matrix_labels, "Labels (files for ncd)");
    matrix_cmd->add_option("--out", matrix_out, "Output path (stdout when omitted)");
    matrix_cmd->add_option("--format", matrix_format, "csv | tsv")
        ->check(CLI::IsMember({"csv", "tsv"}))
        ->capture_default_str();
    matrix_cmd->add_option("--compressor", matrix_compressor, "Compressor for --metric ncd")
        ->capture_default_str();

    // tree
    auto* tree_cmd = app.add_subcommand("tree", "Fit a quartet tree to a distance matrix");
    std::string tree_matrix, tree_out, tree_format = "newick", tree_trace;
    int tree_restarts = 8;
    uint64_t tree_stall = 10000;
    tree_cmd->add_option("--matrix", tree_matrix, "Distance matrix (csv/tsv)")->required();
    tree_cmd->add_option("--out", tree_out, "Output path (stdout when omitted)");
    tree_cmd->add_option("--format", tree_format, "newick | dot")
        ->check(CLI::IsMember({"newick", "dot"}))
        ->capture_default_str();
    tree_cmd->add_option("--trace", tree_trace, "Write the best-score trace CSV here");
    tree_cmd->add_option("--restarts", tree_restarts, "Hill-climbing restarts")
        ->capture_default_str();
    tree_cmd->add_option("--stall", tree_stall, "Non-improving mutations before a restart stops")
        ->capture_default_str();

    // classify
    auto* classify = app.add_subcommand("classify", "Run an anchor-SVM experiment");
    ProviderOptions classify_provider;
    add_provider_flags(classify, classify_provider);
    std::string classify_experiment, classify_out;
    classify->add_option("--experiment", classify_experiment, "Experiment definition file")
        ->required();
    classify->add_option("--out", classify_out, "Output path (stdout when omitted)");

    // translate
    auto* translate = app.add_subcommand("translate", "Match translations by permutation");
    ProviderOptions translate_provider;
    add_provider_flags(translate, translate_provider);
    std::string translate_problem, translate_target_corpus, translate_target_cache;
    translate->add_option("--problem", translate_problem, "Bilingual problem file")->required();
    translate->add_option("--target-corpus", translate_target_corpus,
                          "Separate target-language corpus index");
    translate->add_option("--target-cache", translate_target_cache,
                          "Separate target-language cache file");

    // trial
    auto* trial = app.add_subcommand("trial", "Randomized category-learning trial");
    ProviderOptions trial_provider;
    add_provider_flags(trial, trial_provider);
    std::string trial_categories_dir, trial_dictionary, trial_out;
    std::vector<std::string> trial_category_files;
    int trial_bins = 10;
    trial->add_option("--categories", trial_categories_dir, "Directory of category files");
    trial->add_option("--category", trial_category_files, "Individual category file(s)");
    trial->add_option("--dictionary", trial_dictionary, "Dictionary word list")->required();
    trial->add_option("--bins", trial_bins, "Histogram bins over [0, 1]")
        ->capture_default_str();
    trial->add_option("--out", trial_out, "Prefix for report CSVs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (ingest->parsed()) {
        TokenizerConfig cfg;
        cfg.fold_case = !ingest_no_fold;
        cfg.extra_word_chars = ingest_extra;
        if (ingest_lines.empty() == ingest_dir.empty())
            fail(ErrorKind::InvalidParameter, "pass exactly one of --lines or --dir");
        CorpusIndex index = ingest_lines.empty()
                                ? CorpusIndex::from_directory(ingest_dir, cfg)
                                : CorpusIndex::from_lines_file(ingest_lines, cfg);
        index.save(ingest_out);
        std::cout << "docs=" << index.doc_count() << " terms=" << index.term_count()
                  << " occurrences=" << index.occurrence_count() << "\n";
        return 0;
    }

    if (counts->parsed()) {
        auto provider = make_provider(counts_provider);
        uint64_t value = 0;
        if (counts_total) {
            value = provider->total_count();
        } else if (counts_near) {
            if (counts_terms.size() != 2)
                fail(ErrorKind::InvalidParameter, "--near needs exactly two terms");
            auto near = provider->near_count(normalize_term(counts_terms[0]),
                                             normalize_term(counts_terms[1]), counts_window);
            if (!near)
                fail(ErrorKind::NoProximitySupport,
                     std::string(provider->name()) + " provider cannot answer NEAR queries");
            value = *near;
        } else if (counts_terms.size() == 1) {
            value = provider->single_count(counts_terms[0]);
        } else if (counts_terms.size() == 2) {
            value = provider->pair_count(counts_terms[0], counts_terms[1]);
        } else {
            fail(ErrorKind::InvalidParameter, "pass one term, two terms, or --total");
        }
        std::cout << value << "\n";
        finish_provider(*provider, counts_provider);
        return 0;
    }

    if (nwd_cmd->parsed()) {
        auto provider = make_provider(nwd_provider);
        NwdValue v = nwd(*provider, nwd_terms[0], nwd_terms[1]);
        if (v.inconsistent)
            std::cerr << "warning: f(x,y) exceeds min(f(x), f(y)); raw value reported\n";
        std::cout << format_fixed(v.value, precision) << "\n";
        finish_provider(*provider, nwd_provider);
        return 0;
    }

    if (ncd_cmd->parsed()) {
        auto compressor = make_compressor(ncd_compressor);
        std::vector<unsigned char> x = read_file_bytes(ncd_files[0]);
        std::vector<unsigned char> y = read_file_bytes(ncd_files[1]);
        std::cout << format_fixed(ncd(*compressor, x, y), precision) << "\n";
        return 0;
    }

    if (pmi->parsed()) {
        auto provider = make_provider(pmi_provider);
        double score = pmi_near
                           ? pmi_score2(*provider, pmi_terms[0], pmi_terms[1], pmi_window)
                           : pmi_score1(*provider, pmi_terms[0], pmi_terms[1]);
        std::cout << format_fixed(score, precision) << "\n";
        finish_provider(*provider, pmi_provider);
        return 0;
    }

    if (matrix_cmd->parsed()) {
        std::vector<std::string> labels = matrix_labels;
        if (!matrix_labels_file.empty()) {
            auto from_file = read_label_file(matrix_labels_file);
            labels.insert(labels.end(), from_file.begin(), from_file.end());
        }
        DistanceMatrix m;
        if (matrix_metric == "ncd") {
            auto compressor = make_compressor(matrix_compressor);
            m = build_ncd_matrix(*compressor, labels);
        } else {
            auto provider = make_provider(matrix_provider);
            if (matrix_metric == "nwd") {
                MatrixBuildReport report;
                m = build_nwd_matrix(*provider, labels, &report);
                if (report.infinite_entries > 0)
                    std::cerr << "warning: " << report.infinite_entries
                              << " infinite entries (f(x,y) = 0)\n";
                if (report.inconsistent_pairs > 0)
                    std::cerr << "warning: " << report.inconsistent_pairs
                              << " pairs with f(x,y) > min(f(x), f(y))\n";
            } else {
                m = build_pmi_matrix(*provider, labels);
            }
            finish_provider(*provider, matrix_provider);
        }
        write_text(matrix_out, m.to_string(matrix_format == "tsv" ? '\t' : ',', precision));
        return 0;
    }

    if (tree_cmd->parsed()) {
        DistanceMatrix m = DistanceMatrix::read_file(tree_matrix);
        if (m.size() > 25)
            std::cerr << "warning: " << m.size()
                      << " objects; tree fidelity degrades above 25\n";
        if (m.infinite_count() > 0) {
            double replacement = 0.0;
            m = substitute_infinities(m, &replacement);
            std::cerr << "warning: infinite entries replaced by "
                      << format_fixed(replacement, precision) << "\n";
        }
        OptimizeParams params;
        params.restarts = tree_restarts;
        params.stall_limit = tree_stall;
        params.seed = seed;
        OptimizeResult result = optimize(m, params);
        std::cerr << "S(T) = " << format_fixed(result.score.s, 6) << "\n";
        if (!tree_trace.empty()) {
            std::ostringstream trace;
            trace << "step,best_s\n";
            for (const TracePoint& p : result.trace)
                trace << p.step << "," << format_fixed(p.best_s, 6) << "\n";
            write_text(tree_trace, trace.str());
        }
        std::string content;
        if (tree_format == "dot") {
            RingOrder ring = ring_order(result.tree, m);
            content = to_dot(result.tree, &result.score, &ring, precision);
        } else {
            content = to_newick(result.tree) + "\n";
        }
        write_text(tree_out, content);
        return 0;
    }

    if (classify->parsed()) {
        auto provider = make_provider(classify_provider);
        ExperimentSpec spec = ExperimentSpec::load_file(classify_experiment);
        ExperimentReport report = run_experiment(*provider, spec, seed);
        for (const std::string& w : report.warnings)
            std::cerr << "warning: " << w << "\n";
        write_text(classify_out, report.to_text());
        finish_provider(*provider, classify_provider);
        return 0;
    }

    if (translate->parsed()) {
        auto provider = make_provider(translate_provider);
        std::unique_ptr<CountProvider> target_holder;
        CountProvider* target = provider.get();
        if (!translate_target_corpus.empty()) {
            auto index =
                std::make_shared<CorpusIndex>(CorpusIndex::load(translate_target_corpus));
            target_holder = std::make_unique<CorpusProvider>(std::move(index));
            target = target_holder.get();
        } else if (!translate_target_cache.empty()) {
            target_holder = std::make_unique<CacheOnlyProvider>(translate_target_cache);
            target = target_holder.get();
        }
        BilingualProblem problem = BilingualProblem::load_file(translate_problem);
        TranslationResult result = translate_match(problem, *provider, *target);
        if (result.matched) {
            for (const auto& [src, dst] : result.mapping)
                std::cout << src << " -> " << dst << "\n";
            std::cout << "correlation = " << format_fixed(result.correlation, precision)
                      << "\n";
        } else {
            std::cout << "failure to extend vocabulary (best correlation = "
                      << format_fixed(result.correlation, precision) << ")\n";
        }
        finish_provider(*provider, translate_provider);
        return 0;
    }

    if (trial->parsed()) {
        auto provider = make_provider(trial_provider);
        TrialConfig config;
        config.seed = seed;
        config.bins = trial_bins;
        config.dictionary_file = trial_dictionary;
        for (const std::string& f : trial_category_files)
            config.category_files.emplace_back(f);
        if (!trial_categories_dir.empty()) {
            std::vector<std::filesystem::path> files;
            for (const auto& entry :
                 std::filesystem::directory_iterator(trial_categories_dir))
                if (entry.is_regular_file())
                    files.push_back(entry.path());
            std::sort(files.begin(), files.end());
            config.category_files.insert(config.category_files.end(), files.begin(),
                                         files.end());
        }
        TrialReport report = run_trial(config, *provider);
        if (!trial_out.empty()) {
            write_text(trial_out + "_categories.csv", report.per_category_csv());
            write_text(trial_out + "_histogram.csv", report.histogram_csv());
        } else {
            std::cout << report.per_category_csv();
            std::cout << report.histogram_csv();
        }
        std::cout << report.summary_text();
        finish_provider(*provider, trial_provider);
        return 0;
    }

    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const semdist::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
