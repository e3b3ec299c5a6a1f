#include "semdist/distances.hpp"

#include "semdist/error.hpp"

#include <cmath>
#include <limits>

namespace semdist {

double nwd_from_counts(const CountRecord& r) {
    if (r.f_x == 0 || r.f_y == 0)
        fail(ErrorKind::UnknownTerm, "single count is zero");
    if (r.n == 0)
        fail(ErrorKind::DegenerateNormalizer, "N must be >= 1");
    double lx = std::log2(static_cast<double>(r.f_x));
    double ly = std::log2(static_cast<double>(r.f_y));
    double lo = std::min(lx, ly);
    double hi = std::max(lx, ly);
    double denom = std::log2(static_cast<double>(r.n)) - lo;
    if (denom <= 0.0)
        fail(ErrorKind::DegenerateNormalizer,
             "log N <= min log f (N=" + std::to_string(r.n) + ")");
    if (r.f_xy == 0)
        return std::numeric_limits<double>::infinity();
    return (hi - std::log2(static_cast<double>(r.f_xy))) / denom;
}

NwdValue nwd(CountProvider& provider, std::string_view x, std::string_view y) {
    std::string nx = normalize_term(x);
    std::string ny = normalize_term(y);

    NwdValue out;
    out.counts.f_x = provider.single_count(nx);
    if (out.counts.f_x == 0)
        fail(ErrorKind::UnknownTerm, "'" + nx + "' has zero count");
    out.counts.f_y = nx == ny ? out.counts.f_x : provider.single_count(ny);
    if (out.counts.f_y == 0)
        fail(ErrorKind::UnknownTerm, "'" + ny + "' has zero count");
    out.counts.n = provider.total_count();

    if (nx == ny) {
        out.counts.f_xy = out.counts.f_x;
        out.value = 0.0;
        return out;
    }

    out.counts.f_xy = provider.pair_count(nx, ny);
    out.inconsistent = out.counts.f_xy > std::min(out.counts.f_x, out.counts.f_y);
    out.value = nwd_from_counts(out.counts);
    return out;
}

double code_length_bits(CountProvider& provider, std::string_view term) {
    std::string t = normalize_term(term);
    uint64_t f = provider.single_count(t);
    if (f == 0)
        fail(ErrorKind::UnknownTerm, "'" + t + "' has zero count");
    uint64_t n = provider.total_count();
    if (n == 0)
        fail(ErrorKind::DegenerateNormalizer, "N must be >= 1");
    return std::log2(static_cast<double>(n) / static_cast<double>(f));
}

double ncd(const Compressor& compressor, std::span<const unsigned char> x,
           std::span<const unsigned char> y) {
    uint64_t zx = compressor.compressed_bits(x);
    uint64_t zy = compressor.compressed_bits(y);
    std::vector<unsigned char> xy;
    xy.reserve(x.size() + y.size());
    xy.insert(xy.end(), x.begin(), x.end());
    xy.insert(xy.end(), y.begin(), y.end());
    uint64_t zxy = compressor.compressed_bits(xy);

    uint64_t zmax = std::max(zx, zy);
    if (zmax == 0)
        fail(ErrorKind::DegenerateInput, "max{Z(x), Z(y)} is zero");
    uint64_t zmin = std::min(zx, zy);
    return (static_cast<double>(zxy) - static_cast<double>(zmin)) / static_cast<double>(zmax);
}

double pmi_score1(CountProvider& provider, std::string_view name1, std::string_view name2) {
    std::string n1 = normalize_term(name1);
    std::string n2 = normalize_term(name2);
    uint64_t f2 = provider.single_count(n2);
    if (f2 == 0)
        fail(ErrorKind::UnknownTerm, "'" + n2 + "' has zero count");
    if (n1 == n2)
        return 1.0;
    uint64_t f12 = provider.pair_count(n1, n2);
    return static_cast<double>(f12) / static_cast<double>(f2);
}

double pmi_score2(CountProvider& provider, std::string_view name1, std::string_view name2,
                  uint32_t window) {
    std::string n1 = normalize_term(name1);
    std::string n2 = normalize_term(name2);
    uint64_t f2 = provider.single_count(n2);
    if (f2 == 0)
        fail(ErrorKind::UnknownTerm, "'" + n2 + "' has zero count");
    std::optional<uint64_t> near = provider.near_count(n1, n2, window);
    if (!near)
        fail(ErrorKind::NoProximitySupport,
             std::string(provider.name()) + " provider cannot answer NEAR queries");
    return static_cast<double>(*near) / static_cast<double>(f2);
}

namespace {

void require_labels(const std::vector<std::string>& labels) {
    if (labels.size() < 2)
        fail(ErrorKind::TooFewObjects, "matrix needs at least 2 labels");
    for (size_t i = 0; i < labels.size(); ++i)
        for (size_t j = i + 1; j < labels.size(); ++j)
            if (labels[i] == labels[j])
                fail(ErrorKind::InvalidParameter, "duplicate label '" + labels[i] + "'");
}

[[noreturn]] void rethrow_for_pair(const Error& e, const std::string& a, const std::string& b) {
    throw Error(e.kind(), "pair (" + a + ", " + b + "): " + e.what());
}

} // namespace

DistanceMatrix build_nwd_matrix(CountProvider& provider, const std::vector<std::string>& labels,
                                MatrixBuildReport* report) {
    require_labels(labels);
    DistanceMatrix m(labels);
    MatrixBuildReport rep;
    for (size_t i = 0; i < labels.size(); ++i) {
        for (size_t j = i + 1; j < labels.size(); ++j) {
            try {
                NwdValue v = nwd(provider, labels[i], labels[j]);
                if (std::isinf(v.value))
                    ++rep.infinite_entries;
                if (v.inconsistent)
                    ++rep.inconsistent_pairs;
                m.set_symmetric(i, j, v.value);
            } catch (const Error& e) {
                rethrow_for_pair(e, labels[i], labels[j]);
            }
        }
    }
    if (report)
        *report = rep;
    return m;
}

DistanceMatrix build_ncd_matrix(const Compressor& compressor,
                                const std::vector<std::string>& files) {
    require_labels(files);
    std::vector<std::vector<unsigned char>> contents;
    contents.reserve(files.size());
    for (const auto& f : files)
        contents.push_back(read_file_bytes(f));

    DistanceMatrix m(files);
    for (size_t i = 0; i < files.size(); ++i) {
        for (size_t j = i + 1; j < files.size(); ++j) {
            try {
                m.set_symmetric(i, j, ncd(compressor, contents[i], contents[j]));
            } catch (const Error& e) {
                rethrow_for_pair(e, files[i], files[j]);
            }
        }
    }
    return m;
}

DistanceMatrix build_pmi_matrix(CountProvider& provider,
                                const std::vector<std::string>& labels) {
    require_labels(labels);
    DistanceMatrix m(labels);
    std::vector<uint64_t> singles(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
        singles[i] = provider.single_count(normalize_term(labels[i]));
        if (singles[i] == 0)
            fail(ErrorKind::UnknownTerm, "'" + labels[i] + "' has zero count");
        m.set(i, i, 1.0);
    }
    for (size_t i = 0; i < labels.size(); ++i) {
        for (size_t j = i + 1; j < labels.size(); ++j) {
            try {
                uint64_t f12 = provider.pair_count(normalize_term(labels[i]),
                                                   normalize_term(labels[j]));
                double v = static_cast<double>(f12) /
                           static_cast<double>(std::min(singles[i], singles[j]));
                m.set_symmetric(i, j, v);
            } catch (const Error& e) {
                rethrow_for_pair(e, labels[i], labels[j]);
            }
        }
    }
    return m;
}

DistanceMatrix substitute_infinities(const DistanceMatrix& m, double* replacement) {
    DistanceMatrix out = m;
    if (m.infinite_count() == 0)
        return out;
    double max_finite = m.max_finite();
    if (!std::isfinite(max_finite))
        max_finite = 0.0; // every off-diagonal entry infinite
    double sub = 1.0 + max_finite;
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m.size(); ++j)
            if (std::isinf(m.at(i, j)))
                out.set(i, j, sub);
    if (replacement)
        *replacement = sub;
    return out;
}

} // namespace semdist
