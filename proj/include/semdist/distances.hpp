#pragma once

#include "semdist/compressor.hpp"
#include "semdist/count_provider.hpp"
#include "semdist/matrix.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace semdist {

// The count triple plus normalizer that fully determines one NWD value.
struct CountRecord {
    uint64_t f_x = 0;
    uint64_t f_y = 0;
    uint64_t f_xy = 0;
    uint64_t n = 0;
};

struct NwdValue {
    double value = 0.0;
    // f(x,y) > min(f(x), f(y)): possible with remote counts; the raw value
    // is reported (it may be negative) and this flag raised.
    bool inconsistent = false;
    CountRecord counts;
};

// e(x,y) = (max{log f(x), log f(y)} - log f(x,y)) / (log N - min{log f(x), log f(y)})
// computed base 2. +inf when f_xy = 0. Throws UnknownTerm when a single
// count is 0, DegenerateNormalizer when log N <= min log f.
double nwd_from_counts(const CountRecord& r);

NwdValue nwd(CountProvider& provider, std::string_view x, std::string_view y);

// G(x) = log2(N / f(x)) bits.
double code_length_bits(CountProvider& provider, std::string_view term);

// (Z(xy) - min{Z(x), Z(y)}) / max{Z(x), Z(y)} with xy the raw concatenation.
double ncd(const Compressor& compressor, std::span<const unsigned char> x,
           std::span<const unsigned char> y);

// score1 = f(name1, name2) / f(name2)
double pmi_score1(CountProvider& provider, std::string_view name1, std::string_view name2);
// score2 = near(name1, name2, window) / f(name2); NoProximitySupport unless
// the provider is corpus-backed.
double pmi_score2(CountProvider& provider, std::string_view name1, std::string_view name2,
                  uint32_t window);

struct MatrixBuildReport {
    size_t infinite_entries = 0;
    size_t inconsistent_pairs = 0;
};

DistanceMatrix build_nwd_matrix(CountProvider& provider, const std::vector<std::string>& labels,
                                MatrixBuildReport* report = nullptr);

// Labels are file paths; entries are NCD values between file contents.
DistanceMatrix build_ncd_matrix(const Compressor& compressor,
                                const std::vector<std::string>& files);

// Symmetric association matrix: entry = f(x,y)/min(f(x), f(y)), the larger
// of the two directed score1 values; diagonal is 1.
DistanceMatrix build_pmi_matrix(CountProvider& provider, const std::vector<std::string>& labels);

// Copy with +inf entries replaced by 1 + max finite entry (the tree module
// needs finite costs). `replacement` receives the substituted value when any
// entry was infinite.
DistanceMatrix substitute_infinities(const DistanceMatrix& m, double* replacement = nullptr);

} // namespace semdist
