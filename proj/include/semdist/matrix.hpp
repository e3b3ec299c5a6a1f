#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semdist {

// Labeled square matrix of pairwise distances. Symmetry for the distance
// metrics is enforced at build time by computing each unordered pair once.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::vector<std::string> labels);

    size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }

    double at(size_t i, size_t j) const { return entries_[i * size() + j]; }
    void set(size_t i, size_t j, double v) { entries_[i * size() + j] = v; }
    void set_symmetric(size_t i, size_t j, double v) {
        set(i, j, v);
        set(j, i, v);
    }

    std::optional<size_t> index_of(std::string_view label) const;

    size_t infinite_count() const;
    double max_finite() const; // -inf when no finite off-diagonal entry exists

    // Header row of labels, then one row per label: label + fixed-precision
    // fields. Infinite entries are written as "inf".
    void write(std::ostream& out, char delim = ',', int precision = 3) const;
    std::string to_string(char delim = ',', int precision = 3) const;
    static DistanceMatrix read(std::istream& in, char delim = ',');
    static DistanceMatrix read_file(const std::string& path); // delim from extension

private:
    std::vector<std::string> labels_;
    std::vector<double> entries_;
};

} // namespace semdist
