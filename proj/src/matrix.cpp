#include "semdist/matrix.hpp"

#include "semdist/error.hpp"
#include "semdist/text.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace semdist {

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)), entries_(labels_.size() * labels_.size(), 0.0) {}

std::optional<size_t> DistanceMatrix::index_of(std::string_view label) const {
    for (size_t i = 0; i < labels_.size(); ++i)
        if (labels_[i] == label)
            return i;
    return std::nullopt;
}

size_t DistanceMatrix::infinite_count() const {
    size_t count = 0;
    for (double v : entries_)
        if (std::isinf(v))
            ++count;
    return count;
}

double DistanceMatrix::max_finite() const {
    double best = -std::numeric_limits<double>::infinity();
    for (double v : entries_)
        if (std::isfinite(v) && v > best)
            best = v;
    return best;
}

namespace {

bool needs_quoting(const std::string& field, char delim) {
    return field.find(delim) != std::string::npos || field.find('"') != std::string::npos ||
           field.find('\n') != std::string::npos;
}

std::string quote_field(const std::string& field, char delim) {
    if (!needs_quoting(field, delim))
        return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += "\"\"";
        else
            out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> parse_row(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"' && current.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

} // namespace

void DistanceMatrix::write(std::ostream& out, char delim, int precision) const {
    size_t n = size();
    for (size_t j = 0; j < n; ++j) {
        if (j > 0)
            out << delim;
        out << quote_field(labels_[j], delim);
    }
    out << '\n';
    for (size_t i = 0; i < n; ++i) {
        out << quote_field(labels_[i], delim);
        for (size_t j = 0; j < n; ++j)
            out << delim << format_fixed(at(i, j), precision);
        out << '\n';
    }
}

std::string DistanceMatrix::to_string(char delim, int precision) const {
    std::ostringstream ss;
    write(ss, delim, precision);
    return ss.str();
}

DistanceMatrix DistanceMatrix::read(std::istream& in, char delim) {
    std::string line;
    if (!std::getline(in, line))
        fail(ErrorKind::FormatError, "empty matrix file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    std::vector<std::string> labels = parse_row(line, delim);
    if (labels.size() < 2)
        fail(ErrorKind::FormatError, "matrix needs at least 2 labels");
    DistanceMatrix m(labels);
    size_t n = labels.size();
    for (size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            fail(ErrorKind::FormatError, "matrix truncated at row " + std::to_string(i));
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::vector<std::string> fields = parse_row(line, delim);
        if (fields.size() != n + 1)
            fail(ErrorKind::FormatError,
                 "row " + std::to_string(i) + " has " + std::to_string(fields.size()) +
                     " fields, expected " + std::to_string(n + 1));
        if (fields[0] != labels[i])
            fail(ErrorKind::FormatError, "row label '" + fields[0] +
                                             "' does not match header '" + labels[i] + "'");
        for (size_t j = 0; j < n; ++j) {
            double v = 0;
            if (!parse_double(fields[j + 1], v))
                fail(ErrorKind::FormatError,
                     "bad number '" + fields[j + 1] + "' at (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
            m.set(i, j, v);
        }
    }
    return m;
}

DistanceMatrix DistanceMatrix::read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::IoError, "cannot open " + path);
    char delim = path.size() >= 4 && path.substr(path.size() - 4) == ".tsv" ? '\t' : ',';
    return read(in, delim);
}

} // namespace semdist
