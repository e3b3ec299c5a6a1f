#include "semdist/text.hpp"

#include "semdist/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace semdist {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::InvalidWindow: return "InvalidWindow";
    case ErrorKind::UnknownTerm: return "UnknownTerm";
    case ErrorKind::DegenerateNormalizer: return "DegenerateNormalizer";
    case ErrorKind::UpstreamError: return "UpstreamError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NoProximitySupport: return "NoProximitySupport";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::CompressorError: return "CompressorError";
    case ErrorKind::InfiniteDistance: return "InfiniteDistance";
    case ErrorKind::DegenerateMatrix: return "DegenerateMatrix";
    case ErrorKind::TooFewObjects: return "TooFewObjects";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::InvalidFeature: return "InvalidFeature";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::TooManyUnknowns: return "TooManyUnknowns";
    case ErrorKind::UndefinedCorrelation: return "UndefinedCorrelation";
    }
    return "Error";
}

namespace {

bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_word_byte(unsigned char c, const TokenizerConfig& cfg) {
    if (is_ascii_alnum(c) || c >= 0x80)
        return true;
    return cfg.extra_word_chars.find(static_cast<char>(c)) != std::string::npos;
}

} // namespace

void validate(const TokenizerConfig& cfg) {
    for (unsigned char c : cfg.extra_word_chars) {
        if (c <= 0x20 || c == 0x7f)
            fail(ErrorKind::InvalidParameter,
                 "extra_word_chars may not contain whitespace or control bytes");
    }
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_word_byte(c, cfg)) {
            if (cfg.fold_case && c >= 'A' && c <= 'Z')
                c = static_cast<unsigned char>(c - 'A' + 'a');
            current.push_back(static_cast<char>(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty())
        tokens.push_back(std::move(current));
    return tokens;
}

std::string fold_ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
    return out;
}

std::string normalize_term(std::string_view term) {
    size_t b = 0, e = term.size();
    while (b < e && std::isspace(static_cast<unsigned char>(term[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(term[e - 1])))
        --e;
    return fold_ascii_lower(term.substr(b, e - b));
}

std::string format_fixed(double value, int precision) {
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    if (value == 0.0)
        value = 0.0; // drop negative zero
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed,
                                   precision);
    if (ec != std::errc{}) {
        std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
        return buf;
    }
    return std::string(buf, ptr);
}

bool parse_u64(std::string_view s, unsigned long long& out) {
    if (s.empty())
        return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, 10);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty())
        return false;
    if (s == "inf") {
        out = std::numeric_limits<double>::infinity();
        return true;
    }
    if (s == "-inf") {
        out = -std::numeric_limits<double>::infinity();
        return true;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

std::string percent_encode(std::string_view s) {
    static const char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        if (is_ascii_alnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xf]);
        }
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char delim) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        size_t pos = s.find(delim, start);
        if (pos == std::string_view::npos) {
            parts.emplace_back(s.substr(start));
            break;
        }
        parts.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return parts;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        fail(ErrorKind::IoError, "read failure on " + path);
    return ss.str();
}

std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::string s = read_file(path);
    return std::vector<unsigned char>(s.begin(), s.end());
}

} // namespace semdist
