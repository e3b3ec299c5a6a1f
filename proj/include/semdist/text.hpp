#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace semdist {

// Tokenization: split on non-alphanumeric bytes, fold ASCII upper case to
// lower. Bytes >= 0x80 (UTF-8 continuation/lead bytes) are treated as word
// characters so non-ASCII scripts form tokens. `extra_word_chars` adds
// further ASCII bytes (no whitespace or control characters) to the word set.
struct TokenizerConfig {
    bool fold_case = true;
    std::string extra_word_chars;

    bool operator==(const TokenizerConfig&) const = default;
};

// Throws InvalidParameter if the config lists whitespace/control bytes.
void validate(const TokenizerConfig& cfg);

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg = {});

std::string fold_ascii_lower(std::string_view s);

// Trim surrounding whitespace and fold case; the canonical form used for
// count queries and cache keys.
std::string normalize_term(std::string_view term);

// Locale-independent fixed-point formatting ("0.443"); infinities print as
// "inf"/"-inf", NaN as "nan". Negative zero is normalized to zero.
std::string format_fixed(double value, int precision);

// Locale-independent integer parse of a full string; returns false on
// trailing garbage, sign, or overflow.
bool parse_u64(std::string_view s, unsigned long long& out);
bool parse_double(std::string_view s, double& out);

std::string percent_encode(std::string_view s);

std::vector<std::string> split(std::string_view s, char delim);

// Read whole file; throws IoError.
std::string read_file(const std::string& path);
std::vector<unsigned char> read_file_bytes(const std::string& path);

} // namespace semdist
