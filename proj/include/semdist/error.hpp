#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semdist {

enum class ErrorKind {
    EmptyCorpus,
    IoError,
    FormatError,
    InvalidWindow,
    UnknownTerm,
    DegenerateNormalizer,
    UpstreamError,
    ParseError,
    NoProximitySupport,
    DegenerateInput,
    CompressorError,
    InfiniteDistance,
    DegenerateMatrix,
    TooFewObjects,
    TooLarge,
    UnknownLabel,
    InvalidFeature,
    InvalidParameter,
    InsufficientData,
    TooManyUnknowns,
    UndefinedCorrelation,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace semdist
