#pragma once

#include <stdexcept>
#include <string>

namespace sagaze {

// Every failure the library can raise. Codes map 1:1 onto the documented
// error conditions of the operations that raise them.
enum class Errc {
    MalformedRow,
    NonMonotonicTime,
    EmptyInput,
    NegativeSpeed,
    EmptyTrace,
    TooShort,
    DegenerateData,
    LengthMismatch,
    TooFewSamples,
    NotADistribution,
    NotStochastic,
    TooFewRows,
    TooFewTrials,
    TooFewRuns,
    ZeroDuration,
    NoRuns,
    ConstantSeries,
    ConstantSpeed,
    InvalidConfig,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace sagaze
