#pragma once

#include <stdexcept>
#include <string>

namespace proxynas {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define PROXYNAS_DEFINE_ERROR(NAME)                                   \
    class NAME : public Error {                                       \
    public:                                                           \
        explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
    }

// Search-space errors.
PROXYNAS_DEFINE_ERROR(InvalidGenotype);
PROXYNAS_DEFINE_ERROR(MalformedEncoding);
PROXYNAS_DEFINE_ERROR(SpaceTooLarge);
PROXYNAS_DEFINE_ERROR(SpaceMismatch);

// Predictor / fitting errors.
PROXYNAS_DEFINE_ERROR(DimensionMismatch);
PROXYNAS_DEFINE_ERROR(DegenerateDesign);
PROXYNAS_DEFINE_ERROR(TooFewSamples);

// Rank-correlation errors.
PROXYNAS_DEFINE_ERROR(LengthMismatch);
PROXYNAS_DEFINE_ERROR(DegenerateInput);

// Accuracy-source errors.
PROXYNAS_DEFINE_ERROR(UnknownArchitecture);
PROXYNAS_DEFINE_ERROR(OutOfRangeAccuracy);

// Data ingestion errors.
PROXYNAS_DEFINE_ERROR(ParseError);
PROXYNAS_DEFINE_ERROR(DuplicateGenotype);
PROXYNAS_DEFINE_ERROR(NonpositiveLatency);

// Search / pipeline errors.
PROXYNAS_DEFINE_ERROR(InfeasibleConstraint);
PROXYNAS_DEFINE_ERROR(EmptyInput);
PROXYNAS_DEFINE_ERROR(PredictedLatencyRejected);
PROXYNAS_DEFINE_ERROR(NonConvergence);
PROXYNAS_DEFINE_ERROR(BudgetExhausted);

#undef PROXYNAS_DEFINE_ERROR

} // namespace proxynas
