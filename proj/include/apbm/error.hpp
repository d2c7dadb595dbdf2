#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace apbm {

enum class ErrorCode {
    NotSquare,
    NotSymmetric,
    NotPositiveDefinite,
    NonFinite,
    NonFiniteFunctionValue,
    SingularInnovation,
    DimensionMismatch,
    NegativeLambda,
    NoAnchorExists,
    NonFiniteState,
    SensorCollocated,
    EmptyRecords,
    MissingThetaSnapshots,
    InvalidConfig,
    Io,
    TooManyFailures,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the Monte Carlo harness) can classify it without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace apbm
