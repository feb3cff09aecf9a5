#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jhohpm {

enum class ErrorCode {
    NonPolynomialAntiderivative,
    EvalAtPole,
    ExponentOutOfRange,
    SingularBoundarySystem,
    MissingParameter,
    PoleNotCancelled,
    ZeroC8WithStageTwo,
    ZeroDivisor,
    InvalidParams,
    InvalidSpec,
    NoProgress,
    NonFiniteState,
    ShootingDiverged,
    DegenerateHomogeneous,
    MissingTableData,
    MissingCase,
    Io,
};

std::string_view to_string(ErrorCode c) noexcept;

// Exit-code class used by the CLI: 2 validation, 3 numerical failure, 4 missing data.
int exit_code_for(ErrorCode c) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace jhohpm
