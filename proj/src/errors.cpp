#include "jhohpm/errors.hpp"

namespace jhohpm {

std::string_view to_string(ErrorCode c) noexcept {
    switch (c) {
        case ErrorCode::NonPolynomialAntiderivative: return "NonPolynomialAntiderivative";
        case ErrorCode::EvalAtPole: return "EvalAtPole";
        case ErrorCode::ExponentOutOfRange: return "ExponentOutOfRange";
        case ErrorCode::SingularBoundarySystem: return "SingularBoundarySystem";
        case ErrorCode::MissingParameter: return "MissingParameter";
        case ErrorCode::PoleNotCancelled: return "PoleNotCancelled";
        case ErrorCode::ZeroC8WithStageTwo: return "ZeroC8WithStageTwo";
        case ErrorCode::ZeroDivisor: return "ZeroDivisor";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::NoProgress: return "NoProgress";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::ShootingDiverged: return "ShootingDiverged";
        case ErrorCode::DegenerateHomogeneous: return "DegenerateHomogeneous";
        case ErrorCode::MissingTableData: return "MissingTableData";
        case ErrorCode::MissingCase: return "MissingCase";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

int exit_code_for(ErrorCode c) noexcept {
    switch (c) {
        case ErrorCode::InvalidParams:
        case ErrorCode::InvalidSpec:
        case ErrorCode::MissingParameter:
        case ErrorCode::ExponentOutOfRange:
        case ErrorCode::ZeroC8WithStageTwo:
        case ErrorCode::ZeroDivisor:
            return 2;
        case ErrorCode::MissingTableData:
        case ErrorCode::MissingCase:
        case ErrorCode::Io:
            return 4;
        default:
            return 3;
    }
}

}  // namespace jhohpm
