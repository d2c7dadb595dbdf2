#include "apbm/error.hpp"

namespace apbm {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotSquare: return "NotSquare";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NonFiniteFunctionValue: return "NonFiniteFunctionValue";
        case ErrorCode::SingularInnovation: return "SingularInnovation";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NegativeLambda: return "NegativeLambda";
        case ErrorCode::NoAnchorExists: return "NoAnchorExists";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::SensorCollocated: return "SensorCollocated";
        case ErrorCode::EmptyRecords: return "EmptyRecords";
        case ErrorCode::MissingThetaSnapshots: return "MissingThetaSnapshots";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::Io: return "Io";
        case ErrorCode::TooManyFailures: return "TooManyFailures";
    }
    return "Unknown";
}

}  // namespace apbm
