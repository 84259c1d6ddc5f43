#include "mixsym/errors.hpp"

namespace mixsym {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MissingParam: return "MissingParam";
        case ErrorCode::NonPositiveParam: return "NonPositiveParam";
        case ErrorCode::RadiiOrder: return "RadiiOrder";
        case ErrorCode::Unmeshable: return "Unmeshable";
        case ErrorCode::AsymmetricMesh: return "AsymmetricMesh";
        case ErrorCode::DegenerateCell: return "DegenerateCell";
        case ErrorCode::MeshMismatch: return "MeshMismatch";
        case ErrorCode::NoDirichlet: return "NoDirichlet";
        case ErrorCode::NoGamma2: return "NoGamma2";
        case ErrorCode::NotComparable: return "NotComparable";
        case ErrorCode::EmptyCap: return "EmptyCap";
        case ErrorCode::HypothesisFailed: return "HypothesisFailed";
        case ErrorCode::StepNotCommensurate: return "StepNotCommensurate";
        case ErrorCode::UnstructuredMesh: return "UnstructuredMesh";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::ShiftOverflow: return "ShiftOverflow";
        case ErrorCode::ShiftMissing: return "ShiftMissing";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::Inconclusive: return "Inconclusive";
        case ErrorCode::ViolationFound: return "ViolationFound";
        case ErrorCode::SignViolation: return "SignViolation";
        case ErrorCode::MultiplicityViolation: return "MultiplicityViolation";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::SingularJacobian: return "SingularJacobian";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

ErrorCategory category(ErrorCode code) {
    switch (code) {
        case ErrorCode::IoFailure: return ErrorCategory::Io;
        case ErrorCode::ShiftOverflow:
        case ErrorCode::ShiftMissing:
        case ErrorCode::NotConverged:
        case ErrorCode::Inconclusive:
        case ErrorCode::ViolationFound:
        case ErrorCode::SignViolation:
        case ErrorCode::MultiplicityViolation:
        case ErrorCode::NonFiniteValue:
        case ErrorCode::SingularJacobian:
        case ErrorCode::NotFound: return ErrorCategory::Numerical;
        default: return ErrorCategory::Validation;
    }
}

}  // namespace mixsym
