#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mixsym {

enum class ErrorCode {
    // validation
    MissingParam,
    NonPositiveParam,
    RadiiOrder,
    Unmeshable,
    AsymmetricMesh,
    DegenerateCell,
    MeshMismatch,
    NoDirichlet,
    NoGamma2,
    NotComparable,
    EmptyCap,
    HypothesisFailed,
    StepNotCommensurate,
    UnstructuredMesh,
    ConfigError,
    // numerical
    ShiftOverflow,
    ShiftMissing,
    NotConverged,
    Inconclusive,
    ViolationFound,
    SignViolation,
    MultiplicityViolation,
    NonFiniteValue,
    SingularJacobian,
    NotFound,
    // io
    IoFailure,
};

enum class ErrorCategory { Validation, Numerical, Io };

std::string_view to_string(ErrorCode code);
ErrorCategory category(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace mixsym
