#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace linresp {

enum class ErrorKind {
    NonMixing,
    NoConvergence,
    SingularSystem,
    TooLarge,
    InfeasibleEpsilon,
    DimensionTooSmall,
    DimensionMismatch,
    EmptyFeasibleSet,
    NotPositive,
    Inconclusive,
    ConstantObservable,
    ZeroGradient,
    SpectralGapAmbiguous,
    ZeroLambda2,
    DefectiveEigenvalue,
    QuadratureFailure,
    OutOfDomain,
    InvalidInput,
};

/// Validation errors reject the input; numerical errors mean a solver failed on valid input.
enum class ErrorCategory { Validation, Numerical };

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;
[[nodiscard]] ErrorCategory category(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace linresp
