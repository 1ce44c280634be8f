#include "linresp/error.hpp"

namespace linresp {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonMixing: return "NonMixing";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::InfeasibleEpsilon: return "InfeasibleEpsilon";
        case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::EmptyFeasibleSet: return "EmptyFeasibleSet";
        case ErrorKind::NotPositive: return "NotPositive";
        case ErrorKind::Inconclusive: return "Inconclusive";
        case ErrorKind::ConstantObservable: return "ConstantObservable";
        case ErrorKind::ZeroGradient: return "ZeroGradient";
        case ErrorKind::SpectralGapAmbiguous: return "SpectralGapAmbiguous";
        case ErrorKind::ZeroLambda2: return "ZeroLambda2";
        case ErrorKind::DefectiveEigenvalue: return "DefectiveEigenvalue";
        case ErrorKind::QuadratureFailure: return "QuadratureFailure";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

ErrorCategory category(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NoConvergence:
        case ErrorKind::SingularSystem:
        case ErrorKind::Inconclusive:
        case ErrorKind::ZeroGradient:
        case ErrorKind::SpectralGapAmbiguous:
        case ErrorKind::ZeroLambda2:
        case ErrorKind::DefectiveEigenvalue:
        case ErrorKind::QuadratureFailure:
            return ErrorCategory::Numerical;
        default:
            return ErrorCategory::Validation;
    }
}

}  // namespace linresp
