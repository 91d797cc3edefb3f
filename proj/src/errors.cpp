#include "randlab/errors.hpp"

namespace randlab {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::DegeneratePair: return "DegeneratePair";
        case ErrorKind::CoverViolation: return "CoverViolation";
        case ErrorKind::ExtensionUndefined: return "ExtensionUndefined";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::NotPrefixFree: return "NotPrefixFree";
        case ErrorKind::MeasureBoundViolation: return "MeasureBoundViolation";
        case ErrorKind::AtomSuspected: return "AtomSuspected";
        case ErrorKind::ZeroMassCylinder: return "ZeroMassCylinder";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::FixtureInvalid: return "FixtureInvalid";
    }
    return "Unknown";
}

}  // namespace randlab
