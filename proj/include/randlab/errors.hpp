#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace randlab {

enum class ErrorKind {
    BudgetExceeded,
    DegeneratePair,
    CoverViolation,
    ExtensionUndefined,
    InvariantViolation,
    NotPrefixFree,
    MeasureBoundViolation,
    AtomSuspected,
    ZeroMassCylinder,
    InvalidArgument,
    ParseError,
    FixtureInvalid,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a machine-readable kind so the
// CLI can map it onto exit codes and report fields.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

}  // namespace randlab
