#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace coulomb_chain {

enum class ErrorKind {
    InvalidArgument,
    DegenerateConfiguration,
    DomainError,
    MonotonicityViolation,
    NoConvergence,
    OrderingBreach,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::OrderingBreach: return "OrderingBreach";
    }
    return "Unknown";
}

/// Every failure raised by the library. `index()` carries the offending
/// particle/gap index when one exists (first bad k for domain errors).
class ModelError : public std::runtime_error {
public:
    ModelError(ErrorKind kind, const std::string& message,
               std::optional<std::size_t> index = std::nullopt)
        : std::runtime_error(message), kind_(kind), index_(index) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view name() const noexcept { return to_string(kind_); }
    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    ErrorKind kind_;
    std::optional<std::size_t> index_;
};

} // namespace coulomb_chain
