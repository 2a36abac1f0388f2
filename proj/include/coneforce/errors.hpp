#pragma once

#include <stdexcept>
#include <string>

namespace coneforce {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LengthError : Error { using Error::Error; };
struct IndexError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct StructureError : Error { using Error::Error; };
struct TableError : Error { using Error::Error; };
struct PreconditionViolation : Error { using Error::Error; };
struct ContractError : Error { using Error::Error; };
struct BudgetError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };
// Raised when a factored tree would exceed its configured size limits.
struct ResourceError : Error { using Error::Error; };

}  // namespace coneforce
