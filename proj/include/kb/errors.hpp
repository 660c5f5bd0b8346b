#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kb {

/// Base class for all workbench errors. Subcommands map these to exit code 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two bit widths that were required to match did not.
struct WidthMismatch : Error {
    WidthMismatch(std::size_t a, std::size_t b)
        : Error("width mismatch: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

/// Dataset violates its own header (mixed widths, bad counts, ...).
struct MalformedDataset : Error {
    using Error::Error;
};

/// Compressed stream cannot be decoded; offset is in bits from stream start.
struct DecodeError : Error {
    DecodeError(const std::string& what, std::size_t offset)
        : Error(what + " at bit offset " + std::to_string(offset)), bit_offset(offset) {}
    std::size_t bit_offset;
};

/// An exhaustive scan would exceed the configured work budget.
struct BudgetExceeded : Error {
    BudgetExceeded(std::uint64_t required, std::uint64_t budget)
        : Error("work budget exceeded: needs " + std::to_string(required) +
                " evaluations, budget is " + std::to_string(budget)),
          required(required), budget(budget) {}
    std::uint64_t required;
    std::uint64_t budget;
};

/// Malformed file, unknown id, bad flag value, ...
struct InvalidArgument : Error {
    using Error::Error;
};

} // namespace kb
