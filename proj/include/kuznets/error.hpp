#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kuznets {

enum class Errc {
    InvalidArgument,
    IoError,
    MissingColumn,
    ParseFailure,
    DuplicateKey,
    InvariantViolation,
    EmptyResult,
    YearAbsent,
    AllZeroSlice,
    DegenerateMatrix,
    OrderMismatch,
    NumericUnderflow,
    NoConvergence,
    AllZeroIncomes,
    InconsistentTotals,
    NoSectors,
    EmptyYear,
    MissingInput,
    TooFewObservations,
    DegenerateBandwidth,
    MissingJoin,
    EmptyWindow,
};

std::string_view to_string(Errc code) noexcept;

/// True for failures of the numerics (non-convergence, degenerate matrices),
/// as opposed to bad input.
bool is_numeric_failure(Errc code) noexcept;

/// Every failure raised by the library. `row()` is set for per-row ingest errors.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what, std::optional<std::size_t> row = std::nullopt);

    Errc code() const noexcept { return code_; }
    std::optional<std::size_t> row() const noexcept { return row_; }

private:
    Errc code_;
    std::optional<std::size_t> row_;
};

}  // namespace kuznets
