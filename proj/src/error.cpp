#include "kuznets/error.hpp"

namespace kuznets {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::IoError: return "IoError";
        case Errc::MissingColumn: return "MissingColumn";
        case Errc::ParseFailure: return "ParseFailure";
        case Errc::DuplicateKey: return "DuplicateKey";
        case Errc::InvariantViolation: return "InvariantViolation";
        case Errc::EmptyResult: return "EmptyResult";
        case Errc::YearAbsent: return "YearAbsent";
        case Errc::AllZeroSlice: return "AllZeroSlice";
        case Errc::DegenerateMatrix: return "DegenerateMatrix";
        case Errc::OrderMismatch: return "OrderMismatch";
        case Errc::NumericUnderflow: return "NumericUnderflow";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::AllZeroIncomes: return "AllZeroIncomes";
        case Errc::InconsistentTotals: return "InconsistentTotals";
        case Errc::NoSectors: return "NoSectors";
        case Errc::EmptyYear: return "EmptyYear";
        case Errc::MissingInput: return "MissingInput";
        case Errc::TooFewObservations: return "TooFewObservations";
        case Errc::DegenerateBandwidth: return "DegenerateBandwidth";
        case Errc::MissingJoin: return "MissingJoin";
        case Errc::EmptyWindow: return "EmptyWindow";
    }
    return "Unknown";
}

bool is_numeric_failure(Errc code) noexcept {
    switch (code) {
        case Errc::DegenerateMatrix:
        case Errc::NumericUnderflow:
        case Errc::NoConvergence:
        case Errc::AllZeroSlice:
        case Errc::DegenerateBandwidth:
            return true;
        default:
            return false;
    }
}

Error::Error(Errc code, const std::string& what, std::optional<std::size_t> row)
    : std::runtime_error(row ? std::string(to_string(code)) + " (row " + std::to_string(*row) + "): " + what
                             : std::string(to_string(code)) + ": " + what),
      code_(code),
      row_(row) {}

}  // namespace kuznets
