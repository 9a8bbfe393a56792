#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kuznets/table.hpp"

namespace kuznets {

struct MonetaryObservation {
    std::string unit_id;
    int year = 0;
    double monetary = 0.0;  // GDP per capita or average wage
};

struct RelativeMonetary {
    std::string unit_id;
    int year = 0;
    double monetary = 0.0;
    double monetary_rel = 0.0;  // monetary / cross-sectional mean of its year
};

/// Throws EmptyYear on an empty series, InvariantViolation on monetary <= 0.
std::vector<RelativeMonetary> relative_monetary(std::span<const MonetaryObservation> series);

struct RankObservation {
    std::string unit_id;
    int year = 0;
    std::size_t fitness_rank = 0;  // 1 = most fit
};

/// One (unit, year) ready for the index. Absent inputs are reported by cdi().
struct CdiInput {
    std::string unit_id;
    int year = 0;
    std::optional<std::size_t> fitness_rank;
    std::optional<double> monetary;
    std::optional<double> monetary_rel;
};

struct DroppedKey {
    std::string unit_id;
    int year = 0;
    std::string reason;
};

struct DevelopmentJoin {
    std::vector<CdiInput> records;
    std::vector<DroppedKey> dropped;
    std::size_t joinable = 0;  // distinct keys seen across both inputs
};

/// Inner join on (unit, year); keys present on one side only are dropped with reason.
DevelopmentJoin join_development(std::span<const RankObservation> ranks, std::span<const RelativeMonetary> monetary);

struct CDIParams {
    double beta = 0.5;
    bool standardize_log = true;   // z-score log(monetary_rel) per year for cdi_standardized
    bool standardize_rank = true;  // z-score the oriented rank per year
};

struct DevelopmentRecord {
    std::string unit_id;
    int year = 0;
    std::size_t fitness_rank = 0;
    double monetary = 0.0;
    double monetary_rel = 0.0;
    double rank_term = 0.0;  // transformed rank: larger is more fit
    double cdi_raw = 0.0;            // beta R + (1 - beta) log(rel)
    double cdi_standardized = 0.0;   // beta R + (1 - beta) z(log(rel))

    double cdi(const CDIParams& p) const { return p.standardize_log ? cdi_standardized : cdi_raw; }
};

/// CDI = beta * R(rank) + (1 - beta) * log(monetary_rel), evaluated per year.
/// Throws MissingInput naming the first incomplete (unit, year), InvalidArgument
/// for beta outside [0, 1].
std::vector<DevelopmentRecord> cdi(std::span<const CdiInput> records, const CDIParams& params = {});

TableWriter development_table(std::span<const DevelopmentRecord> records, const CDIParams& params);

}  // namespace kuznets
