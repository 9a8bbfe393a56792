#pragma once

#include <string>

namespace kuznets {

/// Total wages W_rs and employment E_rs for one (region, sector, year).
struct RegionSectorRecord {
    std::string region_id;
    std::string sector_id;
    int year = 0;
    double wage_total = 0.0;
    double employment = 0.0;

    friend bool operator==(const RegionSectorRecord&, const RegionSectorRecord&) = default;
};

struct CountryYearRecord {
    std::string country_id;
    int year = 0;
    double gdp_pc = 0.0;
    double population = 0.0;
    double labor_share = 0.0;
    double capital_share = 0.0;  // 1 - labor_share

    friend bool operator==(const CountryYearRecord&, const CountryYearRecord&) = default;
};

/// A published between-sector pay inequality coefficient, ingested as-is.
struct InequalitySeriesRecord {
    std::string country_id;
    int year = 0;
    double theil_value = 0.0;

    friend bool operator==(const InequalitySeriesRecord&, const InequalitySeriesRecord&) = default;
};

}  // namespace kuznets
