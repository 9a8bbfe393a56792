#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kuznets/records.hpp"

namespace kuznets {

// All logarithms are natural; results are in nats. Zero incomes contribute
// nothing (x log x -> 0).

/// T = (1/n) sum (y/mu) log(y/mu). Throws AllZeroIncomes, InvalidArgument on
/// negative or non-finite incomes or an empty vector.
double theil(std::span<const double> incomes);

/// T = sum (y/Y) log((y/Y) / (1/n)); algebraically equal to theil().
double theil_share_form(std::span<const double> incomes);

/// Mean-absolute-difference Gini, via the sorted prefix formula.
double gini(std::span<const double> incomes);

/// Gini of a distribution where value i is held by weights[i] individuals.
double weighted_gini(std::span<const double> values, std::span<const double> weights);

struct IncomeGroup {
    std::size_t members = 0;      // n_i
    double total_income = 0.0;    // Y_i
    std::optional<std::vector<double>> incomes;  // member incomes, for T^(i)
};

struct GroupedDistribution {
    std::vector<IncomeGroup> groups;
    std::size_t population = 0;   // n
    double total_income = 0.0;    // Y

    /// Groups built from member incomes, with grand totals filled in.
    static GroupedDistribution from_members(const std::vector<std::vector<double>>& members);
};

struct TheilDecomposition {
    double between = 0.0;                 // T'_g
    std::optional<double> within;         // T^w_g, when member incomes are known
    std::optional<double> total;          // theil of the flattened population
    std::vector<double> per_group;        // T^(i); 0 for groups without income
    /// |total - (between + within)| / total, when both sides exist.
    std::optional<double> identity_residual;
};

/// Between/within split. Throws InconsistentTotals if group counts or incomes
/// disagree with the grand totals or with their member lists.
TheilDecomposition decompose(const GroupedDistribution& g);

struct SectorWage {
    double employment = 0.0;   // p_i
    double average_wage = 0.0; // y_i
};

/// T'_sectors = sum (p_i/P)(y_i/mu) log(y_i/mu). Sectors with zero employment
/// are dropped first. Throws NoSectors, AllZeroIncomes.
double between_sector_theil(std::span<const SectorWage> sectors);

struct CapitalShareRow {
    std::string country_id;
    int year = 0;
    double labor_share = 0.0;
    double capital_share = 0.0;
};

std::vector<CapitalShareRow> capital_share_series(std::span<const CountryYearRecord> records);

}  // namespace kuznets
