#pragma once

#include <algorithm>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "kuznets/bipartite.hpp"
#include "kuznets/error.hpp"
#include "kuznets/records.hpp"

namespace kuznets {

/// Maps logical field names (e.g. "wage_total") onto the column labels of an
/// input file. Unmapped fields are looked up under their own name.
struct ColumnSchema {
    std::map<std::string, std::string> columns;
    char delimiter = ',';

    std::string column_for(const std::string& field) const;
};

/// Parses `field=column` items. The key `delimiter` sets the separator
/// (`tab` is accepted for '\t').
ColumnSchema parse_schema(std::span<const std::string> items);
/// Reads a key=value schema file ('#' comments allowed).
ColumnSchema load_schema_file(const std::filesystem::path& path);

inline const std::vector<std::string> kRegionSectorFields{"region_id", "sector_id", "year", "wage_total",
                                                          "employment"};
inline const std::vector<std::string> kCountryFields{"country_id", "year", "gdp_pc", "population", "labor_share"};
inline const std::vector<std::string> kInequalityFields{"country_id", "year", "theil_value"};
inline const std::vector<std::string> kFitnessFields{"country_id", "year", "fitness"};

struct Diagnostic {
    std::size_t row = 0;  // 1-based data row
    Errc code = Errc::ParseFailure;
    std::string message;
    bool rejected = true;  // false for accepted-but-flagged rows

    std::string str() const;
};

struct LoadOptions {
    /// Throw the first rejection as an Error instead of collecting it.
    bool strict = false;
};

template <class Table>
struct LoadResult {
    Table table;
    std::vector<Diagnostic> diagnostics;
    std::size_t input_rows = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

LoadResult<WeightedBipartitePanel> load_region_sector_panel(std::istream& in, const ColumnSchema& schema,
                                                            LoadOptions options = {});
LoadResult<WeightedBipartitePanel> load_region_sector_panel(const std::filesystem::path& path,
                                                            const ColumnSchema& schema, LoadOptions options = {});

LoadResult<std::vector<CountryYearRecord>> load_country_panel(std::istream& in, const ColumnSchema& schema,
                                                              LoadOptions options = {});
LoadResult<std::vector<CountryYearRecord>> load_country_panel(const std::filesystem::path& path,
                                                              const ColumnSchema& schema, LoadOptions options = {});

LoadResult<std::vector<InequalitySeriesRecord>> load_inequality_series(std::istream& in, const ColumnSchema& schema,
                                                                       LoadOptions options = {});
LoadResult<std::vector<InequalitySeriesRecord>> load_inequality_series(const std::filesystem::path& path,
                                                                       const ColumnSchema& schema,
                                                                       LoadOptions options = {});

/// Externally computed fitness per (country, year).
struct FitnessRecord {
    std::string country_id;
    int year = 0;
    double fitness = 0.0;
};

LoadResult<std::vector<FitnessRecord>> load_fitness_table(std::istream& in, const ColumnSchema& schema,
                                                          LoadOptions options = {});
LoadResult<std::vector<FitnessRecord>> load_fitness_table(const std::filesystem::path& path,
                                                          const ColumnSchema& schema, LoadOptions options = {});

/// Explicit identifier mapping (`from,to` columns). No fuzzy matching.
std::map<std::string, std::string> load_id_map(const std::filesystem::path& path);

void write_region_sector_panel(const WeightedBipartitePanel& panel, const std::filesystem::path& path);
void write_country_panel(std::span<const CountryYearRecord> records, const std::filesystem::path& path);

struct YearRange {
    int first = 0;
    int last = 0;

    bool contains(int year) const { return year >= first && year <= last; }
    std::string str() const { return std::to_string(first) + ":" + std::to_string(last); }
};

/// "A:B", or a single year "A". Throws InvalidArgument on an empty interval.
YearRange parse_year_range(const std::string& text);

/// Concatenation of all observations with year in range, in input order.
/// Throws EmptyResult when nothing falls inside.
template <class Record>
std::vector<Record> pool_panel(std::span<const Record> records, YearRange range) {
    if (range.first > range.last) throw Error(Errc::InvalidArgument, "empty year range " + range.str());
    std::vector<Record> out;
    std::copy_if(records.begin(), records.end(), std::back_inserter(out),
                 [&](const Record& r) { return range.contains(r.year); });
    if (out.empty()) throw Error(Errc::EmptyResult, "no observation in years " + range.str());
    return out;
}

template <class Record>
std::vector<Record> pool_panel(const std::vector<Record>& records, YearRange range) {
    return pool_panel(std::span<const Record>(records), range);
}

}  // namespace kuznets
