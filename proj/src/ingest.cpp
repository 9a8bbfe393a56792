#include "kuznets/ingest.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include "kuznets/table.hpp"

namespace kuznets {

std::string ColumnSchema::column_for(const std::string& field) const {
    const auto it = columns.find(field);
    return it == columns.end() ? field : it->second;
}

namespace {

const std::set<std::string>& known_fields() {
    static const std::set<std::string> fields = [] {
        std::set<std::string> f;
        for (const auto* list : {&kRegionSectorFields, &kCountryFields, &kInequalityFields, &kFitnessFields}) {
            f.insert(list->begin(), list->end());
        }
        return f;
    }();
    return fields;
}

void apply_schema_item(ColumnSchema& schema, std::string_view item) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
        throw Error(Errc::InvalidArgument, "schema entry '" + std::string(item) + "' is not field=column");
    }
    const std::string key(trim(item.substr(0, eq)));
    const std::string value(trim(item.substr(eq + 1)));
    if (key == "delimiter") {
        if (value == "tab" || value == "\\t") {
            schema.delimiter = '\t';
        } else if (value.size() == 1) {
            schema.delimiter = value[0];
        } else {
            throw Error(Errc::InvalidArgument, "delimiter must be a single character or 'tab'");
        }
        return;
    }
    if (!known_fields().count(key)) throw Error(Errc::InvalidArgument, "unknown schema field '" + key + "'");
    if (value.empty()) throw Error(Errc::InvalidArgument, "empty column name for field '" + key + "'");
    schema.columns[key] = value;
}

}  // namespace

ColumnSchema parse_schema(std::span<const std::string> items) {
    ColumnSchema schema;
    for (const auto& item : items) apply_schema_item(schema, item);
    return schema;
}

ColumnSchema load_schema_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open schema file " + path.string());
    ColumnSchema schema;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        apply_schema_item(schema, t);
    }
    return schema;
}

std::string Diagnostic::str() const {
    return std::string(rejected ? "rejected" : "flagged") + " row " + std::to_string(row) + ": " +
           std::string(to_string(code)) + ": " + message;
}

namespace {

/// Column lookup plus per-row field access with typed parse errors.
class RowReader {
public:
    RowReader(const DelimitedTable& table, const ColumnSchema& schema, const std::vector<std::string>& fields) {
        for (const auto& field : fields) {
            const auto col_name = schema.column_for(field);
            const auto col = table.column(col_name);
            if (!col) throw Error(Errc::MissingColumn, "column '" + col_name + "' (field " + field + ") not found");
            index_[field] = *col;
        }
    }

    void bind(const std::vector<std::string>& row, std::size_t row_number) {
        row_ = &row;
        row_number_ = row_number;
    }

    const std::string& text(const std::string& field) const {
        static const std::string empty;
        const auto col = index_.at(field);
        const std::string& value = col < row_->size() ? (*row_)[col] : empty;
        if (value.empty()) throw Error(Errc::ParseFailure, "missing value for " + field, row_number_);
        return value;
    }

    double number(const std::string& field) const {
        const auto& t = text(field);
        const auto v = parse_number(t);
        if (!v) throw Error(Errc::ParseFailure, "'" + t + "' is not a number (" + field + ")", row_number_);
        return *v;
    }

    int year(const std::string& field = "year") const {
        const auto& t = text(field);
        const auto v = parse_integer(t);
        if (!v || *v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max()) {
            throw Error(Errc::ParseFailure, "'" + t + "' is not an integer year", row_number_);
        }
        return static_cast<int>(*v);
    }

    std::size_t row_number() const { return row_number_; }

private:
    std::map<std::string, std::size_t> index_;
    const std::vector<std::string>* row_ = nullptr;
    std::size_t row_number_ = 0;
};

/// Drives a loader: each row is handed to `accept`, which throws Error to
/// reject it and may append warnings. In strict mode the first rejection is
/// rethrown.
template <class Table>
LoadResult<Table> drive(const DelimitedTable& table, const ColumnSchema& schema, const std::vector<std::string>& fields,
                        LoadOptions options,
                        const std::function<void(RowReader&, LoadResult<Table>&)>& accept) {
    RowReader reader(table, schema, fields);
    LoadResult<Table> result;
    result.input_rows = table.rows.size();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        reader.bind(table.rows[i], i + 1);
        try {
            accept(reader, result);
            ++result.accepted;
        } catch (const Error& e) {
            if (options.strict) throw;
            std::string msg = e.what();
            // Strip the "Code (row n): " prefix; the diagnostic carries both.
            if (const auto pos = msg.find("): "); e.row() && pos != std::string::npos) msg = msg.substr(pos + 3);
            result.diagnostics.push_back({i + 1, e.code(), msg, true});
            ++result.rejected;
        }
    }
    return result;
}

DelimitedTable read_input(std::istream& in, const ColumnSchema& schema) { return read_delimited(in, schema.delimiter); }

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
    return in;
}

}  // namespace

LoadResult<WeightedBipartitePanel> load_region_sector_panel(std::istream& in, const ColumnSchema& schema,
                                                            LoadOptions options) {
    const auto table = read_input(in, schema);
    std::vector<RegionSectorRecord> records;
    std::set<std::tuple<std::string, std::string, int>> keys;
    auto result = drive<WeightedBipartitePanel>(
        table, schema, kRegionSectorFields, options, [&](RowReader& row, LoadResult<WeightedBipartitePanel>& res) {
            RegionSectorRecord rec;
            rec.region_id = row.text("region_id");
            rec.sector_id = row.text("sector_id");
            rec.year = row.year();
            rec.wage_total = row.number("wage_total");
            rec.employment = row.number("employment");
            const auto n = row.row_number();
            if (rec.wage_total < 0.0) throw Error(Errc::InvariantViolation, "negative wage_total", n);
            if (rec.employment < 0.0) throw Error(Errc::InvariantViolation, "negative employment", n);
            if (rec.employment == 0.0 && rec.wage_total > 0.0) {
                throw Error(Errc::InvariantViolation, "wage_total > 0 with zero employment", n);
            }
            if (!keys.emplace(rec.region_id, rec.sector_id, rec.year).second) {
                throw Error(Errc::DuplicateKey,
                            "(" + rec.region_id + ", " + rec.sector_id + ", " + std::to_string(rec.year) + ")", n);
            }
            if (rec.employment > 0.0 && rec.wage_total == 0.0) {
                res.diagnostics.push_back({n, Errc::InvariantViolation, "employment > 0 with zero wage_total", false});
            }
            records.push_back(std::move(rec));
        });
    result.table = WeightedBipartitePanel::from_records(records);
    return result;
}

LoadResult<WeightedBipartitePanel> load_region_sector_panel(const std::filesystem::path& path,
                                                            const ColumnSchema& schema, LoadOptions options) {
    auto in = open_input(path);
    return load_region_sector_panel(in, schema, options);
}

LoadResult<std::vector<CountryYearRecord>> load_country_panel(std::istream& in, const ColumnSchema& schema,
                                                              LoadOptions options) {
    const auto table = read_input(in, schema);
    std::set<std::pair<std::string, int>> keys;
    return drive<std::vector<CountryYearRecord>>(
        table, schema, kCountryFields, options, [&](RowReader& row, LoadResult<std::vector<CountryYearRecord>>& res) {
            CountryYearRecord rec;
            rec.country_id = row.text("country_id");
            rec.year = row.year();
            rec.gdp_pc = row.number("gdp_pc");
            rec.population = row.number("population");
            rec.labor_share = row.number("labor_share");
            const auto n = row.row_number();
            if (!(rec.gdp_pc > 0.0)) throw Error(Errc::InvariantViolation, "gdp_pc must be positive", n);
            if (!(rec.population > 0.0)) throw Error(Errc::InvariantViolation, "population must be positive", n);
            if (rec.labor_share < 0.0 || rec.labor_share > 1.0) {
                throw Error(Errc::InvariantViolation, "labor_share outside [0,1]", n);
            }
            if (!keys.emplace(rec.country_id, rec.year).second) {
                throw Error(Errc::DuplicateKey, "(" + rec.country_id + ", " + std::to_string(rec.year) + ")", n);
            }
            rec.capital_share = 1.0 - rec.labor_share;
            res.table.push_back(std::move(rec));
        });
}

LoadResult<std::vector<CountryYearRecord>> load_country_panel(const std::filesystem::path& path,
                                                              const ColumnSchema& schema, LoadOptions options) {
    auto in = open_input(path);
    return load_country_panel(in, schema, options);
}

LoadResult<std::vector<InequalitySeriesRecord>> load_inequality_series(std::istream& in, const ColumnSchema& schema,
                                                                       LoadOptions options) {
    const auto table = read_input(in, schema);
    std::set<std::pair<std::string, int>> keys;
    return drive<std::vector<InequalitySeriesRecord>>(
        table, schema, kInequalityFields, options,
        [&](RowReader& row, LoadResult<std::vector<InequalitySeriesRecord>>& res) {
            InequalitySeriesRecord rec;
            rec.country_id = row.text("country_id");
            rec.year = row.year();
            rec.theil_value = row.number("theil_value");
            const auto n = row.row_number();
            if (rec.theil_value < 0.0) throw Error(Errc::InvariantViolation, "negative theil_value", n);
            if (!keys.emplace(rec.country_id, rec.year).second) {
                throw Error(Errc::DuplicateKey, "(" + rec.country_id + ", " + std::to_string(rec.year) + ")", n);
            }
            res.table.push_back(std::move(rec));
        });
}

LoadResult<std::vector<InequalitySeriesRecord>> load_inequality_series(const std::filesystem::path& path,
                                                                       const ColumnSchema& schema,
                                                                       LoadOptions options) {
    auto in = open_input(path);
    return load_inequality_series(in, schema, options);
}

LoadResult<std::vector<FitnessRecord>> load_fitness_table(std::istream& in, const ColumnSchema& schema,
                                                          LoadOptions options) {
    const auto table = read_input(in, schema);
    std::set<std::pair<std::string, int>> keys;
    return drive<std::vector<FitnessRecord>>(
        table, schema, kFitnessFields, options, [&](RowReader& row, LoadResult<std::vector<FitnessRecord>>& res) {
            FitnessRecord rec;
            rec.country_id = row.text("country_id");
            rec.year = row.year();
            rec.fitness = row.number("fitness");
            const auto n = row.row_number();
            if (!(rec.fitness > 0.0)) throw Error(Errc::InvariantViolation, "fitness must be positive", n);
            if (!keys.emplace(rec.country_id, rec.year).second) {
                throw Error(Errc::DuplicateKey, "(" + rec.country_id + ", " + std::to_string(rec.year) + ")", n);
            }
            res.table.push_back(std::move(rec));
        });
}

LoadResult<std::vector<FitnessRecord>> load_fitness_table(const std::filesystem::path& path,
                                                          const ColumnSchema& schema, LoadOptions options) {
    auto in = open_input(path);
    return load_fitness_table(in, schema, options);
}

std::map<std::string, std::string> load_id_map(const std::filesystem::path& path) {
    const auto table = read_delimited_file(path);
    const auto from = table.column("from");
    const auto to = table.column("to");
    if (!from || !to) throw Error(Errc::MissingColumn, "id map needs 'from' and 'to' columns");
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (*from >= row.size() || *to >= row.size() || row[*from].empty() || row[*to].empty()) {
            throw Error(Errc::ParseFailure, "incomplete id mapping", i + 1);
        }
        if (!out.emplace(row[*from], row[*to]).second) {
            throw Error(Errc::DuplicateKey, "id '" + row[*from] + "' mapped twice", i + 1);
        }
    }
    return out;
}

void write_region_sector_panel(const WeightedBipartitePanel& panel, const std::filesystem::path& path) {
    TableWriter out(kRegionSectorFields);
    for (const auto& rec : panel.records()) {
        out.row({rec.region_id, rec.sector_id, std::to_string(rec.year), format_number(rec.wage_total),
                 format_number(rec.employment)});
    }
    out.save(path);
}

void write_country_panel(std::span<const CountryYearRecord> records, const std::filesystem::path& path) {
    TableWriter out(kCountryFields);
    for (const auto& rec : records) {
        out.row({rec.country_id, std::to_string(rec.year), format_number(rec.gdp_pc), format_number(rec.population),
                 format_number(rec.labor_share)});
    }
    out.save(path);
}

YearRange parse_year_range(const std::string& text) {
    const auto colon = text.find(':');
    const auto first = parse_integer(colon == std::string::npos ? text : text.substr(0, colon));
    const auto last = colon == std::string::npos ? first : parse_integer(text.substr(colon + 1));
    if (!first || !last) throw Error(Errc::InvalidArgument, "year range '" + text + "' is not A:B");
    YearRange range{static_cast<int>(*first), static_cast<int>(*last)};
    if (range.first > range.last) throw Error(Errc::InvalidArgument, "empty year range " + text);
    return range;
}

}  // namespace kuznets
