#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kuznets/bipartite.hpp"
#include "kuznets/development.hpp"
#include "kuznets/fitness.hpp"
#include "kuznets/ingest.hpp"
#include "kuznets/smoothing.hpp"

namespace kuznets {

enum class AvgWageMode { EmploymentWeighted, SectorMean };

struct RegionYearOptions {
    double threshold = 1.0;
    SolverConfig solver;
    CDIParams cdi;
    AvgWageMode avg_wage = AvgWageMode::EmploymentWeighted;
};

struct RegionYearSummary {
    std::string region_id;
    int year = 0;
    double fitness_value = 0.0;
    std::size_t fitness_rank = 0;
    double avg_wage = 0.0;
    double avg_wage_rel = 0.0;
    double theil_between_sectors = 0.0;
    double gini_between_sectors = 0.0;
    double cdi_raw = 0.0;
    double cdi_standardized = 0.0;
    double cdi = 0.0;  // the variant selected by CDIParams::standardize_log

    /// Named variable for pooling: fitness, log_fitness, fitness_rank,
    /// avg_wage, avg_wage_rel, monetary_rel (alias), theil, gini, cdi.
    std::optional<double> value(const std::string& name) const;
};

/// Everything computed for one year of the region-sector path.
struct YearOutcome {
    int year = 0;
    std::optional<BinaryMatrix> matrix;      // sorted by fitness / complexity
    std::optional<FitnessResult> fitness;
    std::vector<RegionYearSummary> rows;
    std::vector<std::string> pruned_regions;
    std::vector<std::string> pruned_sectors;
    std::string stage_hash;
    bool resumed = false;
    int iterations = 0;
    bool converged_values = false;
    bool converged_ranks = false;
    double value_residual = 0.0;
    double nodf = 0.0;  // of the sorted matrix
};

struct RegionYearResult {
    std::vector<YearOutcome> years;

    std::vector<RegionYearSummary> rows() const;
};

/// Per year: rca -> binarize -> solve -> ranks; per surviving region the
/// between-sector Theil, the average wage and its per-year relative, and the
/// CDI. Errors keep their code and gain a "year Y, stage S" prefix.
/// `reuse`, when set, may return a previously computed outcome for a year
/// whose stage hash it recognises; that year is then not recomputed.
using YearReuse = std::function<std::optional<YearOutcome>(int year, const std::string& stage_hash)>;

RegionYearResult run_region_year(const WeightedBipartitePanel& panel, std::optional<YearRange> years,
                                 const RegionYearOptions& options, const YearReuse& reuse = {});

/// Content hash of one year's inputs and parameters; equal hashes mean the
/// year's outputs can be reused.
std::string region_year_stage_hash(const WeightedBipartitePanel& panel, int year, const RegionYearOptions& options);

TableWriter summary_table(std::span<const RegionYearSummary> rows, const CDIParams& params);
TableWriter theil_table(std::span<const RegionYearSummary> rows, int year);

struct CountryInputs {
    std::vector<CountryYearRecord> countries;
    std::vector<InequalitySeriesRecord> inequality;
    std::vector<FitnessRecord> fitness;
    /// Applied to inequality-series and fitness ids before joining.
    std::map<std::string, std::string> id_map;
};

struct PooledRow {
    std::string country_id;
    int year = 0;
    double gdp_pc = 0.0;
    double monetary_rel = 0.0;
    double fitness = 0.0;
    std::size_t fitness_rank = 0;
    double cdi_raw = 0.0;
    double cdi_standardized = 0.0;
    double cdi = 0.0;
    double capital_share = 0.0;
    std::optional<double> utip;

    /// fitness, log_fitness, fitness_rank, monetary_rel, cdi, capital_share, utip.
    std::optional<double> value(const std::string& name) const;
};

struct PooledTable {
    std::vector<PooledRow> rows;
    std::vector<DroppedKey> dropped;
    std::size_t joinable = 0;  // rows.size() + dropped.size()
};

/// Joins the country panel (relative GDP per capita per year), the fitness
/// table (ranked per year) and, when `need_utip`, the inequality series.
/// Throws MissingJoin listing every (country, year) when nothing joins.
PooledTable assemble_country_pool(const CountryInputs& inputs, std::optional<YearRange> years, const CDIParams& cdi,
                                  bool need_utip);

template <class Row>
std::vector<Observation> make_observations(std::span<const Row> rows, const std::vector<std::string>& xs,
                                           const std::string& y) {
    std::vector<Observation> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        Observation o;
        bool ok = true;
        for (std::size_t d = 0; d < xs.size() && ok; ++d) {
            const auto v = r.value(xs[d]);
            ok = v.has_value();
            if (ok) o.x[d] = *v;
        }
        const auto yv = r.value(y);
        if (!ok || !yv) continue;
        o.y = *yv;
        out.push_back(o);
    }
    return out;
}

/// Throws InvalidArgument for an unknown variable name.
void check_variable(const std::string& name, bool country);

struct PooledAnalysis {
    PooledTable table;
    std::vector<Observation> observations;
    KernelEstimate estimate;
};

/// Pools (country, year) observations and smooths `y` over one or two `xs`:
/// 1D with bootstrap bands (when config.bootstrap_reps > 0), 2D as a colour map.
PooledAnalysis run_country_pooled(const CountryInputs& inputs, std::optional<YearRange> years,
                                  const std::vector<std::string>& xs, const std::string& y, const CDIParams& cdi,
                                  KernelConfig config);

/// One pooled estimate per window. Throws EmptyWindow naming the first
/// window with no observation.
std::vector<PooledAnalysis> run_time_windows(const CountryInputs& inputs, const std::vector<YearRange>& windows,
                                             const std::vector<std::string>& xs, const std::string& y,
                                             const CDIParams& cdi, const KernelConfig& config);

/// Smooths region-year rows (optionally restricted to a year range).
KernelEstimate smooth_rows(std::span<const RegionYearSummary> rows, std::optional<YearRange> years,
                           const std::vector<std::string>& xs, const std::string& y, KernelConfig config);

/// Resolved configuration of a full run.
struct AnalysisSpec {
    std::optional<std::filesystem::path> panel;
    std::optional<std::filesystem::path> country_panel;
    std::optional<std::filesystem::path> inequality_series;
    std::optional<std::filesystem::path> fitness_table;
    std::optional<std::filesystem::path> id_map;
    std::vector<std::string> map;  // field=column items
    std::optional<YearRange> years;
    RegionYearOptions region;
    KernelConfig kernel;
    std::string fitness_axis = "fitness";  // fitness | log_fitness | fitness_rank
    std::vector<YearRange> windows;
    std::filesystem::path out = "out";
    bool resume = false;
};

struct RunSummary {
    std::vector<std::filesystem::path> written;  // relative to spec.out
    std::size_t rejected_rows = 0;
};

/// Runs every analysis the supplied inputs allow and writes the output tree
/// (matrices/, fitness/, theil/, summary.csv, curves/, grids/, report.json).
RunSummary run_all(const AnalysisSpec& spec, std::ostream& diagnostics);

/// 64-bit FNV-1a, hex encoded.
std::string content_hash(std::string_view bytes);

}  // namespace kuznets
