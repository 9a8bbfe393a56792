#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "kuznets/bipartite.hpp"
#include "kuznets/development.hpp"
#include "kuznets/error.hpp"
#include "kuznets/fitness.hpp"
#include "kuznets/inequality.hpp"
#include "kuznets/ingest.hpp"
#include "kuznets/pipeline.hpp"
#include "kuznets/smoothing.hpp"
#include "kuznets/table.hpp"

namespace kuznets::cli {
namespace {

namespace fs = std::filesystem;

struct Flags {
    std::string panel;
    std::string country_panel;
    std::string inequality_series;
    std::string fitness_table;
    std::string id_map;
    std::string schema;
    std::vector<std::string> map;
    std::optional<int> year;
    std::string years;
    double threshold = 1.0;
    double beta = 0.5;
    std::string cdi_log = "zscore";
    std::string cdi_rank = "zscore";
    std::string avg_wage = "weighted";
    int max_iterations = 5000;
    int rank_patience = 20;
    double value_tol = 1e-13;
    std::vector<double> bandwidth;
    std::size_t reps = 1000;
    double level = 0.9;
    std::vector<std::size_t> grid;
    std::uint64_t seed = kDefaultSeed;
    double support_floor = 0.01;
    std::vector<std::string> x;
    std::string y;
    std::vector<std::string> windows;
    std::string fitness_axis = "fitness";
    std::string out = "out";
    std::string spec;
    bool resume = false;
    bool strict = false;
};

// Option groups. Every subcommand picks the groups it needs.
void add_out(CLI::App* sub, Flags& f) {
    sub->add_option("--out", f.out, "Output directory (environment: KUZNETS_OUT)")
        ->envname("KUZNETS_OUT")
        ->capture_default_str();
}

void add_schema(CLI::App* sub, Flags& f) {
    sub->add_option("--map", f.map, "Column mapping field=column (repeatable; delimiter=tab for TSV)");
    sub->add_option("--schema", f.schema, "File of field=column lines");
    sub->add_flag("--strict", f.strict, "Abort on the first invalid row");
}

void add_panel(CLI::App* sub, Flags& f) {
    sub->add_option("--panel", f.panel, "Region-sector wage/employment panel");
}

void add_country(CLI::App* sub, Flags& f) {
    sub->add_option("--country-panel", f.country_panel, "Country-year macro panel");
    sub->add_option("--inequality-series", f.inequality_series, "Country-year Theil series");
    sub->add_option("--fitness-table", f.fitness_table, "Country-year fitness values");
    sub->add_option("--id-map", f.id_map, "Identifier map (columns from,to) applied to series and fitness ids");
}

void add_year(CLI::App* sub, Flags& f) {
    sub->add_option("--year", f.year, "Single year")->required();
}

void add_years(CLI::App* sub, Flags& f) {
    sub->add_option("--years", f.years, "Year range A:B")->default_str("all");
}

void add_threshold(CLI::App* sub, Flags& f) {
    sub->add_option("--threshold", f.threshold, "RCA threshold for M_rs = 1")->capture_default_str();
}

void add_solver(CLI::App* sub, Flags& f) {
    add_threshold(sub, f);
    sub->add_option("--value-tol", f.value_tol, "Max relative change for value convergence")->capture_default_str();
    sub->add_option("--rank-patience", f.rank_patience, "Iterations with unchanged ranks for rank convergence")
        ->capture_default_str();
    sub->add_option("--max-iterations", f.max_iterations, "Iteration cap")->capture_default_str();
}

void add_cdi(CLI::App* sub, Flags& f) {
    sub->add_option("--beta", f.beta, "CDI weight of the rank term")->capture_default_str();
    sub->add_option("--cdi-log", f.cdi_log, "Log-monetary term: zscore or raw")
        ->check(CLI::IsMember({"zscore", "raw"}))
        ->capture_default_str();
    sub->add_option("--cdi-rank", f.cdi_rank, "Rank term: zscore or raw")
        ->check(CLI::IsMember({"zscore", "raw"}))
        ->capture_default_str();
}

void add_region(CLI::App* sub, Flags& f) {
    add_solver(sub, f);
    add_cdi(sub, f);
    sub->add_option("--avg-wage", f.avg_wage, "Region average wage: weighted or sector-mean")
        ->check(CLI::IsMember({"weighted", "sector-mean"}))
        ->capture_default_str();
}

void add_kernel(CLI::App* sub, Flags& f) {
    sub->add_option("--bandwidth", f.bandwidth, "Bandwidth per predictor (comma list)")
        ->delimiter(',')
        ->default_str("silverman");
    sub->add_option("--reps", f.reps, "Bootstrap replicates (0: no bands)")->capture_default_str();
    sub->add_option("--level", f.level, "Pointwise band level")->capture_default_str();
    sub->add_option("--grid", f.grid, "Grid points per predictor (comma list)")->delimiter(',')->default_str("200");
    sub->add_option("--seed", f.seed, "Seed for all resampling")->capture_default_str();
    sub->add_option("--support-floor", f.support_floor, "Mask grid points below this fraction of peak mass")
        ->capture_default_str();
}

void add_axes(CLI::App* sub, Flags& f, std::size_t predictors) {
    auto* x = sub->add_option("--x", f.x, predictors == 1 ? "Predictor" : "Two predictors (comma list)")
                  ->delimiter(',')
                  ->required();
    x->expected(static_cast<int>(predictors));
    sub->add_option("--y", f.y, "Response")->required();
    sub->add_option("--fitness-axis", f.fitness_axis,
                    "Fitness variable used by run-all: fitness, log_fitness or fitness_rank")
        ->check(CLI::IsMember({"fitness", "log_fitness", "fitness_rank"}))
        ->capture_default_str();
}

// ---------------------------------------------------------------------------

ColumnSchema resolve_schema(const Flags& f) {
    ColumnSchema schema;
    if (!f.schema.empty()) schema = load_schema_file(f.schema);
    const auto extra = parse_schema(f.map);
    for (const auto& [k, v] : extra.columns) schema.columns[k] = v;
    if (extra.delimiter != ',' || std::any_of(f.map.begin(), f.map.end(), [](const std::string& s) {
            return s.rfind("delimiter=", 0) == 0;
        })) {
        schema.delimiter = extra.delimiter;
    }
    return schema;
}

std::optional<YearRange> resolve_years(const Flags& f) {
    if (f.year) return YearRange{*f.year, *f.year};
    if (f.years.empty() || f.years == "all") return std::nullopt;
    return parse_year_range(f.years);
}

RegionYearOptions resolve_region(const Flags& f) {
    RegionYearOptions o;
    o.threshold = f.threshold;
    o.solver.value_tol = f.value_tol;
    o.solver.rank_patience = f.rank_patience;
    o.solver.max_iterations = f.max_iterations;
    o.cdi.beta = f.beta;
    o.cdi.standardize_log = f.cdi_log == "zscore";
    o.cdi.standardize_rank = f.cdi_rank == "zscore";
    o.avg_wage = f.avg_wage == "weighted" ? AvgWageMode::EmploymentWeighted : AvgWageMode::SectorMean;
    if (o.threshold <= 0.0) throw Error(Errc::InvalidArgument, "--threshold must be positive");
    if (o.solver.max_iterations < 1 || o.solver.rank_patience < 1 || !(o.solver.value_tol > 0.0)) {
        throw Error(Errc::InvalidArgument, "solver settings must be positive");
    }
    if (!(o.cdi.beta >= 0.0 && o.cdi.beta <= 1.0)) throw Error(Errc::InvalidArgument, "--beta must lie in [0, 1]");
    return o;
}

KernelConfig resolve_kernel(const Flags& f) {
    KernelConfig k;
    if (f.bandwidth.size() > 2 || f.grid.size() > 2) {
        throw Error(Errc::InvalidArgument, "--bandwidth and --grid take at most two values");
    }
    for (std::size_t d = 0; d < 2; ++d) {
        if (!f.bandwidth.empty()) {
            const double h = f.bandwidth[std::min(d, f.bandwidth.size() - 1)];
            if (!(h > 0.0)) throw Error(Errc::InvalidArgument, "--bandwidth must be positive");
            k.bandwidth[d] = h;
        }
        if (!f.grid.empty()) {
            k.grid[d].points = f.grid[std::min(d, f.grid.size() - 1)];
            if (k.grid[d].points < 2) throw Error(Errc::InvalidArgument, "--grid needs at least 2 points");
        }
    }
    k.bootstrap_reps = f.reps;
    k.band_level = f.level;
    if (!(f.level > 0.0 && f.level < 1.0)) throw Error(Errc::InvalidArgument, "--level must lie in (0, 1)");
    k.seed = f.seed;
    k.support_floor = f.support_floor;
    return k;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string s;
    for (const auto& i : items) s += (s.empty() ? "" : ",") + i;
    return s;
}

/// Prints every option of `sub` with the value the run actually uses.
void echo_config(const CLI::App* sub, const Flags& f, std::ostream& out) {
    std::map<std::string, std::string> v;
    const auto region = resolve_region(f);
    const auto kernel = resolve_kernel(f);
    v["panel"] = f.panel;
    v["country-panel"] = f.country_panel;
    v["inequality-series"] = f.inequality_series;
    v["fitness-table"] = f.fitness_table;
    v["id-map"] = f.id_map;
    v["schema"] = f.schema;
    v["map"] = join_list(f.map);
    v["strict"] = f.strict ? "true" : "false";
    v["year"] = f.year ? std::to_string(*f.year) : "";
    const auto years = resolve_years(f);
    v["years"] = years ? years->str() : "all";
    v["threshold"] = format_number(region.threshold);
    v["value-tol"] = format_number(region.solver.value_tol);
    v["rank-patience"] = std::to_string(region.solver.rank_patience);
    v["max-iterations"] = std::to_string(region.solver.max_iterations);
    v["beta"] = format_number(region.cdi.beta);
    v["cdi-log"] = region.cdi.standardize_log ? "zscore" : "raw";
    v["cdi-rank"] = region.cdi.standardize_rank ? "zscore" : "raw";
    v["avg-wage"] = region.avg_wage == AvgWageMode::EmploymentWeighted ? "weighted" : "sector-mean";
    v["bandwidth"] = kernel.bandwidth[0] ? format_number(*kernel.bandwidth[0]) + "," + format_number(*kernel.bandwidth[1])
                                         : "silverman";
    v["reps"] = std::to_string(kernel.bootstrap_reps);
    v["level"] = format_number(kernel.band_level);
    v["grid"] = kernel.grid[0].points == kernel.grid[1].points
                    ? std::to_string(kernel.grid[0].points)
                    : std::to_string(kernel.grid[0].points) + "," + std::to_string(kernel.grid[1].points);
    v["seed"] = std::to_string(kernel.seed);
    v["support-floor"] = format_number(kernel.support_floor);
    v["x"] = join_list(f.x);
    v["y"] = f.y;
    v["windows"] = join_list(f.windows);
    v["fitness-axis"] = f.fitness_axis;
    v["out"] = f.out;
    v["spec"] = f.spec;
    v["resume"] = f.resume ? "true" : "false";
    for (const auto* opt : sub->get_options()) {
        const auto& names = opt->get_lnames();
        if (names.empty() || names[0] == "help" || names[0] == "help-all") continue;
        const auto it = v.find(names[0]);
        out << "# " << names[0] << " = " << (it == v.end() ? std::string() : it->second) << '\n';
    }
}

template <class Result>
void report_diagnostics(const char* name, const Result& r, std::ostream& err) {
    for (const auto& d : r.diagnostics) err << name << ": " << d.str() << '\n';
}

WeightedBipartitePanel require_panel(const Flags& f, std::ostream& err) {
    if (f.panel.empty()) throw Error(Errc::InvalidArgument, "--panel is required");
    auto loaded = load_region_sector_panel(fs::path(f.panel), resolve_schema(f), {f.strict});
    report_diagnostics("panel", loaded, err);
    return std::move(loaded.table);
}

CountryInputs require_country(const Flags& f, std::ostream& err, bool need_fitness) {
    if (f.country_panel.empty()) throw Error(Errc::InvalidArgument, "--country-panel is required");
    if (need_fitness && f.fitness_table.empty()) throw Error(Errc::InvalidArgument, "--fitness-table is required");
    const auto schema = resolve_schema(f);
    const LoadOptions opts{f.strict};
    CountryInputs ci;
    auto c = load_country_panel(fs::path(f.country_panel), schema, opts);
    report_diagnostics("country-panel", c, err);
    ci.countries = std::move(c.table);
    if (!f.inequality_series.empty()) {
        auto s = load_inequality_series(fs::path(f.inequality_series), schema, opts);
        report_diagnostics("inequality-series", s, err);
        ci.inequality = std::move(s.table);
    }
    if (!f.fitness_table.empty()) {
        auto t = load_fitness_table(fs::path(f.fitness_table), schema, opts);
        report_diagnostics("fitness-table", t, err);
        ci.fitness = std::move(t.table);
    }
    if (!f.id_map.empty()) ci.id_map = load_id_map(f.id_map);
    return ci;
}

class Writer {
public:
    Writer(const Flags& f, std::ostream& out) : root_(f.out), out_(out) {}

    void save(const std::string& rel, const TableWriter& table) {
        table.save(root_ / rel);
        out_ << "wrote " << (root_ / rel).generic_string() << " (" << table.size() << " rows)\n";
    }

private:
    fs::path root_;
    std::ostream& out_;
};

TableWriter labeled_table(const LabeledMatrix& m, const char* measure) {
    TableWriter t({"region_id", "sector_id", measure});
    t.meta("year", std::to_string(m.year));
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t s = 0; s < m.cols(); ++s) t.row({m.regions[r], m.sectors[s], format_number(m(r, s))});
    }
    return t;
}

std::string year_csv(int year, const char* suffix = "") { return std::to_string(year) + suffix + ".csv"; }

// ---------------------------------------------------------------------------

int cmd_ingest_check(const Flags& f, std::ostream& out, std::ostream& err) {
    if (f.panel.empty() && f.country_panel.empty() && f.inequality_series.empty() && f.fitness_table.empty()) {
        throw Error(Errc::InvalidArgument, "give at least one input file");
    }
    const auto schema = resolve_schema(f);
    const LoadOptions opts{f.strict};
    std::size_t rejected = 0;
    auto summarise = [&](const char* name, const auto& r) {
        report_diagnostics(name, r, err);
        out << name << ": rows=" << r.input_rows << " accepted=" << r.accepted << " rejected=" << r.rejected << '\n';
        rejected += r.rejected;
    };
    if (!f.panel.empty()) {
        const auto r = load_region_sector_panel(fs::path(f.panel), schema, opts);
        summarise("panel", r);
        out << "panel: regions=" << r.table.regions().size() << " sectors=" << r.table.sectors().size()
            << " years=" << r.table.years().size() << '\n';
    }
    if (!f.country_panel.empty()) summarise("country-panel", load_country_panel(fs::path(f.country_panel), schema, opts));
    if (!f.inequality_series.empty()) {
        summarise("inequality-series", load_inequality_series(fs::path(f.inequality_series), schema, opts));
    }
    if (!f.fitness_table.empty()) summarise("fitness-table", load_fitness_table(fs::path(f.fitness_table), schema, opts));
    return rejected == 0 ? 0 : 1;
}

int cmd_rca(const Flags& f, std::ostream& out, std::ostream& err) {
    const auto panel = require_panel(f, err);
    const int year = *f.year;
    Writer w(f, out);
    w.save("rca/" + year_csv(year), labeled_table(rca(panel, year), "rca"));
    w.save("lq/" + year_csv(year), labeled_table(location_quotient(panel, year), "lq"));
    const auto id = check_rca_lq_identity(panel, year);
    double worst = 0.0;
    for (const auto& e : id.entries) worst = std::max(worst, std::abs(e.rca - e.reconstructed));
    out << "identity: entries=" << id.entries.size() << " excluded=" << id.excluded
        << " max_abs_error=" << format_number(worst) << (id.all_pass() ? " pass" : " FAIL") << '\n';
    return 0;
}

int cmd_binarize(const Flags& f, std::ostream& out, std::ostream& err) {
    const auto panel = require_panel(f, err);
    const int year = *f.year;
    const auto m = binarize(rca(panel, year), f.threshold);
    Writer w(f, out);
    w.save("matrices/" + year_csv(year), dense_grid_table(m));
    w.save("matrices/" + year_csv(year, "_edges"), edge_list_table(m));
    out << "pruned regions: " << join_list(m.pruned_regions) << '\n';
    out << "pruned sectors: " << join_list(m.pruned_sectors) << '\n';
    return 0;
}

int cmd_fitness(const Flags& f, std::ostream& out, std::ostream& err) {
    const auto panel = require_panel(f, err);
    const auto opts = resolve_region(f);
    const int year = *f.year;
    const auto m = binarize(rca(panel, year), opts.threshold);
    const auto result = solve(m, opts.solver);
    auto sectors = ranked_sectors(m, result);
    std::reverse(sectors.begin(), sectors.end());
    const auto sorted = sort_by_rank(m, ranked_regions(m, result), sectors);
    Writer w(f, out);
    w.save("fitness/" + year_csv(year), fitness_table(m, result));
    w.save("fitness/" + year_csv(year, "_complexity"), complexity_table(m, result));
    w.save("fitness/" + year_csv(year, "_convergence"), convergence_table(result));
    w.save("matrices/" + year_csv(year), dense_grid_table(sorted));
    out << "iterations=" << result.iterations_used << " converged_values=" << result.converged_values
        << " converged_ranks=" << result.converged_ranks << '\n';
    return 0;
}

int cmd_theil(const Flags& f, std::ostream& out, std::ostream& err) {
    const auto panel = require_panel(f, err);
    const auto years = resolve_years(f);
    Writer w(f, out);
    bool any = false;
    for (int year : panel.years()) {
        if (years && !years->contains(year)) continue;
        any = true;
        const auto& sl = panel.slice(year);
        TableWriter t({"unit", "year", "measure", "value"});
        t.meta("log_base", "e");
        for (std::size_t r = 0; r < sl.rows; ++r) {
            std::vector<SectorWage> sectors;
            std::vector<double> wages, weights;
            for (std::size_t s = 0; s < sl.cols; ++s) {
                const double e = sl.employment_at(r, s);
                if (e <= 0.0) continue;
                sectors.push_back({e, sl.wage_at(r, s) / e});
                wages.push_back(sl.wage_at(r, s) / e);
                weights.push_back(e);
            }
            if (sectors.empty()) continue;
            const auto& id = panel.regions()[r];
            try {
                t.row({id, std::to_string(year), "theil_between_sectors", format_number(between_sector_theil(sectors))});
                t.row({id, std::to_string(year), "gini_between_sectors", format_number(weighted_gini(wages, weights))});
            } catch (const Error& e) {
                if (e.code() != Errc::AllZeroIncomes) throw;
                err << "theil: region " << id << " year " << year << ": " << e.what() << '\n';
            }
        }
        w.save("theil/" + year_csv(year), t);
    }
    if (!any) throw Error(Errc::EmptyResult, "no panel year selected");
    return 0;
}

TableWriter cdi_header(const CDIParams& p) {
    TableWriter t({"unit_id", "year", "fitness_rank", "monetary_rel", "cdi_raw", "cdi_standardized", "cdi"});
    t.meta("beta", format_number(p.beta));
    t.meta("rank_transform", p.standardize_rank ? "oriented_zscore_per_year" : "oriented_raw");
    t.meta("log_transform", p.standardize_log ? "zscore_per_year" : "raw");
    t.meta("log_base", "e");
    return t;
}

int cmd_cdi(const Flags& f, std::ostream& out, std::ostream& err) {
    const auto opts = resolve_region(f);
    const auto years = resolve_years(f);
    auto t = cdi_header(opts.cdi);
    if (!f.panel.empty()) {
        const auto result = run_region_year(require_panel(f, err), years, opts);
        for (const auto& r : result.rows()) {
            t.row({r.region_id, std::to_string(r.year), std::to_string(r.fitness_rank), format_number(r.avg_wage_rel),
                   format_number(r.cdi_raw), format_number(r.cdi_standardized), format_number(r.cdi)});
        }
    } else {
        const auto pool = assemble_country_pool(require_country(f, err, true), years, opts.cdi, false);
        for (const auto& d : pool.dropped) err << "cdi: dropped " << d.unit_id << ' ' << d.year << ": " << d.reason << '\n';
        for (const auto& r : pool.rows) {
            t.row({r.country_id, std::to_string(r.year), std::to_string(r.fitness_rank), format_number(r.monetary_rel),
                   format_number(r.cdi_raw), format_number(r.cdi_standardized), format_number(r.cdi)});
        }
    }
    Writer(f, out).save("cdi.csv", t);
    return 0;
}

KernelEstimate smooth_from_flags(const Flags& f, std::optional<YearRange> years, std::ostream& err) {
    const auto opts = resolve_region(f);
    const auto kernel = resolve_kernel(f);
    if (!f.panel.empty()) {
        const auto result = run_region_year(require_panel(f, err), years, opts);
        return smooth_rows(result.rows(), years, f.x, f.y, kernel);
    }
    const auto ci = require_country(f, err, true);
    return run_country_pooled(ci, years, f.x, f.y, opts.cdi, kernel).estimate;
}

int cmd_curve(const Flags& f, std::ostream& out, std::ostream& err) {
    const auto est = smooth_from_flags(f, resolve_years(f), err);
    Writer(f, out).save("curves/" + f.y + "_vs_" + f.x[0] + ".csv", curve_table(est));
    return 0;
}

int cmd_colormap(const Flags& f, std::ostream& out, std::ostream& err) {
    const auto est = smooth_from_flags(f, resolve_years(f), err);
    Writer(f, out).save("grids/" + f.y + "_" + f.x[0] + "_" + f.x[1] + ".csv", grid_table(est));
    return 0;
}

std::vector<YearRange> resolve_windows(const Flags& f) {
    std::vector<YearRange> out;
    for (const auto& w : f.windows) out.push_back(parse_year_range(w));
    return out;
}

int cmd_windows(const Flags& f, std::ostream& out, std::ostream& err) {
    const auto windows = resolve_windows(f);
    const auto ci = require_country(f, err, true);
    const auto results = run_time_windows(ci, windows, f.x, f.y, resolve_region(f).cdi, resolve_kernel(f));
    Writer w(f, out);
    for (std::size_t k = 0; k < windows.size(); ++k) {
        const auto name = "curves/" + f.y + "_vs_" + f.x[0] + "_" + std::to_string(windows[k].first) + "-" +
                          std::to_string(windows[k].last) + ".csv";
        w.save(name, curve_table(results[k].estimate));
    }
    return 0;
}

int cmd_run_all(const Flags& f, std::ostream& out, std::ostream& err) {
    AnalysisSpec spec;
    auto path = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<fs::path>(s); };
    spec.panel = path(f.panel);
    spec.country_panel = path(f.country_panel);
    spec.inequality_series = path(f.inequality_series);
    spec.fitness_table = path(f.fitness_table);
    spec.id_map = path(f.id_map);
    spec.map = f.map;
    spec.years = resolve_years(f);
    spec.region = resolve_region(f);
    spec.kernel = resolve_kernel(f);
    spec.fitness_axis = f.fitness_axis;
    spec.windows = resolve_windows(f);
    spec.out = f.out;
    spec.resume = f.resume;
    if (!f.schema.empty()) {
        for (const auto& [k, v] : load_schema_file(f.schema).columns) spec.map.insert(spec.map.begin(), k + "=" + v);
    }
    const auto summary = run_all(spec, err);
    for (const auto& p : summary.written) out << "wrote " << (spec.out / p).generic_string() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// Spec files: "[section]" headers (ignored) and "key = value" lines whose
// keys are flag names. Values may be quoted; lists use [a, b] or commas.

std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
        s = s.substr(1, s.size() - 2);
    }
    return std::string(s);
}

std::vector<std::pair<std::string, std::vector<std::string>>> read_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoError, "cannot open spec file " + path);
    std::vector<std::pair<std::string, std::vector<std::string>>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';' || t.front() == '[') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) {
            throw Error(Errc::ParseFailure, "spec file " + path + " line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key(trim(t.substr(0, eq)));
        std::replace(key.begin(), key.end(), '_', '-');
        auto value = trim(t.substr(eq + 1));
        std::vector<std::string> values;
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']') {
                throw Error(Errc::ParseFailure, "spec file " + path + " line " + std::to_string(lineno) + ": unterminated list");
            }
            for (const auto& item : split_record(value.substr(1, value.size() - 2), ',')) {
                if (!trim(item).empty()) values.push_back(unquote(item));
            }
        } else {
            values.push_back(unquote(value));
        }
        out.emplace_back(std::move(key), std::move(values));
    }
    return out;
}

std::set<std::string> flags_given(const std::vector<std::string>& args) {
    std::set<std::string> names;
    for (const auto& a : args) {
        if (a.rfind("--", 0) != 0) continue;
        names.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
    }
    return names;
}

/// Appends the spec file's settings for every flag not given explicitly.
std::vector<std::string> merge_spec_file(const std::vector<std::string>& args, const CLI::App& sub) {
    std::string spec;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--spec" && i + 1 < args.size()) spec = args[i + 1];
        if (args[i].rfind("--spec=", 0) == 0) spec = args[i].substr(7);
    }
    if (spec.empty()) return args;
    const auto given = flags_given(args);
    std::vector<std::string> merged = args;
    for (const auto& [key, values] : read_spec_file(spec)) {
        const auto* opt = sub.get_option_no_throw("--" + key);
        if (!opt || key == "spec" || key == "help") {
            throw Error(Errc::InvalidArgument, "spec file " + spec + ": unknown key '" + key + "'");
        }
        if (given.count(key)) continue;
        if (opt->get_type_size() == 0) {
            if (values.size() == 1 && (values[0] == "true" || values[0] == "1")) merged.push_back("--" + key);
            continue;
        }
        for (const auto& v : values) {
            merged.push_back("--" + key);
            merged.push_back(v);
        }
    }
    return merged;
}

using Handler = int (*)(const Flags&, std::ostream&, std::ostream&);

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Flags f;
    CLI::App app{"Fitness-Complexity, Theil inequality and kernel-curve analytics for wage and country panels",
                 "kuznets"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    std::map<const CLI::App*, Handler> handlers;

    auto* ingest = app.add_subcommand("ingest-check", "Validate input files and report rejected rows");
    add_panel(ingest, f);
    add_country(ingest, f);
    add_schema(ingest, f);
    handlers[ingest] = cmd_ingest_check;

    auto* rca_cmd = app.add_subcommand("rca", "RCA and location quotients for one year");
    add_panel(rca_cmd, f);
    add_schema(rca_cmd, f);
    add_year(rca_cmd, f);
    add_out(rca_cmd, f);
    handlers[rca_cmd] = cmd_rca;

    auto* bin = app.add_subcommand("binarize", "Binary region-sector matrix for one year");
    add_panel(bin, f);
    add_schema(bin, f);
    add_year(bin, f);
    add_threshold(bin, f);
    add_out(bin, f);
    handlers[bin] = cmd_binarize;

    auto* fit = app.add_subcommand("fitness", "Fitness and complexity for one year");
    add_panel(fit, f);
    add_schema(fit, f);
    add_year(fit, f);
    add_solver(fit, f);
    add_out(fit, f);
    handlers[fit] = cmd_fitness;

    auto* th = app.add_subcommand("theil", "Between-sector Theil and Gini per region and year");
    add_panel(th, f);
    add_schema(th, f);
    add_years(th, f);
    add_out(th, f);
    handlers[th] = cmd_theil;

    auto* cd = app.add_subcommand("cdi", "Comparative development index for regions or countries");
    add_panel(cd, f);
    add_country(cd, f);
    add_schema(cd, f);
    add_years(cd, f);
    add_region(cd, f);
    add_out(cd, f);
    handlers[cd] = cmd_cdi;

    auto* curve = app.add_subcommand("curve", "Kernel curve with bootstrap bands");
    auto* cmap = app.add_subcommand("colormap", "Two-predictor kernel surface");
    for (auto* sub : {curve, cmap}) {
        add_panel(sub, f);
        add_country(sub, f);
        add_schema(sub, f);
        add_years(sub, f);
        add_region(sub, f);
        add_kernel(sub, f);
        add_axes(sub, f, sub == curve ? 1 : 2);
        add_out(sub, f);
    }
    handlers[curve] = cmd_curve;
    handlers[cmap] = cmd_colormap;

    auto* win = app.add_subcommand("windows", "One pooled country curve per time window");
    add_country(win, f);
    add_schema(win, f);
    add_cdi(win, f);
    add_kernel(win, f);
    add_axes(win, f, 1);
    win->add_option("--windows", f.windows, "Year ranges A:B (comma list)")->delimiter(',')->required();
    add_out(win, f);
    handlers[win] = cmd_windows;

    auto* all = app.add_subcommand("run-all", "Every analysis the inputs allow, into one output tree");
    add_panel(all, f);
    add_country(all, f);
    add_schema(all, f);
    add_years(all, f);
    add_region(all, f);
    add_kernel(all, f);
    all->add_option("--fitness-axis", f.fitness_axis, "Fitness variable: fitness, log_fitness or fitness_rank")
        ->check(CLI::IsMember({"fitness", "log_fitness", "fitness_rank"}))
        ->capture_default_str();
    all->add_option("--windows", f.windows, "Year ranges A:B for windowed country curves (comma list)")
        ->delimiter(',');
    all->add_flag("--resume", f.resume, "Reuse stage outputs whose content hash matches");
    all->add_option("--spec", f.spec, "Spec file of key = value settings (flags override it)");
    add_out(all, f);
    handlers[all] = cmd_run_all;


    std::vector<std::string> argv = args;
    try {
        if (!argv.empty() && argv[0] == "run-all") argv = merge_spec_file(argv, *all);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        const auto used = app.get_subcommands();
        err << (used.empty() ? app.help() : used.front()->help());
        return 1;
    }

    const CLI::App* sub = app.get_subcommands().front();
    try {
        echo_config(sub, f, out);
        return handlers.at(sub)(f, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_numeric_failure(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace kuznets::cli
