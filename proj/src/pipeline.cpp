#include "kuznets/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "kuznets/error.hpp"
#include "kuznets/inequality.hpp"
#include "kuznets/nestedness.hpp"
#include "kuznets/parallel.hpp"

namespace kuznets {

using json = nlohmann::ordered_json;

std::string content_hash(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

std::optional<double> RegionYearSummary::value(const std::string& name) const {
    if (name == "fitness") return fitness_value;
    if (name == "log_fitness") return std::log(fitness_value);
    if (name == "fitness_rank") return static_cast<double>(fitness_rank);
    if (name == "avg_wage") return avg_wage;
    if (name == "avg_wage_rel" || name == "monetary_rel") return avg_wage_rel;
    if (name == "theil") return theil_between_sectors;
    if (name == "gini") return gini_between_sectors;
    if (name == "cdi") return cdi;
    return std::nullopt;
}

std::optional<double> PooledRow::value(const std::string& name) const {
    if (name == "fitness") return fitness;
    if (name == "log_fitness") return std::log(fitness);
    if (name == "fitness_rank") return static_cast<double>(fitness_rank);
    if (name == "monetary_rel") return monetary_rel;
    if (name == "cdi") return cdi;
    if (name == "capital_share") return capital_share;
    if (name == "utip") return utip;
    return std::nullopt;
}

void check_variable(const std::string& name, bool country) {
    static const std::set<std::string> region_vars{"fitness", "log_fitness", "fitness_rank", "avg_wage",
                                                   "avg_wage_rel", "monetary_rel", "theil", "gini", "cdi"};
    static const std::set<std::string> country_vars{"fitness", "log_fitness", "fitness_rank", "monetary_rel",
                                                    "cdi", "capital_share", "utip"};
    const auto& vars = country ? country_vars : region_vars;
    if (!vars.count(name)) {
        std::string known;
        for (const auto& v : vars) known += (known.empty() ? "" : ", ") + v;
        throw Error(Errc::InvalidArgument, "unknown variable '" + name + "' (expected one of " + known + ")");
    }
}

std::vector<RegionYearSummary> RegionYearResult::rows() const {
    std::vector<RegionYearSummary> out;
    for (const auto& y : years) out.insert(out.end(), y.rows.begin(), y.rows.end());
    return out;
}

std::string region_year_stage_hash(const WeightedBipartitePanel& panel, int year, const RegionYearOptions& options) {
    std::string buf;
    auto put = [&](std::string_view s) {
        buf.append(s);
        buf.push_back('\x1f');
    };
    put("region-year-v1");
    put(std::to_string(year));
    for (const auto& r : panel.regions()) put(r);
    put("|");
    for (const auto& s : panel.sectors()) put(s);
    const auto& sl = panel.slice(year);
    for (std::size_t k = 0; k < sl.wage.size(); ++k) {
        put(format_number(sl.wage[k]));
        put(format_number(sl.employment[k]));
    }
    put(format_number(options.threshold));
    put(format_number(options.solver.value_tol));
    put(std::to_string(options.solver.rank_patience));
    put(std::to_string(options.solver.max_iterations));
    put(format_number(options.cdi.beta));
    put(options.cdi.standardize_log ? "1" : "0");
    put(options.cdi.standardize_rank ? "1" : "0");
    put(options.avg_wage == AvgWageMode::EmploymentWeighted ? "weighted" : "sector_mean");
    return content_hash(buf);
}

namespace {

[[noreturn]] void rethrow_in_stage(const Error& e, int year, const char* stage) {
    throw Error(e.code(), "year " + std::to_string(year) + ", stage " + stage + ": " + e.what());
}

YearOutcome compute_year(const WeightedBipartitePanel& panel, int year, const RegionYearOptions& options) {
    YearOutcome out;
    out.year = year;
    const char* stage = "rca";
    try {
        const auto rca_matrix = rca(panel, year);
        stage = "binarize";
        const auto m = binarize(rca_matrix, options.threshold);
        out.pruned_regions = m.pruned_regions;
        out.pruned_sectors = m.pruned_sectors;
        stage = "fitness";
        auto result = solve(m, options.solver);
        out.iterations = result.iterations_used;
        out.converged_values = result.converged_values;
        out.converged_ranks = result.converged_ranks;
        out.value_residual = result.value_residual;

        auto sector_order = ranked_sectors(m, result);
        std::reverse(sector_order.begin(), sector_order.end());  // least complex first
        out.matrix = sort_by_rank(m, ranked_regions(m, result), sector_order);
        out.nodf = nodf(*out.matrix);

        stage = "theil";
        const auto& sl = panel.slice(year);
        std::unordered_map<std::string_view, std::size_t> panel_row;
        for (std::size_t r = 0; r < panel.regions().size(); ++r) panel_row.emplace(panel.regions()[r], r);

        std::vector<MonetaryObservation> monetary;
        std::vector<RankObservation> ranks;
        std::vector<RegionYearSummary> rows(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const auto pr = panel_row.at(m.regions()[i]);
            std::vector<SectorWage> sectors;
            std::vector<double> wages, weights;
            long double w_total = 0.0L, e_total = 0.0L, mean_acc = 0.0L;
            for (std::size_t s = 0; s < sl.cols; ++s) {
                const double e = sl.employment_at(pr, s);
                if (e <= 0.0) continue;
                const double w = sl.wage_at(pr, s);
                sectors.push_back({e, w / e});
                wages.push_back(w / e);
                weights.push_back(e);
                w_total += w;
                e_total += e;
                mean_acc += w / e;
            }
            auto& row = rows[i];
            row.region_id = m.regions()[i];
            row.year = year;
            row.fitness_value = result.final_state.f[i];
            row.fitness_rank = result.region_ranking.rank[i];
            row.theil_between_sectors = between_sector_theil(sectors);
            row.gini_between_sectors = weighted_gini(wages, weights);
            row.avg_wage = options.avg_wage == AvgWageMode::EmploymentWeighted
                               ? static_cast<double>(w_total / e_total)
                               : static_cast<double>(mean_acc / static_cast<long double>(sectors.size()));
            monetary.push_back({row.region_id, year, row.avg_wage});
            ranks.push_back({row.region_id, year, row.fitness_rank});
        }

        stage = "cdi";
        const auto rel = relative_monetary(monetary);
        const auto joined = join_development(ranks, rel);
        const auto dev = cdi(joined.records, options.cdi);
        std::unordered_map<std::string_view, const DevelopmentRecord*> by_unit;
        for (const auto& d : dev) by_unit.emplace(d.unit_id, &d);
        for (auto& row : rows) {
            const auto* d = by_unit.at(row.region_id);
            row.avg_wage_rel = d->monetary_rel;
            row.cdi_raw = d->cdi_raw;
            row.cdi_standardized = d->cdi_standardized;
            row.cdi = d->cdi(options.cdi);
        }
        // Output rows follow the fitness ranking.
        out.rows.reserve(rows.size());
        for (auto i : result.region_ranking.order) out.rows.push_back(rows[i]);
        out.fitness = std::move(result);
    } catch (const Error& e) {
        rethrow_in_stage(e, year, stage);
    }
    return out;
}

}  // namespace

RegionYearResult run_region_year(const WeightedBipartitePanel& panel, std::optional<YearRange> years,
                                 const RegionYearOptions& options, const YearReuse& reuse) {
    std::vector<int> selected;
    for (int y : panel.years()) {
        if (!years || years->contains(y)) selected.push_back(y);
    }
    if (selected.empty()) {
        throw Error(Errc::EmptyResult, "no panel year in " + (years ? years->str() : std::string("(all)")));
    }
    RegionYearResult result;
    result.years.resize(selected.size());
    parallel_for(selected.size(), [&](std::size_t k) {
        const int year = selected[k];
        const auto hash = region_year_stage_hash(panel, year, options);
        std::optional<YearOutcome> reused;
        if (reuse) reused = reuse(year, hash);
        if (reused) {
            result.years[k] = std::move(*reused);
            result.years[k].resumed = true;
        } else {
            result.years[k] = compute_year(panel, year, options);
        }
        result.years[k].stage_hash = hash;
    });
    return result;
}

TableWriter summary_table(std::span<const RegionYearSummary> rows, const CDIParams& params) {
    TableWriter out({"region_id", "year", "fitness_value", "fitness_rank", "avg_wage", "avg_wage_rel",
                     "theil_between_sectors", "gini_between_sectors", "cdi_raw", "cdi_standardized", "cdi"});
    out.meta("beta", format_number(params.beta));
    out.meta("cdi", params.standardize_log ? "standardized" : "raw");
    for (const auto& r : rows) {
        out.row({r.region_id, std::to_string(r.year), format_number(r.fitness_value), std::to_string(r.fitness_rank),
                 format_number(r.avg_wage), format_number(r.avg_wage_rel), format_number(r.theil_between_sectors),
                 format_number(r.gini_between_sectors), format_number(r.cdi_raw), format_number(r.cdi_standardized),
                 format_number(r.cdi)});
    }
    return out;
}

TableWriter theil_table(std::span<const RegionYearSummary> rows, int year) {
    TableWriter out({"unit", "year", "measure", "value"});
    out.meta("log_base", "e");
    for (const auto& r : rows) {
        if (r.year != year) continue;
        out.row({r.region_id, std::to_string(year), "theil_between_sectors", format_number(r.theil_between_sectors)});
        out.row({r.region_id, std::to_string(year), "gini_between_sectors", format_number(r.gini_between_sectors)});
    }
    return out;
}

PooledTable assemble_country_pool(const CountryInputs& inputs, std::optional<YearRange> years, const CDIParams& params,
                                  bool need_utip) {
    auto in_range = [&](int y) { return !years || years->contains(y); };
    auto mapped = [&](const std::string& id) {
        const auto it = inputs.id_map.find(id);
        return it == inputs.id_map.end() ? id : it->second;
    };
    using Key = std::pair<int, std::string>;

    std::vector<MonetaryObservation> monetary;
    std::map<Key, const CountryYearRecord*> country_by_key;
    for (const auto& c : inputs.countries) {
        if (!in_range(c.year)) continue;
        monetary.push_back({c.country_id, c.year, c.gdp_pc});
        country_by_key.emplace(Key{c.year, c.country_id}, &c);
    }
    std::vector<RelativeMonetary> rel;
    if (!monetary.empty()) rel = relative_monetary(monetary);

    std::map<int, std::vector<std::pair<std::string, double>>> fitness_by_year;
    std::map<Key, double> fitness_value;
    for (const auto& f : inputs.fitness) {
        if (!in_range(f.year)) continue;
        const auto id = mapped(f.country_id);
        if (!fitness_value.emplace(Key{f.year, id}, f.fitness).second) {
            throw Error(Errc::DuplicateKey, "fitness for (" + id + ", " + std::to_string(f.year) + ") after id mapping");
        }
        fitness_by_year[f.year].emplace_back(id, f.fitness);
    }
    std::vector<RankObservation> ranks;
    for (const auto& [year, entries] : fitness_by_year) {
        std::vector<double> values;
        std::vector<std::string> ids;
        for (const auto& [id, v] : entries) {
            ids.push_back(id);
            values.push_back(v);
        }
        const auto ranking = rank(values, ids);
        for (std::size_t i = 0; i < ids.size(); ++i) ranks.push_back({ids[i], year, ranking.rank[i]});
    }

    std::map<Key, double> utip_by_key;
    if (need_utip) {
        for (const auto& u : inputs.inequality) {
            if (!in_range(u.year)) continue;
            const auto id = mapped(u.country_id);
            if (!utip_by_key.emplace(Key{u.year, id}, u.theil_value).second) {
                throw Error(Errc::DuplicateKey, "inequality for (" + id + ", " + std::to_string(u.year) +
                                                    ") after id mapping");
            }
        }
    }

    const auto joined = join_development(ranks, rel);
    const auto dev = cdi(joined.records, params);

    PooledTable table;
    table.dropped = joined.dropped;
    std::set<Key> dev_keys;
    for (const auto& d : dev) {
        const Key key{d.year, d.unit_id};
        dev_keys.insert(key);
        PooledRow row;
        row.country_id = d.unit_id;
        row.year = d.year;
        row.monetary_rel = d.monetary_rel;
        row.gdp_pc = d.monetary;
        row.fitness = fitness_value.at(key);
        row.fitness_rank = d.fitness_rank;
        row.cdi_raw = d.cdi_raw;
        row.cdi_standardized = d.cdi_standardized;
        row.cdi = d.cdi(params);
        row.capital_share = country_by_key.at(key)->capital_share;
        if (need_utip) {
            const auto it = utip_by_key.find(key);
            if (it == utip_by_key.end()) {
                table.dropped.push_back({d.unit_id, d.year, "no inequality value"});
                continue;
            }
            row.utip = it->second;
        }
        table.rows.push_back(std::move(row));
    }
    if (need_utip) {
        std::set<Key> listed;
        for (const auto& d : table.dropped) listed.insert(Key{d.year, d.unit_id});
        for (const auto& [key, _] : utip_by_key) {
            if (!dev_keys.count(key) && !listed.count(key)) {
                table.dropped.push_back({key.second, key.first, "inequality value without panel or fitness"});
            }
        }
    }
    std::sort(table.dropped.begin(), table.dropped.end(), [](const DroppedKey& a, const DroppedKey& b) {
        return std::tie(a.year, a.unit_id, a.reason) < std::tie(b.year, b.unit_id, b.reason);
    });
    table.joinable = table.rows.size() + table.dropped.size();
    if (table.rows.empty()) {
        std::string pairs;
        for (const auto& d : table.dropped) {
            pairs += (pairs.empty() ? "" : "; ") + d.unit_id + " " + std::to_string(d.year) + " (" + d.reason + ")";
        }
        throw Error(Errc::MissingJoin, "no (country, year) present in every input" +
                                           (pairs.empty() ? std::string(" (inputs empty)") : ": " + pairs));
    }
    return table;
}

namespace {

bool uses_utip(const std::vector<std::string>& xs, const std::string& y) {
    return y == "utip" || std::find(xs.begin(), xs.end(), "utip") != xs.end();
}

KernelEstimate smooth(const std::vector<Observation>& obs, std::size_t dims, KernelConfig config) {
    config.dims = dims;
    if (dims == 2) return colormap_grid(obs, config);
    return config.bootstrap_reps > 0 ? bootstrap_bands(obs, config) : kernel_regress(obs, config);
}

void check_axes(const std::vector<std::string>& xs, const std::string& y, bool country) {
    if (xs.empty() || xs.size() > 2) throw Error(Errc::InvalidArgument, "need one or two predictors");
    for (const auto& x : xs) check_variable(x, country);
    check_variable(y, country);
}

}  // namespace

PooledAnalysis run_country_pooled(const CountryInputs& inputs, std::optional<YearRange> years,
                                  const std::vector<std::string>& xs, const std::string& y, const CDIParams& cdi_params,
                                  KernelConfig config) {
    check_axes(xs, y, true);
    PooledAnalysis out;
    out.table = assemble_country_pool(inputs, years, cdi_params, uses_utip(xs, y));
    out.observations = make_observations<PooledRow>(out.table.rows, xs, y);
    out.estimate = smooth(out.observations, xs.size(), config);
    return out;
}

std::vector<PooledAnalysis> run_time_windows(const CountryInputs& inputs, const std::vector<YearRange>& windows,
                                             const std::vector<std::string>& xs, const std::string& y,
                                             const CDIParams& cdi_params, const KernelConfig& config) {
    if (windows.empty()) throw Error(Errc::InvalidArgument, "no time window given");
    std::vector<PooledAnalysis> out;
    for (const auto& w : windows) {
        try {
            out.push_back(run_country_pooled(inputs, w, xs, y, cdi_params, config));
        } catch (const Error& e) {
            if (e.code() == Errc::MissingJoin || e.code() == Errc::EmptyResult ||
                e.code() == Errc::TooFewObservations) {
                throw Error(Errc::EmptyWindow, "window " + w.str() + ": " + e.what());
            }
            throw;
        }
    }
    return out;
}

KernelEstimate smooth_rows(std::span<const RegionYearSummary> rows, std::optional<YearRange> years,
                           const std::vector<std::string>& xs, const std::string& y, KernelConfig config) {
    check_axes(xs, y, false);
    std::vector<RegionYearSummary> selected;
    for (const auto& r : rows) {
        if (!years || years->contains(r.year)) selected.push_back(r);
    }
    const auto obs = make_observations<RegionYearSummary>(selected, xs, y);
    return smooth(obs, xs.size(), config);
}

// ---------------------------------------------------------------------------
// run_all

namespace {

json outcome_to_json(const YearOutcome& y) {
    json rows = json::array();
    for (const auto& r : y.rows) {
        rows.push_back({{"region_id", r.region_id},
                        {"fitness_value", r.fitness_value},
                        {"fitness_rank", r.fitness_rank},
                        {"avg_wage", r.avg_wage},
                        {"avg_wage_rel", r.avg_wage_rel},
                        {"theil_between_sectors", r.theil_between_sectors},
                        {"gini_between_sectors", r.gini_between_sectors},
                        {"cdi_raw", r.cdi_raw},
                        {"cdi_standardized", r.cdi_standardized},
                        {"cdi", r.cdi}});
    }
    return {{"year", y.year},
            {"stage_hash", y.stage_hash},
            {"iterations", y.iterations},
            {"converged_values", y.converged_values},
            {"converged_ranks", y.converged_ranks},
            {"value_residual", y.value_residual},
            {"nodf", y.nodf},
            {"pruned_regions", y.pruned_regions},
            {"pruned_sectors", y.pruned_sectors},
            {"rows", rows}};
}

YearOutcome outcome_from_json(const json& j) {
    YearOutcome y;
    y.year = j.at("year").get<int>();
    y.stage_hash = j.at("stage_hash").get<std::string>();
    y.iterations = j.at("iterations").get<int>();
    y.converged_values = j.at("converged_values").get<bool>();
    y.converged_ranks = j.at("converged_ranks").get<bool>();
    y.value_residual = j.at("value_residual").get<double>();
    y.nodf = j.at("nodf").get<double>();
    y.pruned_regions = j.at("pruned_regions").get<std::vector<std::string>>();
    y.pruned_sectors = j.at("pruned_sectors").get<std::vector<std::string>>();
    for (const auto& r : j.at("rows")) {
        RegionYearSummary s;
        s.region_id = r.at("region_id").get<std::string>();
        s.year = y.year;
        s.fitness_value = r.at("fitness_value").get<double>();
        s.fitness_rank = r.at("fitness_rank").get<std::size_t>();
        s.avg_wage = r.at("avg_wage").get<double>();
        s.avg_wage_rel = r.at("avg_wage_rel").get<double>();
        s.theil_between_sectors = r.at("theil_between_sectors").get<double>();
        s.gini_between_sectors = r.at("gini_between_sectors").get<double>();
        s.cdi_raw = r.at("cdi_raw").get<double>();
        s.cdi_standardized = r.at("cdi_standardized").get<double>();
        s.cdi = r.at("cdi").get<double>();
        y.rows.push_back(std::move(s));
    }
    return y;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string year_file(const char* dir, int year, const char* suffix = "") {
    return std::string(dir) + "/" + std::to_string(year) + suffix + ".csv";
}

json kernel_json(const KernelConfig& k) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json("silverman"); };
    return {{"kernel", "gaussian"},
            {"bandwidth", {opt(k.bandwidth[0]), opt(k.bandwidth[1])}},
            {"grid", {k.grid[0].points, k.grid[1].points}},
            {"reps", k.bootstrap_reps},
            {"level", k.band_level},
            {"seed", k.seed},
            {"rng", std::string(kRngName)},
            {"support_floor", k.support_floor},
            {"bands", "pointwise"}};
}

json estimate_json(const KernelEstimate& e) {
    std::size_t supported = 0;
    for (auto s : e.supported) supported += s;
    json bw = json::array();
    for (std::size_t d = 0; d < e.dims; ++d) bw.push_back(e.bandwidth[d]);
    return {{"observations", e.observations}, {"bandwidth", bw}, {"supported_points", supported},
            {"grid_points", e.size()}};
}

}  // namespace

RunSummary run_all(const AnalysisSpec& spec, std::ostream& diagnostics) {
    if (!spec.panel && !spec.country_panel) {
        throw Error(Errc::InvalidArgument, "run-all needs --panel and/or --country-panel");
    }
    const auto schema = parse_schema(spec.map);
    const auto& out_dir = spec.out;
    RunSummary summary;
    std::vector<std::string> written;
    auto save = [&](const std::string& rel, const TableWriter& table) {
        table.save(out_dir / rel);
        written.push_back(rel);
    };
    json report;
    report["tool"] = "kuznets";
    json config;
    auto path_or_null = [](const std::optional<std::filesystem::path>& p) {
        return p ? json(p->generic_string()) : json(nullptr);
    };
    config["panel"] = path_or_null(spec.panel);
    config["country_panel"] = path_or_null(spec.country_panel);
    config["inequality_series"] = path_or_null(spec.inequality_series);
    config["fitness_table"] = path_or_null(spec.fitness_table);
    config["id_map"] = path_or_null(spec.id_map);
    config["map"] = spec.map;
    config["years"] = spec.years ? json(spec.years->str()) : json(nullptr);
    config["threshold"] = spec.region.threshold;
    config["solver"] = {{"value_tol", spec.region.solver.value_tol},
                        {"rank_patience", spec.region.solver.rank_patience},
                        {"max_iterations", spec.region.solver.max_iterations}};
    config["cdi"] = {{"beta", spec.region.cdi.beta},
                     {"rank_transform", spec.region.cdi.standardize_rank ? "oriented_zscore_per_year" : "oriented_raw"},
                     {"log_transform", spec.region.cdi.standardize_log ? "zscore_per_year" : "raw"}};
    config["avg_wage"] = spec.region.avg_wage == AvgWageMode::EmploymentWeighted ? "employment_weighted" : "sector_mean";
    config["kernel"] = kernel_json(spec.kernel);
    config["fitness_axis"] = spec.fitness_axis;
    json windows = json::array();
    for (const auto& w : spec.windows) windows.push_back(w.str());
    config["windows"] = windows;
    report["config"] = config;
    json inputs = json::object();
    json skipped = json::array();
    json curves = json::object();

    auto record_skip = [&](const std::string& what, const Error& e) {
        skipped.push_back({{"output", what}, {"reason", e.what()}});
        diagnostics << "skipped " << what << ": " << e.what() << '\n';
    };
    auto emit_curve = [&](const std::string& rel, auto&& compute) {
        try {
            const KernelEstimate est = compute();
            save(rel, est.dims == 1 ? curve_table(est) : grid_table(est));
            curves[rel] = estimate_json(est);
        } catch (const Error& e) {
            if (e.code() == Errc::InvalidArgument || e.code() == Errc::IoError) throw;
            record_skip(rel, e);
        }
    };
    auto report_load = [&](const char* name, const auto& res) {
        for (const auto& d : res.diagnostics) diagnostics << name << ": " << d.str() << '\n';
        inputs[name] = {{"rows", res.input_rows}, {"accepted", res.accepted}, {"rejected", res.rejected}};
        summary.rejected_rows += res.rejected;
    };

    if (spec.panel) {
        const auto loaded = load_region_sector_panel(*spec.panel, schema);
        report_load("panel", loaded);
        const auto& panel = loaded.table;

        YearReuse reuse;
        std::map<int, json> previous;
        if (spec.resume) {
            for (int y : panel.years()) {
                const auto stage_path = out_dir / "stages" / (std::to_string(y) + ".json");
                if (!std::filesystem::exists(stage_path)) continue;
                try {
                    previous.emplace(y, json::parse(read_file(stage_path)));
                } catch (const json::exception&) {
                }
            }
            reuse = [&](int year, const std::string& hash) -> std::optional<YearOutcome> {
                const auto it = previous.find(year);
                if (it == previous.end() || it->second.value("stage_hash", "") != hash) return std::nullopt;
                for (const auto* f : {"matrices", "fitness", "theil"}) {
                    if (!std::filesystem::exists(out_dir / year_file(f, year))) return std::nullopt;
                }
                return outcome_from_json(it->second);
            };
        }

        const auto result = run_region_year(panel, spec.years, spec.region, reuse);
        json years = json::array();
        for (const auto& y : result.years) {
            const int year = y.year;
            if (!y.resumed) {
                save(year_file("matrices", year), dense_grid_table(*y.matrix));
                save(year_file("matrices", year, "_edges"), edge_list_table(*y.matrix));
                save(year_file("fitness", year), fitness_table(*y.matrix, *y.fitness));
                save(year_file("fitness", year, "_complexity"), complexity_table(*y.matrix, *y.fitness));
                save(year_file("fitness", year, "_convergence"), convergence_table(*y.fitness));
                save(year_file("theil", year), theil_table(y.rows, year));
                const std::string stage_rel = "stages/" + std::to_string(year) + ".json";
                write_text_file(out_dir / stage_rel, outcome_to_json(y).dump(1) + "\n");
                written.push_back(stage_rel);
            } else {
                for (const auto& rel : {year_file("matrices", year), year_file("matrices", year, "_edges"),
                                        year_file("fitness", year), year_file("fitness", year, "_complexity"),
                                        year_file("fitness", year, "_convergence"), year_file("theil", year),
                                        "stages/" + std::to_string(year) + ".json"}) {
                    written.push_back(rel);
                }
            }
            json entry = {{"year", year},
                          {"stage_hash", y.stage_hash},
                          {"resumed", y.resumed},
                          {"regions", y.rows.size()},
                          {"iterations", y.iterations},
                          {"converged_values", y.converged_values},
                          {"converged_ranks", y.converged_ranks},
                          {"value_residual", y.value_residual},
                          {"pruned_regions", y.pruned_regions},
                          {"pruned_sectors", y.pruned_sectors},
                          {"nodf", y.nodf}};
            years.push_back(entry);
        }
        report["years"] = years;
        const auto rows = result.rows();
        save("summary.csv", summary_table(rows, spec.region.cdi));

        const auto& fx = spec.fitness_axis;
        for (const auto& y : result.years) {
            const YearRange only{y.year, y.year};
            const auto tag = "_" + std::to_string(y.year) + ".csv";
            for (const auto& x : {fx, std::string("avg_wage_rel"), std::string("cdi")}) {
                emit_curve("curves/theil_vs_" + x + tag,
                           [&] { return smooth_rows(rows, only, {x}, "theil", spec.kernel); });
            }
            emit_curve("curves/avg_wage_rel_vs_" + fx + tag,
                       [&] { return smooth_rows(rows, only, {fx}, "avg_wage_rel", spec.kernel); });
            emit_curve("grids/theil_" + fx + "_avg_wage_rel" + tag,
                       [&] { return smooth_rows(rows, only, {fx, "avg_wage_rel"}, "theil", spec.kernel); });
        }
    }

    if (spec.country_panel) {
        CountryInputs ci;
        auto countries = load_country_panel(*spec.country_panel, schema);
        report_load("country_panel", countries);
        ci.countries = std::move(countries.table);
        if (spec.inequality_series) {
            auto ineq = load_inequality_series(*spec.inequality_series, schema);
            report_load("inequality_series", ineq);
            ci.inequality = std::move(ineq.table);
        }
        if (spec.fitness_table) {
            auto fit = load_fitness_table(*spec.fitness_table, schema);
            report_load("fitness_table", fit);
            ci.fitness = std::move(fit.table);
        }
        if (spec.id_map) ci.id_map = load_id_map(*spec.id_map);

        TableWriter cs({"country_id", "year", "labor_share", "capital_share"});
        for (const auto& r : capital_share_series(ci.countries)) {
            if (spec.years && !spec.years->contains(r.year)) continue;
            cs.row({r.country_id, std::to_string(r.year), format_number(r.labor_share), format_number(r.capital_share)});
        }
        save("capital_share.csv", cs);

        if (!ci.fitness.empty()) {
            const bool have_utip = !ci.inequality.empty();
            json joins = json::object();
            try {
                const auto pool = assemble_country_pool(ci, spec.years, spec.region.cdi, have_utip);
                TableWriter pooled({"country_id", "year", "gdp_pc", "monetary_rel", "fitness", "fitness_rank",
                                    "cdi_raw", "cdi_standardized", "capital_share", "utip"});
                pooled.meta("beta", format_number(spec.region.cdi.beta));
                for (const auto& r : pool.rows) {
                    pooled.row({r.country_id, std::to_string(r.year), format_number(r.gdp_pc),
                                format_number(r.monetary_rel), format_number(r.fitness),
                                std::to_string(r.fitness_rank), format_number(r.cdi_raw),
                                format_number(r.cdi_standardized), format_number(r.capital_share),
                                r.utip ? format_number(*r.utip) : ""});
                }
                save("pooled.csv", pooled);
                json dropped = json::array();
                for (const auto& d : pool.dropped) {
                    dropped.push_back({{"country_id", d.unit_id}, {"year", d.year}, {"reason", d.reason}});
                }
                joins = {{"joinable", pool.joinable}, {"rows", pool.rows.size()}, {"dropped", dropped}};
            } catch (const Error& e) {
                if (e.code() != Errc::MissingJoin) throw;
                record_skip("pooled.csv", e);
            }
            report["country_join"] = joins;

            const auto& fx = spec.fitness_axis;
            auto pooled_curve = [&](const std::vector<std::string>& xs, const std::string& y,
                                    std::optional<YearRange> range) {
                return run_country_pooled(ci, range, xs, y, spec.region.cdi, spec.kernel).estimate;
            };
            emit_curve("grids/capital_share_" + fx + "_monetary_rel.csv",
                       [&] { return pooled_curve({fx, "monetary_rel"}, "capital_share", spec.years); });
            if (have_utip) {
                for (const auto& x : {std::string("monetary_rel"), fx, std::string("cdi")}) {
                    emit_curve("curves/utip_vs_" + x + ".csv", [&] { return pooled_curve({x}, "utip", spec.years); });
                }
                emit_curve("grids/utip_" + fx + "_monetary_rel.csv",
                           [&] { return pooled_curve({fx, "monetary_rel"}, "utip", spec.years); });
                for (const auto& w : spec.windows) {
                    emit_curve("curves/utip_vs_cdi_" + std::to_string(w.first) + "-" + std::to_string(w.last) + ".csv",
                               [&] { return pooled_curve({"cdi"}, "utip", w); });
                }
            }
        }
    }

    report["inputs"] = inputs;
    report["curves"] = curves;
    report["skipped"] = skipped;
    std::sort(written.begin(), written.end());
    written.erase(std::unique(written.begin(), written.end()), written.end());
    json files = json::object();
    for (const auto& rel : written) files[rel] = content_hash(read_file(out_dir / rel));
    report["files"] = files;
    write_text_file(out_dir / "report.json", report.dump(2) + "\n");
    written.push_back("report.json");
    for (const auto& rel : written) summary.written.emplace_back(rel);
    return summary;
}

}  // namespace kuznets
