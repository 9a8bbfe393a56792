// Writes the bundled synthetic inputs: a nested region-sector wage panel and a
// small country panel with matching inequality and fitness series.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kuznets/bipartite.hpp"
#include "kuznets/ingest.hpp"
#include "kuznets/random.hpp"
#include "kuznets/table.hpp"

namespace {

using namespace kuznets;

std::string padded(const char* prefix, int n, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, n);
    return buf;
}

WeightedBipartitePanel region_panel(int regions, int sectors, int first_year, int years, std::uint64_t seed) {
    std::vector<std::string> region_ids, sector_ids;
    for (int r = 0; r < regions; ++r) region_ids.push_back(padded("R", r + 1, 3));
    for (int s = 0; s < sectors; ++s) sector_ids.push_back(std::to_string(311 + 7 * s));
    WeightedBipartitePanel panel(region_ids, sector_ids);

    auto base = stream_engine(seed, 0);
    std::vector<double> capability(regions), complexity(sectors);
    for (int r = 0; r < regions; ++r) capability[r] = (r + 0.5) / regions + 0.05 * standard_normal(base);
    for (int s = 0; s < sectors; ++s) complexity[s] = static_cast<double>(s) / sectors;

    for (int t = 0; t < years; ++t) {
        auto rng = stream_engine(seed, 1 + static_cast<std::uint64_t>(t));
        for (int r = 0; r < regions; ++r) {
            const double a = capability[r] + 0.02 * t;
            for (int s = 0; s < sectors; ++s) {
                const bool active = s == 0 || a + 0.08 * standard_normal(rng) >= complexity[s];
                if (!active) {
                    panel.set(first_year + t, r, s, 0.0, 0.0);
                    continue;
                }
                const double employment = std::round(50.0 + 400.0 * std::exp(0.6 * standard_normal(rng)));
                const double per_worker =
                    30000.0 * (1.0 + complexity[s]) * (1.0 + 0.4 * a) * std::exp(0.1 * standard_normal(rng));
                panel.set(first_year + t, r, s, std::round(employment * per_worker), employment);
            }
        }
    }
    return panel;
}

void country_files(const std::filesystem::path& dir, int countries, int first_year, int years, std::uint64_t seed) {
    auto rng = stream_engine(seed, 1000);
    std::vector<CountryYearRecord> panel;
    TableWriter inequality({"country_id", "year", "theil_value"});
    TableWriter fitness({"country_id", "year", "fitness"});
    for (int c = 0; c < countries; ++c) {
        const double level = (c + 0.5) / countries;
        const auto id = padded("C", c + 1, 2);
        for (int t = 0; t < years; ++t) {
            const int year = first_year + t;
            const double dev = level + 0.01 * t + 0.03 * standard_normal(rng);
            const double gdp = std::round(800.0 * std::exp(4.0 * dev + 0.1 * standard_normal(rng)));
            const double labor = std::clamp(0.45 + 0.25 * dev + 0.03 * standard_normal(rng), 0.05, 0.95);
            panel.push_back({id, year, gdp, 1.0e6 * (1 + c % 7), labor, 1.0 - labor});
            const double theil = 0.2 + 0.25 * std::exp(-std::pow((dev - 0.5) / 0.2, 2)) + 0.01 * standard_normal(rng);
            inequality.row({id, std::to_string(year), format_number(std::max(theil, 0.01))});
            fitness.row({id, std::to_string(year), format_number(std::exp(3.0 * dev + 0.2 * standard_normal(rng)))});
        }
    }
    write_country_panel(panel, dir / "countries.csv");
    inequality.save(dir / "inequality.csv");
    fitness.save(dir / "fitness.csv");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic inputs for the kuznets toolkit"};
    std::string out = "data/synthetic";
    std::uint64_t seed = kuznets::kDefaultSeed;
    int regions = 50, sectors = 20, years = 5;
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Seed")->capture_default_str();
    app.add_option("--regions", regions, "Regions")->capture_default_str();
    app.add_option("--sectors", sectors, "Sectors")->capture_default_str();
    app.add_option("--years", years, "Years from 2010")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    const std::filesystem::path dir(out);
    kuznets::write_region_sector_panel(region_panel(regions, sectors, 2010, years, seed), dir / "panel.csv");
    country_files(dir, 40, 1995, 14, seed);
    std::cout << "wrote " << (dir / "panel.csv").generic_string() << ", countries.csv, inequality.csv, fitness.csv\n";
    return 0;
}
