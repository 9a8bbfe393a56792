#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kuznets/error.hpp"
#include "kuznets/ingest.hpp"
#include "kuznets/table.hpp"

using namespace kuznets;

namespace {

const ColumnSchema kDefault{};

template <class F>
Errc code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::InvalidArgument;
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto dir = std::filesystem::temp_directory_path() / "kuznets_unit";
    std::filesystem::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << content;
    return p;
}

}  // namespace

TEST_CASE("delimited reader keeps metadata and strips BOM and CR") {
    std::istringstream in("\xEF\xBB\xBF# source=test\r\na,b\r\n1,\"x,y\"\r\n\r\n2,z\r\n");
    const auto t = read_delimited(in, ',');
    REQUIRE(t.metadata.size() == 1);
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "x,y");
    CHECK(t.column("b") == 1u);
    CHECK_FALSE(t.column("c"));
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-13, 123456789.123, -2.5}) CHECK(parse_number(format_number(v)) == v);
    CHECK(format_number(1.0) == "1");
    CHECK_FALSE(parse_number("nan"));
    CHECK_FALSE(parse_number("1.5x"));
    CHECK(parse_integer(" 1998 ") == 1998);
}

TEST_CASE("table writer emits metadata then header") {
    TableWriter w({"a", "b"});
    w.meta("seed", "7").row({"1", "2"});
    CHECK(w.str() == "# seed=7\na,b\n1,2\n");
    CHECK_THROWS_AS(w.row({"1"}), Error);
}

TEST_CASE("minimal region-sector file gives one 2x2 slice") {
    std::istringstream in("region_id,sector_id,year,wage_total,employment\n"
                          "r1,s1,1998,2,1\nr1,s2,1998,0,0\nr2,s1,1998,1,1\nr2,s2,1998,1,1\n");
    const auto res = load_region_sector_panel(in, kDefault);
    CHECK(res.accepted == 4);
    CHECK(res.rejected == 0);
    const auto& p = res.table;
    CHECK(p.regions().size() == 2);
    CHECK(p.sectors().size() == 2);
    CHECK(p.years() == std::vector<int>{1998});
    CHECK(p.slice(1998).wage_at(0, 0) == 2.0);
}

TEST_CASE("negative wage is rejected with its row number") {
    const std::string text = "region_id,sector_id,year,wage_total,employment\n"
                             "r1,s1,1998,2,1\nr1,s2,1998,3,1\nr2,s1,1998,-5,1\n";
    std::istringstream lenient(text);
    const auto res = load_region_sector_panel(lenient, kDefault);
    REQUIRE(res.diagnostics.size() == 1);
    CHECK(res.diagnostics[0].row == 3);
    CHECK(res.diagnostics[0].code == Errc::InvariantViolation);
    CHECK(res.rejected == 1);

    std::istringstream strict(text);
    try {
        load_region_sector_panel(strict, kDefault, {true});
        FAIL("expected InvariantViolation");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::InvariantViolation);
        CHECK(e.row() == 3u);
    }
}

TEST_CASE("duplicate key and wage without employment") {
    std::istringstream dup("region_id,sector_id,year,wage_total,employment\nr1,s1,1998,2,1\nr1,s1,1998,3,1\n");
    CHECK(code_of([&] { load_region_sector_panel(dup, kDefault, {true}); }) == Errc::DuplicateKey);

    std::istringstream bad("region_id,sector_id,year,wage_total,employment\nr1,s1,1998,2,0\n");
    CHECK(code_of([&] { load_region_sector_panel(bad, kDefault, {true}); }) == Errc::InvariantViolation);

    std::istringstream unpaid("region_id,sector_id,year,wage_total,employment\nr1,s1,1998,0,4\n");
    const auto res = load_region_sector_panel(unpaid, kDefault);
    CHECK(res.accepted == 1);
    REQUIRE(res.diagnostics.size() == 1);
    CHECK_FALSE(res.diagnostics[0].rejected);
}

TEST_CASE("missing values, bad numbers and missing columns") {
    std::istringstream in("region_id,sector_id,year,wage_total,employment\nr1,s1,1998,,1\nr1,s2,x,1,1\n");
    const auto res = load_region_sector_panel(in, kDefault);
    REQUIRE(res.diagnostics.size() == 2);
    CHECK(res.diagnostics[0].code == Errc::ParseFailure);
    CHECK(res.diagnostics[1].row == 2);

    std::istringstream nocol("region,sector_id,year,wage_total,employment\nr1,s1,1998,1,1\n");
    CHECK(code_of([&] { load_region_sector_panel(nocol, kDefault); }) == Errc::MissingColumn);
}

TEST_CASE("schema mapping renames columns and sets the delimiter") {
    const std::vector<std::string> items{"region_id=fips", "wage_total=total_wages", "delimiter=tab"};
    const auto schema = parse_schema(items);
    CHECK(schema.delimiter == '\t');
    CHECK(schema.column_for("region_id") == "fips");
    CHECK(schema.column_for("year") == "year");
    std::istringstream in("fips\tsector_id\tyear\ttotal_wages\temployment\n01001\t311\t2000\t10\t2\n");
    const auto res = load_region_sector_panel(in, schema);
    CHECK(res.table.regions() == std::vector<std::string>{"01001"});

    const std::vector<std::string> bad{"colour=x"};
    CHECK(code_of([&] { parse_schema(bad); }) == Errc::InvalidArgument);

    const auto file = temp_file("schema.txt", "# comment\nregion_id = fips\ndelimiter=;\n");
    const auto loaded = load_schema_file(file);
    CHECK(loaded.delimiter == ';');
    CHECK(loaded.column_for("region_id") == "fips");
}

TEST_CASE("country panel derives capital share and validates labor share") {
    std::istringstream in("country_id,year,gdp_pc,population,labor_share\nA,2000,10,5,0.65\nB,2000,20,5,1.2\n");
    const auto res = load_country_panel(in, kDefault);
    REQUIRE(res.table.size() == 1);
    CHECK(res.table[0].capital_share == doctest::Approx(0.35).epsilon(1e-15));
    REQUIRE(res.diagnostics.size() == 1);
    CHECK(res.diagnostics[0].code == Errc::InvariantViolation);
    CHECK(res.diagnostics[0].row == 2);
}

TEST_CASE("inequality series and fitness tables load") {
    std::istringstream ineq("country_id,year,theil_value\nA,2000,0.3\nA,2000,0.4\n");
    const auto r = load_inequality_series(ineq, kDefault);
    CHECK(r.accepted == 1);
    CHECK(r.diagnostics[0].code == Errc::DuplicateKey);

    std::istringstream fit("country_id,year,fitness\nA,2000,1.5\nB,2000,0\n");
    const auto f = load_fitness_table(fit, kDefault);
    CHECK(f.accepted == 1);
    CHECK(f.table[0].fitness == 1.5);
}

TEST_CASE("id map loads and rejects double mappings") {
    const auto ok = load_id_map(temp_file("ids.csv", "from,to\nDEU,DE\nFRA,FR\n"));
    CHECK(ok.at("DEU") == "DE");
    const auto dup = temp_file("ids_dup.csv", "from,to\nDEU,DE\nDEU,XX\n");
    CHECK(code_of([&] { load_id_map(dup); }) == Errc::DuplicateKey);
}

TEST_CASE("pool_panel filters by year range") {
    std::vector<CountryYearRecord> recs;
    for (const char* c : {"A", "B"}) {
        for (int y : {2000, 2001, 2002}) recs.push_back({c, y, 1.0, 1.0, 0.5, 0.5});
    }
    CHECK(pool_panel(recs, parse_year_range("2000:2002")).size() == 6);
    CHECK(pool_panel(recs, parse_year_range("2001")).size() == 2);
    CHECK(code_of([&] { pool_panel(recs, YearRange{3000, 3001}); }) == Errc::EmptyResult);
    CHECK(code_of([&] { parse_year_range("2002:2000"); }) == Errc::InvalidArgument);
    CHECK(code_of([&] { parse_year_range("abc"); }) == Errc::InvalidArgument);
}

TEST_CASE("panel writer round-trips through the loader") {
    std::istringstream in("region_id,sector_id,year,wage_total,employment\n"
                          "r1,s1,1998,2.5,1\nr1,s2,1998,0,0\nr2,s1,1998,1,1\nr2,s2,1998,1e9,3\n");
    const auto panel = load_region_sector_panel(in, kDefault).table;
    const auto path = std::filesystem::temp_directory_path() / "kuznets_unit" / "roundtrip.csv";
    write_region_sector_panel(panel, path);
    const auto back = load_region_sector_panel(path, kDefault);
    CHECK(back.table == panel);
}
