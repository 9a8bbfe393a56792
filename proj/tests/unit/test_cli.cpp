#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include "../../tools/cli.hpp"
#include "kuznets/error.hpp"
#include "kuznets/ingest.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = kuznets::cli::dispatch(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "kuznets_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_panel(const fs::path& dir) {
    const auto p = dir / "p.csv";
    std::ofstream(p) << "region_id,sector_id,year,wage_total,employment\n"
                        "a,x,1998,100,2\na,y,1998,10,1\na,z,1998,5,1\n"
                        "b,x,1998,20,1\nb,y,1998,200,4\nb,z,1998,5,1\n"
                        "c,x,1998,10,1\nc,y,1998,10,1\nc,z,1998,90,3\n";
    return p;
}

/// "--name TYPE [default]" pairs from help text.
std::map<std::string, std::string> help_defaults(const std::string& help) {
    std::map<std::string, std::string> out;
    const std::regex re(R"(--([a-z-]+) [A-Z]+(?: \.\.\.)? \[([^\]]*)\])");
    for (auto it = std::sregex_iterator(help.begin(), help.end(), re); it != std::sregex_iterator(); ++it) {
        out[(*it)[1]] = (*it)[2];
    }
    return out;
}

std::map<std::string, std::string> echoed(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) != 0) continue;
        const auto eq = line.find(" = ");
        out[line.substr(2, eq - 2)] = line.substr(eq + 3);
    }
    return out;
}

}  // namespace

TEST_CASE("fitness subcommand writes its table") {
    const auto dir = scratch("fitness");
    const auto panel = write_panel(dir);
    const auto r = run({"fitness", "--panel", panel.string(), "--year", "1998", "--threshold", "1.0", "--out",
                        (dir / "d").string() + "/"});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "d" / "fitness" / "1998.csv"));
    CHECK(r.out.find("wrote ") != std::string::npos);
    CHECK(r.out.find("# threshold = 1") != std::string::npos);
}

TEST_CASE("binarize on an all-below-threshold slice exits 2") {
    const auto dir = scratch("binarize");
    const auto r = run({"binarize", "--panel", write_panel(dir).string(), "--year", "1998", "--threshold", "1000",
                        "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("DegenerateMatrix") != std::string::npos);
}

TEST_CASE("malformed flags exit 1 with usage") {
    const auto r = run({"fitness", "--panel", "p.csv", "--year", "1998", "--bogus"});
    CHECK(r.code == 1);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(run({"fitness", "--year", "abc"}).code == 1);
    CHECK(run({"nonsense"}).code == 1);
    CHECK(run({}).code == 1);
    CHECK(run({"fitness", "--panel", "missing.csv", "--year", "1998"}).code == 1);
    CHECK(run({"theil", "--panel", "p.csv", "--years", "2000:1990"}).code == 1);
}

TEST_CASE("help defaults match the values the run uses") {
    unsetenv("KUZNETS_OUT");
    const std::map<std::string, std::vector<std::string>> required{
        {"ingest-check", {}},
        {"rca", {"--year", "2000"}},
        {"binarize", {"--year", "2000"}},
        {"fitness", {"--year", "2000"}},
        {"theil", {}},
        {"cdi", {}},
        {"curve", {"--x", "fitness", "--y", "theil"}},
        {"colormap", {"--x", "fitness,avg_wage_rel", "--y", "theil"}},
        {"windows", {"--x", "cdi", "--y", "utip", "--windows", "2000:2001"}},
        {"run-all", {}},
    };
    for (const auto& [cmd, extra] : required) {
        CAPTURE(cmd);
        const auto help = run({cmd, "--help"});
        CHECK(help.code == 0);
        const auto defaults = help_defaults(help.out);
        std::vector<std::string> args{cmd};
        args.insert(args.end(), extra.begin(), extra.end());
        const auto echo = echoed(run(args).out);
        for (const auto& [name, value] : defaults) {
            CAPTURE(name);
            REQUIRE(echo.count(name) == 1);
            CHECK(echo.at(name) == value);
        }
        if (cmd == "curve" || cmd == "run-all") {
            CHECK(defaults.at("seed") == "20170501");
            CHECK(defaults.at("reps") == "1000");
            CHECK(defaults.at("level") == "0.9");
            CHECK(defaults.at("beta") == "0.5");
        }
    }
}

TEST_CASE("output directory comes from the environment when not given") {
    const auto dir = scratch("env");
    const auto panel = write_panel(dir);
    setenv("KUZNETS_OUT", (dir / "envout").c_str(), 1);
    const auto r = run({"binarize", "--panel", panel.string(), "--year", "1998"});
    unsetenv("KUZNETS_OUT");
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "envout" / "matrices" / "1998.csv"));
}

TEST_CASE("spec file settings with flag overrides") {
    const auto dir = scratch("spec");
    const auto panel = write_panel(dir);
    const auto spec = dir / "s.toml";
    std::ofstream(spec) << "[inputs]\npanel = \"" << panel.generic_string() << "\"\n[kernel]\nreps = 5\ngrid = 9\n"
                        << "seed = 3\n[run]\nout = \"" << (dir / "o").generic_string() << "\"\n";
    const auto r = run({"run-all", "--spec", spec.string(), "--seed", "4"});
    CHECK(r.code == 0);
    const auto echo = echoed(r.out);
    CHECK(echo.at("reps") == "5");
    CHECK(echo.at("seed") == "4");
    CHECK(echo.at("grid") == "9");
    std::ifstream report(dir / "o" / "report.json");
    std::stringstream text;
    text << report.rdbuf();
    CHECK(text.str().find("\"seed\": 4") != std::string::npos);

    std::ofstream(dir / "bad.toml") << "colour = red\n";
    const auto bad = run({"run-all", "--spec", (dir / "bad.toml").string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("unknown key") != std::string::npos);
}

TEST_CASE("ingest-check reports rejected rows") {
    const auto dir = scratch("ingest");
    const auto p = dir / "bad.csv";
    std::ofstream(p) << "region_id,sector_id,year,wage_total,employment\nr1,s1,1998,2,1\nr1,s2,1998,-5,1\n";
    const auto r = run({"ingest-check", "--panel", p.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("rejected=1") != std::string::npos);
    CHECK(r.err.find("row 2") != std::string::npos);
    CHECK(run({"ingest-check", "--panel", write_panel(dir).string()}).code == 0);
}

TEST_CASE("rca, theil, cdi and curve subcommands") {
    const auto dir = scratch("subs");
    const auto panel = write_panel(dir).string();
    const auto out = (dir / "o").string();
    CHECK(run({"rca", "--panel", panel, "--year", "1998", "--out", out}).code == 0);
    CHECK(fs::exists(dir / "o" / "rca" / "1998.csv"));
    CHECK(run({"theil", "--panel", panel, "--out", out}).code == 0);
    CHECK(fs::exists(dir / "o" / "theil" / "1998.csv"));
    CHECK(run({"cdi", "--panel", panel, "--out", out}).code == 0);
    CHECK(fs::exists(dir / "o" / "cdi.csv"));
    const auto curve = run({"curve", "--panel", panel, "--x", "avg_wage_rel", "--y", "theil", "--reps", "10",
                            "--grid", "11", "--out", out});
    CHECK(curve.code == 0);
    CHECK(fs::exists(dir / "o" / "curves" / "theil_vs_avg_wage_rel.csv"));
    CHECK(run({"curve", "--panel", panel, "--x", "wealth", "--y", "theil", "--out", out}).code == 1);
}
