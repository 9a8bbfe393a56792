#include <doctest.h>

#include <cmath>
#include <numeric>

#include "../support/generators.hpp"
#include "kuznets/error.hpp"
#include "kuznets/inequality.hpp"

using namespace kuznets;

namespace {

double theil_oracle(const std::vector<double>& y) {
    const double mu = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double t = 0;
    for (double v : y) {
        if (v > 0) t += (v / mu) * std::log(v / mu);
    }
    return t / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("Theil extremes") {
    const std::vector<double> equal(7, 3.25);
    CHECK(theil(equal) == 0.0);
    CHECK(theil_share_form(equal) == 0.0);
    const std::vector<double> owner{0, 0, 5, 0};
    CHECK(theil(owner) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(theil_share_form(owner) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("Theil of (1, 3)") {
    const std::vector<double> y{1, 3};
    const double oracle = 0.5 * (0.5 * std::log(0.5) + 1.5 * std::log(1.5));
    CHECK(theil(y) == doctest::Approx(oracle).epsilon(1e-15));
    CHECK(theil_share_form(y) == doctest::Approx(oracle).epsilon(1e-15));
    CHECK(theil(y) == doctest::Approx(0.130812).epsilon(1e-6));
}

TEST_CASE("Theil forms agree on random vectors") {
    auto rng = stream_engine(2, 0);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> y(1 + uniform_index(rng, 300));
        for (auto& v : y) v = std::exp(3 * standard_normal(rng));
        CHECK(theil(y) == doctest::Approx(theil_share_form(y)).epsilon(1e-12));
        CHECK(theil(y) == doctest::Approx(theil_oracle(y)).epsilon(1e-10));
    }
}

TEST_CASE("Theil input validation") {
    const std::vector<double> zeros{0, 0}, neg{1, -1}, empty;
    CHECK_THROWS_WITH_AS(theil(zeros), doctest::Contains("AllZeroIncomes"), Error);
    CHECK_THROWS_AS(theil(neg), Error);
    CHECK_THROWS_AS(theil(empty), Error);
}

TEST_CASE("decomposition special cases") {
    const auto same = decompose(GroupedDistribution::from_members({{2, 2}, {2, 2, 2}}));
    CHECK(same.between == 0.0);
    CHECK(*same.within == 0.0);

    const std::vector<double> one{1, 4, 9};
    const auto single = decompose(GroupedDistribution::from_members({one}));
    CHECK(single.between == doctest::Approx(0.0));
    CHECK(*single.within == doctest::Approx(theil(one)).epsilon(1e-14));

    const std::vector<double> flat{1, 1, 3, 3};
    const auto two = decompose(GroupedDistribution::from_members({{1, 1}, {3, 3}}));
    CHECK(two.between == doctest::Approx(theil(flat)).epsilon(1e-14));
    CHECK(*two.within == 0.0);
    CHECK(*two.total == doctest::Approx(theil(flat)).epsilon(1e-14));
}

TEST_CASE("decomposition identity on random groups") {
    auto rng = stream_engine(3, 0);
    for (int t = 0; t < 50; ++t) {
        std::vector<std::vector<double>> groups(1 + uniform_index(rng, 10));
        for (auto& g : groups) {
            g.resize(1 + uniform_index(rng, 50));
            const double scale = std::exp(standard_normal(rng));
            for (auto& v : g) v = scale * std::exp(standard_normal(rng));
        }
        const auto d = decompose(GroupedDistribution::from_members(groups));
        REQUIRE(d.identity_residual);
        CHECK(*d.identity_residual <= 1e-12);
    }
}

TEST_CASE("decomposition from totals only and inconsistent totals") {
    GroupedDistribution g;
    g.groups = {{2, 2.0, std::nullopt}, {2, 6.0, std::nullopt}};
    g.population = 4;
    g.total_income = 8.0;
    const auto d = decompose(g);
    const std::vector<double> flat{1, 1, 3, 3};
    CHECK(d.between == doctest::Approx(theil(flat)));
    CHECK_FALSE(d.within);

    g.total_income = 9.0;
    CHECK_THROWS_WITH_AS(decompose(g), doctest::Contains("InconsistentTotals"), Error);
}

TEST_CASE("between-sector Theil") {
    const std::vector<SectorWage> single{{12, 40000}};
    CHECK(between_sector_theil(single) == 0.0);
    const std::vector<SectorWage> two{{10, 1}, {10, 3}};
    const double oracle = 0.5 * 0.5 * std::log(0.5) + 0.5 * 1.5 * std::log(1.5);
    CHECK(between_sector_theil(two) == doctest::Approx(oracle).epsilon(1e-15));
    const std::vector<SectorWage> equal{{3, 7.5}, {11, 7.5}, {2, 7.5}};
    CHECK(between_sector_theil(equal) == 0.0);
    const std::vector<SectorWage> with_empty{{10, 1}, {0, 99}, {10, 3}};
    CHECK(between_sector_theil(with_empty) == doctest::Approx(oracle).epsilon(1e-15));
    const std::vector<SectorWage> none{{0, 4}};
    CHECK_THROWS_WITH_AS(between_sector_theil(none), doctest::Contains("NoSectors"), Error);
}

TEST_CASE("between-sector Theil equals the group decomposition's between term") {
    // Sector i: p_i workers each earning y_i.
    const std::vector<SectorWage> s{{3, 2.0}, {5, 7.0}, {2, 11.0}};
    std::vector<std::vector<double>> members;
    for (const auto& x : s) members.emplace_back(static_cast<std::size_t>(x.employment), x.average_wage);
    CHECK(between_sector_theil(s) == doctest::Approx(decompose(GroupedDistribution::from_members(members)).between));
}

TEST_CASE("Gini") {
    const std::vector<double> eq(5, 2.0), half{0, 1};
    CHECK(gini(eq) == 0.0);
    CHECK(gini(half) == doctest::Approx(0.5));
    auto rng = stream_engine(4, 0);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> y(2 + uniform_index(rng, 40));
        for (auto& v : y) v = uniform_unit(rng);
        double pairs = 0, mean = 0;
        for (double a : y) {
            mean += a;
            for (double b : y) pairs += std::abs(a - b);
        }
        const double n = static_cast<double>(y.size());
        mean /= n;
        CHECK(gini(y) == doctest::Approx(pairs / (2 * n * n * mean)).epsilon(1e-12));
    }
    const std::vector<double> values{1, 3}, weights{2, 2}, expanded{1, 1, 3, 3};
    CHECK(weighted_gini(values, weights) == doctest::Approx(gini(expanded)));
}

TEST_CASE("capital share complements labour share") {
    const std::vector<CountryYearRecord> recs{{"A", 2000, 1, 1, 0.65, 0.35}, {"B", 2000, 1, 1, 1.0, 0.0}};
    const auto rows = capital_share_series(recs);
    CHECK(rows[0].capital_share == doctest::Approx(0.35));
    CHECK(rows[1].capital_share == 0.0);
}

TEST_CASE("Theil is scale invariant") {
    auto rng = stream_engine(6, 0);
    std::vector<double> y(100), z(100);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = std::exp(standard_normal(rng));
        z[i] = 7.3 * y[i];
    }
    CHECK(theil(z) == doctest::Approx(theil(y)).epsilon(1e-12));
}
