#include <doctest.h>

#include <cmath>

#include "kuznets/error.hpp"
#include "kuznets/development.hpp"

using namespace kuznets;

namespace {

std::vector<CdiInput> joined(const std::vector<RankObservation>& ranks, const std::vector<MonetaryObservation>& m) {
    const auto rel = relative_monetary(m);
    return join_development(ranks, rel).records;
}

}  // namespace

TEST_CASE("relative monetary divides by the year mean") {
    const std::vector<MonetaryObservation> m{{"a", 2000, 1}, {"b", 2000, 3}, {"c", 2001, 5}};
    const auto rel = relative_monetary(m);
    REQUIRE(rel.size() == 3);
    CHECK(rel[0].monetary_rel == 0.5);
    CHECK(rel[1].monetary_rel == 1.5);
    CHECK(rel[2].monetary_rel == 1.0);
    const std::vector<MonetaryObservation> none;
    CHECK_THROWS_AS(relative_monetary(none), Error);
    const std::vector<MonetaryObservation> bad{{"a", 2000, -1}};
    CHECK_THROWS_AS(relative_monetary(bad), Error);
}

TEST_CASE("two-unit CDI example orders the richer, fitter unit first") {
    const auto recs = joined({{"a", 2000, 1}, {"b", 2000, 2}}, {{"a", 2000, 3}, {"b", 2000, 1}});
    const auto dev = cdi(recs, {});
    REQUIRE(dev.size() == 2);
    CHECK(dev[0].rank_term == doctest::Approx(1.0));
    CHECK(dev[1].rank_term == doctest::Approx(-1.0));
    CHECK(dev[0].cdi_standardized == doctest::Approx(1.0));
    CHECK(dev[1].cdi_standardized == doctest::Approx(-1.0));
    CHECK(dev[0].cdi_raw == doctest::Approx(0.5 + 0.5 * std::log(1.5)));
    CHECK(dev[0].cdi_raw > dev[1].cdi_raw);
}

TEST_CASE("beta endpoints reduce to one term") {
    const auto recs = joined({{"a", 2000, 1}, {"b", 2000, 2}, {"c", 2000, 3}},
                             {{"a", 2000, 2}, {"b", 2000, 8}, {"c", 2000, 1}});
    const auto zero = cdi(recs, {0.0, true, true});
    const auto one = cdi(recs, {1.0, true, true});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(zero[i].cdi_raw == doctest::Approx(std::log(zero[i].monetary_rel)));
        CHECK(one[i].cdi_raw == doctest::Approx(one[i].rank_term));
        CHECK(one[i].cdi_standardized == doctest::Approx(one[i].rank_term));
    }
    CHECK_THROWS_AS(cdi(recs, {1.5, true, true}), Error);
}

TEST_CASE("CDI ordering is stable across beta") {
    const auto recs = joined({{"a", 2000, 1}, {"b", 2000, 2}, {"c", 2000, 3}},
                             {{"a", 2000, 9}, {"b", 2000, 4}, {"c", 2000, 1}});
    for (double beta : {0.25, 0.5, 0.75}) {
        const auto dev = cdi(recs, {beta, true, true});
        CHECK(dev[0].cdi_standardized > dev[1].cdi_standardized);
        CHECK(dev[1].cdi_standardized > dev[2].cdi_standardized);
    }
}

TEST_CASE("raw rank term reverses ranks") {
    const auto recs = joined({{"a", 2000, 1}, {"b", 2000, 2}, {"c", 2000, 3}},
                             {{"a", 2000, 1}, {"b", 2000, 1}, {"c", 2000, 1}});
    const auto dev = cdi(recs, {0.5, true, false});
    CHECK(dev[0].rank_term == 3.0);
    CHECK(dev[2].rank_term == 1.0);
}

TEST_CASE("single unit in a year and incomplete records") {
    const auto recs = joined({{"a", 2000, 1}}, {{"a", 2000, 7}});
    const auto dev = cdi(recs, {});
    CHECK(dev[0].monetary_rel == 1.0);
    CHECK(dev[0].cdi_standardized == 0.0);

    std::vector<CdiInput> partial{{"a", 2000, std::nullopt, 1.0, 1.0}};
    CHECK_THROWS_WITH_AS(cdi(partial, {}), doctest::Contains("MissingInput"), Error);
}

TEST_CASE("join drops unmatched keys with reasons") {
    const std::vector<RankObservation> ranks{{"a", 2000, 1}, {"b", 2000, 2}};
    const std::vector<MonetaryObservation> m{{"a", 2000, 2}, {"c", 2000, 2}};
    const auto rel = relative_monetary(m);
    const auto j = join_development(ranks, rel);
    CHECK(j.records.size() == 1);
    CHECK(j.dropped.size() == 2);
    CHECK(j.records.size() + j.dropped.size() == j.joinable);
    for (const auto& d : j.dropped) CHECK_FALSE(d.reason.empty());
}

TEST_CASE("development table carries the parameters") {
    const auto dev = cdi(joined({{"a", 2000, 1}, {"b", 2000, 2}}, {{"a", 2000, 3}, {"b", 2000, 1}}), {});
    const auto text = development_table(dev, {}).str();
    CHECK(text.find("# beta=0.5") != std::string::npos);
    CHECK(text.find("log_base") != std::string::npos);
}
