#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "../support/generators.hpp"
#include "kuznets/error.hpp"
#include "kuznets/smoothing.hpp"

using namespace kuznets;

namespace {

KernelConfig cfg1(std::size_t points = 101, std::size_t reps = 0) {
    KernelConfig c;
    c.grid[0].points = points;
    c.bootstrap_reps = reps;
    return c;
}

}  // namespace

TEST_CASE("Silverman bandwidth") {
    std::vector<Observation> d;
    for (int i = 0; i < 10; ++i) d.push_back({{static_cast<double>(i), 2.0 * i}, 0.0});
    const double sd = std::sqrt(55.0 / 6.0);  // sample sd of 0..9
    const auto h1 = silverman_bandwidth(d, 1);
    CHECK(h1[0] == doctest::Approx(1.06 * sd * std::pow(10.0, -0.2)));
    const auto h2 = silverman_bandwidth(d, 2);
    CHECK(h2[1] == doctest::Approx(1.06 * 2 * sd * std::pow(10.0, -1.0 / 6.0)));
    std::vector<Observation> flat(5, Observation{{1.0, 1.0}, 2.0});
    CHECK_THROWS_WITH_AS(silverman_bandwidth(flat, 1), doctest::Contains("DegenerateBandwidth"), Error);
}

TEST_CASE("constant response is reproduced exactly with zero-width bands") {
    auto rng = stream_engine(1, 0);
    auto d = gen::sample_1d(300, [](double) { return 0.1; }, 0.0, rng);
    const auto est = bootstrap_bands(d, cfg1(51, 200));
    for (std::size_t p = 0; p < est.size(); ++p) {
        if (!est.supported[p]) continue;
        CHECK(est.estimate[p] == 0.1);
        CHECK(est.lower[p] == 0.1);
        CHECK(est.upper[p] == 0.1);
    }
}

TEST_CASE("linear data are recovered in the interior") {
    auto rng = stream_engine(2, 0);
    const auto d = gen::sample_1d(2000, [](double x) { return x; }, 0.0, rng);
    auto c = cfg1();
    c.bandwidth[0] = 0.02;
    const auto est = kernel_regress(d, c);
    double worst = 0;
    for (std::size_t p = 0; p < est.size(); ++p) {
        const double x = est.axes[0][p];
        if (x >= 0.1 && x <= 0.9) worst = std::max(worst, std::abs(est.estimate[p] - x));
    }
    CHECK(worst <= 0.05);
}

TEST_CASE("inverted U peak is located") {
    auto rng = stream_engine(3, 0);
    const auto d = gen::sample_1d(2000, [](double x) { return -(x - 0.5) * (x - 0.5); }, 0.01, rng);
    const auto est = kernel_regress(d, cfg1(201));
    std::size_t best = 0;
    for (std::size_t p = 0; p < est.size(); ++p) {
        if (est.supported[p] && est.estimate[p] > est.estimate[best]) best = p;
    }
    CHECK(std::abs(est.axes[0][best] - 0.5) <= 0.05);
}

TEST_CASE("bands are deterministic, ordered and cover the estimate") {
    auto rng = stream_engine(4, 0);
    const auto d = gen::sample_1d(200, [](double x) { return 2 * x; }, 0.3, rng);
    const auto a = bootstrap_bands(d, cfg1(41, 300));
    const auto b = bootstrap_bands(d, cfg1(41, 300));
    CHECK(curve_table(a).str() == curve_table(b).str());
    for (std::size_t p = 0; p < a.size(); ++p) {
        if (!a.supported[p]) continue;
        CHECK(a.lower[p] <= a.estimate[p]);
        CHECK(a.estimate[p] <= a.upper[p]);
        CHECK(a.upper[p] - a.lower[p] > 0.0);
    }
    auto other = cfg1(41, 300);
    other.seed = 77;
    CHECK(curve_table(bootstrap_bands(d, other)).str() != curve_table(a).str());
}

TEST_CASE("plane recovered by the colour map") {
    auto rng = stream_engine(5, 0);
    const auto d = gen::sample_2d(4000, [](double a, double b) { return a + b; }, 0.0, rng);
    KernelConfig c;
    c.dims = 2;
    c.grid[0].points = c.grid[1].points = 21;
    c.bandwidth[0] = c.bandwidth[1] = 0.03;
    const auto est = colormap_grid(d, c);
    double worst = 0;
    for (std::size_t i = 0; i < 21; ++i) {
        for (std::size_t j = 0; j < 21; ++j) {
            const double x1 = est.axes[0][i], x2 = est.axes[1][j];
            if (x1 < 0.1 || x1 > 0.9 || x2 < 0.1 || x2 > 0.9) continue;
            worst = std::max(worst, std::abs(est.estimate[i * 21 + j] - (x1 + x2)));
        }
    }
    CHECK(worst <= 0.05);
}

TEST_CASE("diagonal ridge shows up along x1 + x2 = 1") {
    auto rng = stream_engine(6, 0);
    const auto d = gen::sample_2d(3000, [](double a, double b) { return std::exp(-std::pow((a + b - 1) / 0.15, 2)); },
                                  0.05, rng);
    KernelConfig c;
    c.dims = 2;
    c.grid[0].points = c.grid[1].points = 21;
    const auto est = colormap_grid(d, c);
    // On each interior row the maximum sits near the anti-diagonal.
    for (std::size_t i = 4; i <= 16; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 0; j < 21; ++j) {
            if (est.estimate[i * 21 + j] > est.estimate[i * 21 + best]) best = j;
        }
        CHECK(std::abs(est.axes[0][i] + est.axes[1][best] - 1.0) <= 0.15);
    }
}

TEST_CASE("single-point data leave one supported cell") {
    std::vector<Observation> d(10, Observation{{0.5, 0.5}, 3.0});
    auto c = cfg1(11);
    c.bandwidth[0] = 0.02;
    c.grid[0].lo = 0.0;
    c.grid[0].hi = 1.0;
    const auto est = kernel_regress(d, c);
    CHECK(std::count(est.supported.begin(), est.supported.end(), 1) == 1);
    CHECK(est.supported[5] == 1);
    CHECK(est.estimate[5] == 3.0);
    CHECK(std::isnan(est.estimate[0]));

    KernelConfig c2;
    c2.dims = 2;
    c2.bandwidth[0] = c2.bandwidth[1] = 0.02;
    for (auto& g : c2.grid) {
        g.points = 11;
        g.lo = 0.0;
        g.hi = 1.0;
    }
    const auto grid = colormap_grid(d, c2);
    CHECK(std::count(grid.supported.begin(), grid.supported.end(), 1) == 1);
}

TEST_CASE("validation and tables") {
    std::vector<Observation> one(1);
    CHECK_THROWS_WITH_AS(kernel_regress(one, cfg1()), doctest::Contains("TooFewObservations"), Error);
    auto rng = stream_engine(7, 0);
    const auto d = gen::sample_1d(50, [](double x) { return x; }, 0.1, rng);
    auto bad = cfg1();
    bad.band_level = 1.0;
    CHECK_THROWS_AS(kernel_regress(d, bad), Error);
    CHECK_THROWS_AS(colormap_grid(d, cfg1()), Error);
    const auto est = kernel_regress(d, cfg1(5));
    const auto text = curve_table(est).str();
    CHECK(text.find("# bandwidth=") != std::string::npos);
    CHECK(text.find("x,estimate,lower,upper,supported") != std::string::npos);
    CHECK_THROWS_AS(grid_table(est), Error);
}

TEST_CASE("bandwidth override is echoed") {
    auto rng = stream_engine(8, 0);
    const auto d = gen::sample_1d(50, [](double x) { return x; }, 0.1, rng);
    auto c = cfg1(5);
    c.bandwidth[0] = 0.125;
    const auto est = kernel_regress(d, c);
    CHECK(est.bandwidth[0] == 0.125);
    CHECK(curve_table(est).str().find("# bandwidth=0.125") != std::string::npos);
}
