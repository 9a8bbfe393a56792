#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "../support/generators.hpp"
#include "kuznets/error.hpp"
#include "kuznets/fitness.hpp"

using namespace kuznets;

namespace {

BinaryMatrix dense(const gen::Dense& d) {
    return BinaryMatrix::from_dense(gen::ids("r", d.size()), gen::ids("s", d[0].size()), d);
}

// Plain long-double iteration of the same map, used as an oracle.
std::vector<long double> brute_fitness(const gen::Dense& d, int iterations) {
    const std::size_t R = d.size(), S = d[0].size();
    std::vector<long double> f(R, 1.0L), q(S, 1.0L);
    for (int n = 0; n < iterations; ++n) {
        std::vector<long double> nf(R, 0.0L), nq(S, 0.0L);
        for (std::size_t r = 0; r < R; ++r) {
            for (std::size_t s = 0; s < S; ++s) {
                if (d[r][s]) {
                    nf[r] += q[s];
                    nq[s] += 1.0L / f[r];
                }
            }
        }
        for (auto& v : nq) v = 1.0L / v;
        const long double mf = std::accumulate(nf.begin(), nf.end(), 0.0L) / R;
        const long double mq = std::accumulate(nq.begin(), nq.end(), 0.0L) / S;
        for (std::size_t r = 0; r < R; ++r) f[r] = nf[r] / mf;
        for (std::size_t s = 0; s < S; ++s) q[s] = nq[s] / mq;
    }
    return f;
}

}  // namespace

TEST_CASE("initialize gives the uniform mean-1 state") {
    const auto s = initialize(dense({{1, 0}, {1, 1}, {0, 1}}));
    CHECK(s.f == std::vector<double>{1, 1, 1});
    CHECK(s.q == std::vector<double>{1, 1});
    const auto one = solve(dense({{1}}));
    CHECK(one.final_state.f[0] == 1.0);
    CHECK(one.final_state.q[0] == 1.0);
}

TEST_CASE("all-ones matrix is a fixed point") {
    const auto m = dense({{1, 1}, {1, 1}});
    const auto s = step(m, initialize(m));
    CHECK(s.f == std::vector<double>{1, 1});
    CHECK(s.q == std::vector<double>{1, 1});
}

TEST_CASE("one step on [[1,1],[0,1]] matches hand iteration") {
    // F~ = (Q1+Q2, Q2) = (2, 1) -> mean 3/2; Q~ = (1/(1/F1), 1/(1/F1+1/F2)) = (1, 1/2) -> mean 3/4.
    const auto m = dense({{1, 1}, {0, 1}});
    const auto s = step(m, initialize(m));
    CHECK(s.f[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(s.f[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(s.q[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(s.q[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("step agrees with the brute-force oracle") {
    auto rng = stream_engine(21, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = gen::random_dense(12, 9, 0.5, rng);
        bool ok = true;
        for (const auto& row : d) ok = ok && std::accumulate(row.begin(), row.end(), 0) > 0;
        for (std::size_t c = 0; c < 9 && ok; ++c) {
            int sum = 0;
            for (const auto& row : d) sum += row[c];
            ok = sum > 0;
        }
        if (!ok) continue;
        const auto m = dense(d);
        auto s = initialize(m);
        for (int n = 0; n < 6; ++n) s = step(m, s);
        const auto oracle = brute_fitness(d, 6);
        for (std::size_t r = 0; r < 12; ++r) CHECK(s.f[r] == doctest::Approx(static_cast<double>(oracle[r])).epsilon(1e-12));
    }
}

TEST_CASE("ranking order and tie rule") {
    const std::vector<double> v{3.0, 1.0, 2.0};
    const std::vector<std::string> ids{"a", "b", "c"};
    const auto r = rank(v, ids);
    CHECK(r.rank == std::vector<std::size_t>{1, 3, 2});
    CHECK(r.order == std::vector<std::size_t>{0, 2, 1});
    const std::vector<double> eq{1.0, 1.0, 1.0};
    const std::vector<std::string> shuffled{"c", "a", "b"};
    CHECK(rank(eq, shuffled).order == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("solve on the all-ones matrix converges at iteration 1") {
    const auto res = solve(dense({{1, 1, 1}, {1, 1, 1}}));
    CHECK(res.converged_values);
    CHECK(res.iterations_used == 1);
    for (double f : res.final_state.f) CHECK(f == 1.0);
}

TEST_CASE("staircase ranks follow diversification") {
    auto rng = stream_engine(4, 0);
    const auto st = gen::staircase(40, 25, rng);
    const auto names = gen::random_ids(40, rng);
    const auto m = BinaryMatrix::from_dense(names, gen::random_ids(25, rng), st.dense);
    const auto res = solve(m);
    std::vector<std::size_t> expect(40);
    std::iota(expect.begin(), expect.end(), 0);
    std::sort(expect.begin(), expect.end(), [&](std::size_t a, std::size_t b) {
        if (m.row_degree(a) != m.row_degree(b)) return m.row_degree(a) > m.row_degree(b);
        return m.regions()[a] < m.regions()[b];
    });
    CHECK(res.region_ranking.order == expect);
}

TEST_CASE("non-nested matrices end by rank stability and iteration cap raises NoConvergence") {
    const auto m = dense({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}});
    const auto res = solve(m);
    CHECK((res.converged_values || res.converged_ranks));
    CHECK(res.log.size() == static_cast<std::size_t>(res.iterations_used));

    auto rng = stream_engine(8, 0);
    const auto nested = gen::pruned(gen::nested_with_noise(30, 20, 0.05, rng), gen::ids("r", 30), gen::ids("s", 20));
    SolverConfig tight;
    tight.max_iterations = 2;
    tight.rank_patience = 50;
    CHECK_THROWS_WITH_AS(solve(nested, tight), doctest::Contains("NoConvergence"), Error);
}

TEST_CASE("solve from a supplied start reaches the same ranking") {
    auto rng = stream_engine(9, 0);
    const auto m = gen::pruned(gen::random_dense(25, 15, 0.5, rng), gen::ids("r", 25), gen::ids("s", 15));
    const auto base = solve(m);
    FitnessState start{std::vector<double>(m.rows()), std::vector<double>(m.cols()), 0};
    for (auto& v : start.f) v = 0.1 + 10 * uniform_unit(rng);
    for (auto& v : start.q) v = 0.1 + 10 * uniform_unit(rng);
    const auto other = solve(m, {}, start);
    CHECK(other.region_ranking == base.region_ranking);
    CHECK(other.sector_ranking == base.sector_ranking);
    FitnessState bad{std::vector<double>(m.rows(), -1.0), std::vector<double>(m.cols(), 1.0), 0};
    CHECK_THROWS_AS(solve(m, {}, bad), Error);
}

TEST_CASE("long nested runs stay finite") {
    // Strong nestedness drives the least fit region towards 0; the map must
    // keep every value representable or raise NumericUnderflow.
    auto rng = stream_engine(12, 0);
    const auto st = gen::staircase(120, 80, rng);
    const auto m = BinaryMatrix::from_dense(gen::ids("r", 120), gen::ids("s", 80), st.dense);
    auto s = initialize(m);
    try {
        for (int n = 0; n < 3000; ++n) s = step(m, s);
        for (double f : s.f) CHECK(std::isfinite(f));
        for (double q : s.q) CHECK(std::isfinite(q));
    } catch (const Error& e) {
        CHECK(e.code() == Errc::NumericUnderflow);
    }
}

TEST_CASE("fitness tables list every region and sector") {
    const auto m = dense({{1, 1}, {0, 1}});
    const auto res = solve(m);
    CHECK(fitness_table(m, res).size() == 2);
    CHECK(complexity_table(m, res).size() == 2);
    CHECK(convergence_table(res).size() == res.log.size());
    CHECK(ranked_regions(m, res).front() == "r0");
}
