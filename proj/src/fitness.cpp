#include "kuznets/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kuznets/error.hpp"

namespace kuznets {

Ranking rank(std::span<const double> values, std::span<const std::string> ids) {
    if (values.size() != ids.size()) throw Error(Errc::InvalidArgument, "values and ids differ in length");
    Ranking out;
    out.order.resize(values.size());
    std::iota(out.order.begin(), out.order.end(), std::size_t{0});
    std::sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return ids[a] < ids[b];
    });
    out.rank.resize(values.size());
    for (std::size_t k = 0; k < out.order.size(); ++k) out.rank[out.order[k]] = k + 1;
    return out;
}

FitnessState initialize(const BinaryMatrix& m) {
    if (m.rows() == 0 || m.cols() == 0) throw Error(Errc::DegenerateMatrix, "empty binary matrix");
    return FitnessState{std::vector<double>(m.rows(), 1.0), std::vector<double>(m.cols(), 1.0), 0};
}

namespace {

constexpr long double kReciprocalLimit = 1e300L;

long double log_sum_exp(std::span<const long double> terms) {
    const long double peak = *std::max_element(terms.begin(), terms.end());
    long double acc = 0.0L;
    for (auto t : terms) acc += std::exp(t - peak);
    return peak + std::log(acc);
}

/// Divides by the mean; values are given as logs when `logs` is set.
std::vector<double> normalize(std::span<const long double> raw, bool logs, const BinaryMatrix& m, bool sectors) {
    const auto n = static_cast<long double>(raw.size());
    std::vector<double> out(raw.size());
    if (logs) {
        const long double log_mean = log_sum_exp(raw) - std::log(n);
        for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<double>(std::exp(raw[i] - log_mean));
    } else {
        long double sum = 0.0L;
        for (auto v : raw) sum += v;
        const long double mean = sum / n;
        for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<double>(raw[i] / mean);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0) || !std::isfinite(out[i]) || out[i] < std::numeric_limits<double>::min()) {
            const auto& id = sectors ? m.sectors()[i] : m.regions()[i];
            throw Error(Errc::NumericUnderflow,
                        std::string(sectors ? "complexity of sector " : "fitness of region ") + id +
                            " is no longer representable");
        }
    }
    return out;
}

bool same_shape(const BinaryMatrix& m, const FitnessState& s) {
    return s.f.size() == m.rows() && s.q.size() == m.cols();
}

}  // namespace

FitnessState step(const BinaryMatrix& m, const FitnessState& s) {
    if (!same_shape(m, s)) throw Error(Errc::InvalidArgument, "state does not match matrix shape");

    std::vector<long double> f_raw(m.rows(), 0.0L);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        long double acc = 0.0L;
        for (auto sec : m.row(r)) acc += s.q[sec];
        f_raw[r] = acc;
    }

    const double f_min = *std::min_element(s.f.begin(), s.f.end());
    const bool use_logs = 1.0L / static_cast<long double>(f_min) > kReciprocalLimit;

    std::vector<long double> q_raw(m.cols(), 0.0L);
    if (use_logs) {
        std::vector<long double> terms;
        for (std::size_t sec = 0; sec < m.cols(); ++sec) {
            terms.clear();
            for (auto r : m.column(sec)) terms.push_back(-std::log(static_cast<long double>(s.f[r])));
            q_raw[sec] = -log_sum_exp(terms);  // log Q~
        }
    } else {
        for (std::size_t sec = 0; sec < m.cols(); ++sec) {
            long double denom = 0.0L;
            for (auto r : m.column(sec)) denom += 1.0L / s.f[r];
            q_raw[sec] = 1.0L / denom;
        }
    }

    FitnessState next;
    next.f = normalize(f_raw, false, m, false);
    next.q = normalize(q_raw, use_logs, m, true);
    next.iteration = s.iteration + 1;
    return next;
}

namespace {

double max_relative_change(const FitnessState& a, const FitnessState& b) {
    double worst = 0.0;
    auto scan = [&](const std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y[i] - x[i]) / x[i]);
    };
    scan(a.f, b.f);
    scan(a.q, b.q);
    return worst;
}

}  // namespace

FitnessResult solve(const BinaryMatrix& m, const SolverConfig& config) { return solve(m, config, initialize(m)); }

FitnessResult solve(const BinaryMatrix& m, const SolverConfig& config, FitnessState start) {
    if (!same_shape(m, start)) throw Error(Errc::InvalidArgument, "start state does not match matrix shape");
    if (config.max_iterations < 1 || config.rank_patience < 1 || !(config.value_tol >= 0.0)) {
        throw Error(Errc::InvalidArgument, "invalid solver configuration");
    }
    for (auto* v : {&start.f, &start.q}) {
        if (std::any_of(v->begin(), v->end(), [](double x) { return !(x > 0.0) || !std::isfinite(x); })) {
            throw Error(Errc::InvalidArgument, "start state must be finite and positive");
        }
        const long double mean = std::accumulate(v->begin(), v->end(), 0.0L) / static_cast<long double>(v->size());
        for (double& x : *v) x = static_cast<double>(x / mean);
    }
    start.iteration = 0;

    FitnessResult result;
    FitnessState state = std::move(start);
    Ranking regions = rank(state.f, m.regions());
    Ranking sectors = rank(state.q, m.sectors());
    int stable = 0;

    for (int it = 1; it <= config.max_iterations; ++it) {
        FitnessState next = step(m, state);
        const double residual = max_relative_change(state, next);
        Ranking next_regions = rank(next.f, m.regions());
        Ranking next_sectors = rank(next.q, m.sectors());
        stable = (next_regions == regions && next_sectors == sectors) ? stable + 1 : 0;
        state = std::move(next);
        regions = std::move(next_regions);
        sectors = std::move(next_sectors);
        result.log.push_back({it, residual, stable});
        result.iterations_used = it;
        result.value_residual = residual;
        if (residual < config.value_tol) {
            result.converged_values = true;
            result.converged_ranks = true;
            break;
        }
        if (stable >= config.rank_patience) {
            result.converged_ranks = true;
            break;
        }
    }
    if (!result.converged_ranks) {
        throw Error(Errc::NoConvergence, "neither values nor rankings settled within " +
                                             std::to_string(config.max_iterations) + " iterations (year " +
                                             std::to_string(m.year()) + ")");
    }
    result.final_state = std::move(state);
    result.region_ranking = std::move(regions);
    result.sector_ranking = std::move(sectors);
    return result;
}

std::vector<std::string> ranked_regions(const BinaryMatrix& m, const FitnessResult& result) {
    std::vector<std::string> out;
    for (auto i : result.region_ranking.order) out.push_back(m.regions()[i]);
    return out;
}

std::vector<std::string> ranked_sectors(const BinaryMatrix& m, const FitnessResult& result) {
    std::vector<std::string> out;
    for (auto i : result.sector_ranking.order) out.push_back(m.sectors()[i]);
    return out;
}

namespace {

TableWriter value_rank_table(const std::vector<std::string>& ids, const std::vector<double>& values,
                             const Ranking& ranking, const char* value_col, const char* rank_col,
                             const FitnessResult& result, int year) {
    TableWriter out({"id", value_col, rank_col});
    out.meta("year", std::to_string(year));
    out.meta("iterations", std::to_string(result.iterations_used));
    out.meta("converged_values", result.converged_values ? "true" : "false");
    out.meta("converged_ranks", result.converged_ranks ? "true" : "false");
    out.meta("value_residual", format_number(result.value_residual));
    for (auto i : ranking.order) {
        out.row({ids[i], format_number(values[i]), std::to_string(ranking.rank[i])});
    }
    return out;
}

}  // namespace

TableWriter fitness_table(const BinaryMatrix& m, const FitnessResult& result) {
    return value_rank_table(m.regions(), result.final_state.f, result.region_ranking, "fitness_value",
                            "fitness_rank", result, m.year());
}

TableWriter complexity_table(const BinaryMatrix& m, const FitnessResult& result) {
    return value_rank_table(m.sectors(), result.final_state.q, result.sector_ranking, "complexity_value",
                            "complexity_rank", result, m.year());
}

TableWriter convergence_table(const FitnessResult& result) {
    TableWriter out({"iteration", "residual", "ranks_stable"});
    for (const auto& e : result.log) {
        out.row({std::to_string(e.iteration), format_number(e.residual), std::to_string(e.ranks_stable)});
    }
    return out;
}

}  // namespace kuznets
