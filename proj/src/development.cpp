#include "kuznets/development.hpp"

#include <cmath>
#include <map>

#include "kuznets/error.hpp"

namespace kuznets {

std::vector<RelativeMonetary> relative_monetary(std::span<const MonetaryObservation> series) {
    if (series.empty()) throw Error(Errc::EmptyYear, "monetary series is empty");
    std::map<int, std::pair<long double, std::size_t>> per_year;
    for (const auto& obs : series) {
        if (!(obs.monetary > 0.0) || !std::isfinite(obs.monetary)) {
            throw Error(Errc::InvariantViolation, "monetary value of " + obs.unit_id + " in " +
                                                      std::to_string(obs.year) + " must be positive");
        }
        auto& [sum, count] = per_year[obs.year];
        sum += obs.monetary;
        ++count;
    }
    std::vector<RelativeMonetary> out;
    out.reserve(series.size());
    for (const auto& obs : series) {
        const auto& [sum, count] = per_year.at(obs.year);
        const long double mean = sum / static_cast<long double>(count);
        out.push_back({obs.unit_id, obs.year, obs.monetary, static_cast<double>(obs.monetary / mean)});
    }
    return out;
}

DevelopmentJoin join_development(std::span<const RankObservation> ranks, std::span<const RelativeMonetary> monetary) {
    using Key = std::pair<int, std::string>;
    std::map<Key, const RankObservation*> by_rank;
    std::map<Key, const RelativeMonetary*> by_money;
    for (const auto& r : ranks) by_rank.emplace(Key{r.year, r.unit_id}, &r);
    for (const auto& m : monetary) by_money.emplace(Key{m.year, m.unit_id}, &m);

    DevelopmentJoin out;
    std::map<Key, int> keys;
    for (const auto& [k, _] : by_rank) keys[k] |= 1;
    for (const auto& [k, _] : by_money) keys[k] |= 2;
    out.joinable = keys.size();
    for (const auto& [k, sides] : keys) {
        if (sides == 3) {
            const auto* r = by_rank.at(k);
            const auto* m = by_money.at(k);
            out.records.push_back({k.second, k.first, r->fitness_rank, m->monetary, m->monetary_rel});
        } else {
            out.dropped.push_back({k.second, k.first, sides == 1 ? "no monetary value" : "no fitness rank"});
        }
    }
    return out;
}

namespace {

/// Population z-scores; a constant column maps to zeros.
std::vector<double> zscores(const std::vector<long double>& x) {
    const long double n = static_cast<long double>(x.size());
    long double mean = 0.0L;
    for (auto v : x) mean += v;
    mean /= n;
    long double var = 0.0L;
    for (auto v : x) var += (v - mean) * (v - mean);
    var /= n;
    std::vector<double> out(x.size(), 0.0);
    if (!(var > 0.0L)) return out;
    const long double sd = std::sqrt(var);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<double>((x[i] - mean) / sd);
    return out;
}

}  // namespace

std::vector<DevelopmentRecord> cdi(std::span<const CdiInput> records, const CDIParams& params) {
    if (!(params.beta >= 0.0 && params.beta <= 1.0)) throw Error(Errc::InvalidArgument, "beta must lie in [0, 1]");
    std::map<int, std::vector<std::size_t>> by_year;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!r.fitness_rank || !r.monetary_rel || !r.monetary || *r.fitness_rank == 0 || !(*r.monetary_rel > 0.0)) {
            throw Error(Errc::MissingInput, "(" + r.unit_id + ", " + std::to_string(r.year) + ")");
        }
        by_year[r.year].push_back(i);
    }
    std::vector<DevelopmentRecord> out(records.size());
    for (const auto& [year, idx] : by_year) {
        std::vector<long double> oriented, logs;
        for (auto i : idx) {
            // Rank 1 must map to the largest value.
            oriented.push_back(-static_cast<long double>(*records[i].fitness_rank));
            logs.push_back(std::log(static_cast<long double>(*records[i].monetary_rel)));
        }
        std::vector<double> rank_term;
        if (params.standardize_rank) {
            rank_term = zscores(oriented);
        } else {
            for (auto v : oriented) rank_term.push_back(static_cast<double>(v + static_cast<long double>(idx.size()) + 1));
        }
        const auto log_z = zscores(logs);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            const auto& in = records[idx[k]];
            auto& rec = out[idx[k]];
            rec.unit_id = in.unit_id;
            rec.year = in.year;
            rec.fitness_rank = *in.fitness_rank;
            rec.monetary = *in.monetary;
            rec.monetary_rel = *in.monetary_rel;
            rec.rank_term = rank_term[k];
            rec.cdi_raw = params.beta * rank_term[k] + (1.0 - params.beta) * static_cast<double>(logs[k]);
            rec.cdi_standardized = params.beta * rank_term[k] + (1.0 - params.beta) * log_z[k];
        }
    }
    return out;
}

TableWriter development_table(std::span<const DevelopmentRecord> records, const CDIParams& params) {
    TableWriter out({"unit", "year", "fitness_rank", "monetary", "monetary_rel", "cdi_raw", "cdi_standardized"});
    out.meta("beta", format_number(params.beta));
    out.meta("rank_transform", params.standardize_rank ? "oriented_zscore_per_year" : "oriented_raw");
    out.meta("log_transform", params.standardize_log ? "zscore_per_year" : "raw");
    out.meta("log_base", "e");
    for (const auto& r : records) {
        out.row({r.unit_id, std::to_string(r.year), std::to_string(r.fitness_rank), format_number(r.monetary),
                 format_number(r.monetary_rel), format_number(r.cdi_raw), format_number(r.cdi_standardized)});
    }
    return out;
}

}  // namespace kuznets
