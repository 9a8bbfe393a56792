#include "kuznets/inequality.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>

#include "kuznets/error.hpp"

namespace kuznets {

namespace {

long double checked_total(std::span<const double> incomes) {
    if (incomes.empty()) throw Error(Errc::InvalidArgument, "empty income distribution");
    long double total = 0.0L;
    for (double y : incomes) {
        if (!(y >= 0.0) || !std::isfinite(y)) throw Error(Errc::InvalidArgument, "incomes must be finite and >= 0");
        total += y;
    }
    if (!(total > 0.0L)) throw Error(Errc::AllZeroIncomes, "distribution has no positive income");
    return total;
}

long double xlogx(long double x) { return x > 0.0L ? x * std::log(x) : 0.0L; }

// Perfect equality is exactly zero; the generic path would leave rounding noise.
bool all_equal(std::span<const double> incomes) {
    return std::adjacent_find(incomes.begin(), incomes.end(), std::not_equal_to<>()) == incomes.end();
}

}  // namespace

double theil(std::span<const double> incomes) {
    const long double n = static_cast<long double>(incomes.size());
    const long double mu = checked_total(incomes) / n;
    if (all_equal(incomes)) return 0.0;
    long double acc = 0.0L;
    for (double y : incomes) acc += xlogx(y / mu);
    return static_cast<double>(std::max(acc / n, 0.0L));
}

double theil_share_form(std::span<const double> incomes) {
    const long double n = static_cast<long double>(incomes.size());
    const long double total = checked_total(incomes);
    if (all_equal(incomes)) return 0.0;
    long double acc = 0.0L;
    for (double y : incomes) {
        const long double share = y / total;
        if (share > 0.0L) acc += share * std::log(share * n);
    }
    return static_cast<double>(std::max(acc, 0.0L));
}

double gini(std::span<const double> incomes) {
    const long double total = checked_total(incomes);
    std::vector<double> sorted(incomes.begin(), incomes.end());
    std::sort(sorted.begin(), sorted.end());
    // sum_p sum_q |y_p - y_q| = 2 sum_i (2i - n - 1) y_(i), i = 1..n ascending.
    const long double n = static_cast<long double>(sorted.size());
    long double acc = 0.0L;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        acc += (2.0L * static_cast<long double>(i + 1) - n - 1.0L) * sorted[i];
    }
    return static_cast<double>(std::max(acc / (n * total), 0.0L));
}

double weighted_gini(std::span<const double> values, std::span<const double> weights) {
    if (values.size() != weights.size()) throw Error(Errc::InvalidArgument, "values and weights differ in length");
    std::vector<std::size_t> idx;
    long double pop = 0.0L, total = 0.0L;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(weights[i] >= 0.0) || !(values[i] >= 0.0)) {
            throw Error(Errc::InvalidArgument, "values and weights must be >= 0");
        }
        if (weights[i] == 0.0) continue;
        idx.push_back(i);
        pop += weights[i];
        total += static_cast<long double>(weights[i]) * values[i];
    }
    if (idx.empty()) throw Error(Errc::InvalidArgument, "no positive weight");
    if (!(total > 0.0L)) throw Error(Errc::AllZeroIncomes, "distribution has no positive income");
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    // Each weight block occupies positions (before, before + w]; its rank sum
    // is w * (2 before + w + 1) / 2.
    long double before = 0.0L, acc = 0.0L;
    for (auto i : idx) {
        const long double w = weights[i];
        const long double rank_sum = w * (2.0L * before + w + 1.0L) / 2.0L;
        acc += (2.0L * rank_sum - w * (pop + 1.0L)) * values[i];
        before += w;
    }
    return static_cast<double>(std::max(acc / (pop * total), 0.0L));
}

GroupedDistribution GroupedDistribution::from_members(const std::vector<std::vector<double>>& members) {
    GroupedDistribution g;
    long double total = 0.0L;
    for (const auto& m : members) {
        IncomeGroup group;
        group.members = m.size();
        long double t = 0.0L;
        for (double y : m) t += y;
        group.total_income = static_cast<double>(t);
        group.incomes = m;
        g.population += m.size();
        total += t;
        g.groups.push_back(std::move(group));
    }
    g.total_income = static_cast<double>(total);
    return g;
}

TheilDecomposition decompose(const GroupedDistribution& g) {
    if (g.groups.empty()) throw Error(Errc::InvalidArgument, "no groups");
    std::size_t n_sum = 0;
    long double y_sum = 0.0L;
    bool have_members = true;
    for (const auto& grp : g.groups) {
        if (grp.members == 0) throw Error(Errc::InconsistentTotals, "group with no members");
        if (!(grp.total_income >= 0.0)) throw Error(Errc::InconsistentTotals, "negative group income");
        n_sum += grp.members;
        y_sum += grp.total_income;
        if (grp.incomes) {
            if (grp.incomes->size() != grp.members) {
                throw Error(Errc::InconsistentTotals, "member list length differs from group count");
            }
            long double t = 0.0L;
            for (double y : *grp.incomes) t += y;
            if (std::abs(static_cast<double>(t) - grp.total_income) > 1e-9 * std::max(1.0, grp.total_income)) {
                throw Error(Errc::InconsistentTotals, "member incomes do not add up to the group total");
            }
        } else {
            have_members = false;
        }
    }
    if (n_sum != g.population) {
        throw Error(Errc::InconsistentTotals, "group counts add to " + std::to_string(n_sum) + ", population is " +
                                                  std::to_string(g.population));
    }
    if (std::abs(static_cast<double>(y_sum) - g.total_income) > 1e-9 * std::max(1.0, g.total_income)) {
        throw Error(Errc::InconsistentTotals, "group incomes do not add up to the total income");
    }
    if (!(y_sum > 0.0L)) throw Error(Errc::AllZeroIncomes, "distribution has no positive income");

    const long double Y = y_sum;
    const long double n = static_cast<long double>(n_sum);
    TheilDecomposition out;
    long double between = 0.0L, within = 0.0L;
    for (const auto& grp : g.groups) {
        const long double share = grp.total_income / Y;
        if (share > 0.0L) between += share * std::log(share / (static_cast<long double>(grp.members) / n));
        double t_i = 0.0;
        if (grp.incomes && grp.total_income > 0.0) t_i = theil(*grp.incomes);
        out.per_group.push_back(t_i);
        within += share * t_i;
    }
    out.between = static_cast<double>(std::max(between, 0.0L));
    if (have_members) {
        out.within = static_cast<double>(within);
        std::vector<double> flat;
        flat.reserve(n_sum);
        for (const auto& grp : g.groups) flat.insert(flat.end(), grp.incomes->begin(), grp.incomes->end());
        out.total = theil(flat);
        const double sum = out.between + *out.within;
        out.identity_residual = *out.total > 0.0 ? std::abs(*out.total - sum) / *out.total : std::abs(sum);
    }
    return out;
}

double between_sector_theil(std::span<const SectorWage> sectors) {
    long double P = 0.0L, wages = 0.0L;
    std::size_t active = 0;
    for (const auto& s : sectors) {
        if (!(s.employment >= 0.0) || !(s.average_wage >= 0.0) || !std::isfinite(s.employment) ||
            !std::isfinite(s.average_wage)) {
            throw Error(Errc::InvalidArgument, "sector employment and wages must be finite and >= 0");
        }
        if (s.employment == 0.0) continue;
        ++active;
        P += s.employment;
        wages += static_cast<long double>(s.employment) * s.average_wage;
    }
    if (active == 0) throw Error(Errc::NoSectors, "no sector with positive employment");
    if (!(wages > 0.0L)) throw Error(Errc::AllZeroIncomes, "all sector wages are zero");
    const double* first_wage = nullptr;
    bool equal_wages = true;
    for (const auto& s : sectors) {
        if (s.employment == 0.0) continue;
        if (!first_wage) first_wage = &s.average_wage;
        equal_wages = equal_wages && s.average_wage == *first_wage;
    }
    if (equal_wages) return 0.0;
    const long double mu = wages / P;
    long double acc = 0.0L;
    for (const auto& s : sectors) {
        if (s.employment == 0.0) continue;
        acc += (s.employment / P) * xlogx(s.average_wage / mu);
    }
    return static_cast<double>(std::max(acc, 0.0L));
}

std::vector<CapitalShareRow> capital_share_series(std::span<const CountryYearRecord> records) {
    std::vector<CapitalShareRow> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.country_id, r.year, r.labor_share, 1.0 - r.labor_share});
    return out;
}

}  // namespace kuznets
