#include "kuznets/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kuznets/error.hpp"
#include "kuznets/parallel.hpp"

namespace kuznets {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate(std::span<const Observation> data, const KernelConfig& config) {
    if (config.dims != 1 && config.dims != 2) throw Error(Errc::InvalidArgument, "dims must be 1 or 2");
    if (data.size() < 2) {
        throw Error(Errc::TooFewObservations, "need at least 2 observations, got " + std::to_string(data.size()));
    }
    for (const auto& o : data) {
        if (!std::isfinite(o.x[0]) || !std::isfinite(o.y) || (config.dims == 2 && !std::isfinite(o.x[1]))) {
            throw Error(Errc::InvalidArgument, "observations must be finite");
        }
    }
    for (std::size_t d = 0; d < config.dims; ++d) {
        if (config.bandwidth[d] && !(*config.bandwidth[d] > 0.0)) {
            throw Error(Errc::InvalidArgument, "bandwidths must be positive");
        }
        if (config.grid[d].points == 0) throw Error(Errc::InvalidArgument, "grid needs at least one point");
    }
    if (!(config.band_level > 0.0 && config.band_level < 1.0)) {
        throw Error(Errc::InvalidArgument, "band level must lie in (0, 1)");
    }
    if (!(config.support_floor >= 0.0 && config.support_floor < 1.0)) {
        throw Error(Errc::InvalidArgument, "support floor must lie in [0, 1)");
    }
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = 0.5 * (lo + hi);
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

/// weights[g * n + i] = phi((axis[g] - x_i) / h) / h for one predictor.
std::vector<double> axis_weights(const std::vector<double>& axis, std::span<const Observation> data, std::size_t dim,
                                 double h) {
    const std::size_t n = data.size();
    std::vector<double> w(axis.size() * n);
    const double norm = 1.0 / (h * std::sqrt(2.0 * 3.14159265358979323846));
    for (std::size_t g = 0; g < axis.size(); ++g) {
        for (std::size_t i = 0; i < n; ++i) {
            const double u = (axis[g] - data[i].x[dim]) / h;
            w[g * n + i] = norm * std::exp(-0.5 * u * u);
        }
    }
    return w;
}

/// Shared state for one estimate: grid, per-axis kernel weights, and the
/// centred responses (y - y_ref) so that constant data reproduce exactly.
struct Smoother {
    std::span<const Observation> data;
    std::size_t dims = 1;
    KernelEstimate est;
    std::array<std::vector<double>, 2> weights;
    std::vector<double> centred;
    double y_ref = 0.0;

    std::size_t points() const { return est.axes[0].size() * (dims == 2 ? est.axes[1].size() : 1); }

    /// Calls f(i, w) for every observation with weight w at grid point p.
    template <class F>
    void for_weights(std::size_t p, F&& f) const {
        const std::size_t n = data.size();
        if (dims == 1) {
            const double* w = &weights[0][p * n];
            for (std::size_t i = 0; i < n; ++i) f(i, w[i]);
        } else {
            const std::size_t n2 = est.axes[1].size();
            const double* w1 = &weights[0][(p / n2) * n];
            const double* w2 = &weights[1][(p % n2) * n];
            for (std::size_t i = 0; i < n; ++i) f(i, w1[i] * w2[i]);
        }
    }
};

Smoother prepare(std::span<const Observation> data, const KernelConfig& config) {
    validate(data, config);
    Smoother sm;
    sm.data = data;
    sm.dims = config.dims;
    auto& est = sm.est;
    est.dims = config.dims;
    est.observations = data.size();
    est.band_level = config.band_level;
    est.seed = config.seed;
    est.support_floor = config.support_floor;

    const bool need_rule = !config.bandwidth[0] || (config.dims == 2 && !config.bandwidth[1]);
    std::array<double, 2> rule{};
    if (need_rule) rule = silverman_bandwidth(data, config.dims);
    for (std::size_t d = 0; d < config.dims; ++d) {
        est.bandwidth[d] = config.bandwidth[d] ? *config.bandwidth[d] : rule[d];
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& o : data) {
            lo = std::min(lo, o.x[d]);
            hi = std::max(hi, o.x[d]);
        }
        if (config.grid[d].lo) lo = *config.grid[d].lo;
        if (config.grid[d].hi) hi = *config.grid[d].hi;
        if (hi < lo) throw Error(Errc::InvalidArgument, "grid upper bound below lower bound");
        est.axes[d] = linspace(lo, hi, config.grid[d].points);
        sm.weights[d] = axis_weights(est.axes[d], data, d, est.bandwidth[d]);
    }
    sm.y_ref = data[0].y;
    sm.centred.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) sm.centred[i] = data[i].y - sm.y_ref;

    const std::size_t points = sm.points();
    est.estimate.assign(points, kNaN);
    est.mass.assign(points, 0.0);
    est.supported.assign(points, 0);
    for (std::size_t p = 0; p < points; ++p) {
        long double den = 0.0L, num = 0.0L;
        sm.for_weights(p, [&](std::size_t i, double w) {
            den += w;
            num += w * sm.centred[i];
        });
        est.mass[p] = static_cast<double>(den);
        if (den > 0.0L) est.estimate[p] = sm.y_ref + static_cast<double>(num / den);
    }
    const double peak = *std::max_element(est.mass.begin(), est.mass.end());
    for (std::size_t p = 0; p < points; ++p) {
        est.supported[p] = peak > 0.0 && est.mass[p] > 0.0 && est.mass[p] >= config.support_floor * peak;
        if (!est.supported[p]) est.estimate[p] = kNaN;
    }
    est.lower = est.estimate;
    est.upper = est.estimate;
    return sm;
}

double quantile_sorted(const std::vector<double>& v, double prob) {
    const double h = (static_cast<double>(v.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

std::array<double, 2> silverman_bandwidth(std::span<const Observation> data, std::size_t dims) {
    if (data.size() < 2) throw Error(Errc::TooFewObservations, "need at least 2 observations");
    if (dims != 1 && dims != 2) throw Error(Errc::InvalidArgument, "dims must be 1 or 2");
    const double n = static_cast<double>(data.size());
    const double exponent = dims == 1 ? -1.0 / 5.0 : -1.0 / 6.0;
    std::array<double, 2> out{};
    for (std::size_t d = 0; d < dims; ++d) {
        long double mean = 0.0L;
        for (const auto& o : data) mean += o.x[d];
        mean /= n;
        long double ss = 0.0L;
        for (const auto& o : data) ss += (o.x[d] - mean) * (o.x[d] - mean);
        const double sd = static_cast<double>(std::sqrt(ss / (n - 1.0)));
        out[d] = 1.06 * sd * std::pow(n, exponent);
        if (!(out[d] > 0.0)) {
            throw Error(Errc::DegenerateBandwidth, "predictor " + std::to_string(d + 1) +
                                                       " is constant; set the bandwidth explicitly");
        }
    }
    return out;
}

KernelEstimate kernel_regress(std::span<const Observation> data, const KernelConfig& config) {
    return prepare(data, config).est;
}

KernelEstimate colormap_grid(std::span<const Observation> data, const KernelConfig& config) {
    if (config.dims != 2) throw Error(Errc::InvalidArgument, "colour map needs two predictors");
    return kernel_regress(data, config);
}

KernelEstimate bootstrap_bands(std::span<const Observation> data, const KernelConfig& config) {
    if (config.bootstrap_reps == 0) throw Error(Errc::InvalidArgument, "bootstrap needs at least one replicate");
    Smoother sm = prepare(data, config);
    auto& est = sm.est;
    const std::size_t n = data.size();
    const std::size_t points = sm.points();
    const std::size_t reps = config.bootstrap_reps;

    std::vector<std::size_t> active;
    for (std::size_t p = 0; p < points; ++p) {
        if (est.supported[p]) active.push_back(p);
    }
    // replicate_values[b * active + k]: replicate b at active point k.
    std::vector<double> replicate_values(reps * active.size(), kNaN);
    parallel_for(reps, [&](std::size_t b) {
        auto eng = stream_engine(config.seed, b);
        std::vector<std::uint32_t> counts(n, 0);
        for (std::size_t k = 0; k < n; ++k) ++counts[uniform_index(eng, n)];
        for (std::size_t k = 0; k < active.size(); ++k) {
            long double den = 0.0L, num = 0.0L;
            sm.for_weights(active[k], [&](std::size_t i, double w) {
                if (counts[i] == 0) return;
                const double cw = counts[i] * w;
                den += cw;
                num += cw * sm.centred[i];
            });
            if (den > 0.0L) replicate_values[b * active.size() + k] = sm.y_ref + static_cast<double>(num / den);
        }
    });

    const double tail = (1.0 - config.band_level) / 2.0;
    std::vector<double> column;
    for (std::size_t k = 0; k < active.size(); ++k) {
        column.clear();
        for (std::size_t b = 0; b < reps; ++b) {
            const double v = replicate_values[b * active.size() + k];
            if (!std::isnan(v)) column.push_back(v);
        }
        const auto p = active[k];
        if (column.empty()) continue;
        std::sort(column.begin(), column.end());
        est.lower[p] = std::min(quantile_sorted(column, tail), est.estimate[p]);
        est.upper[p] = std::max(quantile_sorted(column, 1.0 - tail), est.estimate[p]);
    }
    est.bootstrap_reps = reps;
    return est;
}

namespace {

void put_metadata(TableWriter& t, const KernelEstimate& est) {
    t.meta("kernel", "gaussian");
    t.meta("observations", std::to_string(est.observations));
    t.meta("bandwidth", format_number(est.bandwidth[0]) +
                            (est.dims == 2 ? std::string(";") + format_number(est.bandwidth[1]) : std::string()));
    t.meta("reps", std::to_string(est.bootstrap_reps));
    t.meta("level", format_number(est.band_level));
    t.meta("bands", est.bootstrap_reps ? "pointwise_percentile_pairs_bootstrap" : "none");
    t.meta("seed", std::to_string(est.seed));
    t.meta("rng", std::string(kRngName));
    t.meta("support_floor", format_number(est.support_floor));
}

}  // namespace

TableWriter curve_table(const KernelEstimate& est) {
    if (est.dims != 1) throw Error(Errc::InvalidArgument, "curve table needs a 1D estimate");
    TableWriter t({"x", "estimate", "lower", "upper", "supported"});
    put_metadata(t, est);
    for (std::size_t p = 0; p < est.size(); ++p) {
        const bool ok = est.supported[p];
        t.row({format_number(est.axes[0][p]), ok ? format_number(est.estimate[p]) : "",
               ok ? format_number(est.lower[p]) : "", ok ? format_number(est.upper[p]) : "", ok ? "1" : "0"});
    }
    return t;
}

TableWriter grid_table(const KernelEstimate& est) {
    if (est.dims != 2) throw Error(Errc::InvalidArgument, "grid table needs a 2D estimate");
    TableWriter t({"x1", "x2", "estimate", "supported"});
    put_metadata(t, est);
    const std::size_t n2 = est.axes[1].size();
    for (std::size_t p = 0; p < est.size(); ++p) {
        const bool ok = est.supported[p];
        t.row({format_number(est.axes[0][p / n2]), format_number(est.axes[1][p % n2]),
               ok ? format_number(est.estimate[p]) : "", ok ? "1" : "0"});
    }
    return t;
}

}  // namespace kuznets
