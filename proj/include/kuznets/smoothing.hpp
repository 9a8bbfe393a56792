#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kuznets/random.hpp"
#include "kuznets/table.hpp"

namespace kuznets {

/// One response with one or two predictors (x[1] unused in 1D).
struct Observation {
    std::array<double, 2> x{};
    double y = 0.0;
};

struct GridAxis {
    std::size_t points = 200;
    std::optional<double> lo;  // default: min of the predictor
    std::optional<double> hi;  // default: max of the predictor
};

struct KernelConfig {
    std::size_t dims = 1;
    /// Gaussian bandwidth per predictor; unset selects Silverman's rule.
    std::array<std::optional<double>, 2> bandwidth{};
    std::array<GridAxis, 2> grid{};
    std::size_t bootstrap_reps = 1000;
    double band_level = 0.90;
    std::uint64_t seed = kDefaultSeed;
    /// Grid points whose kernel mass is below this fraction of the largest
    /// mass on the grid are masked.
    double support_floor = 0.01;
};

/// Nadaraya-Watson estimate on a grid. In 2D, point (i, j) is stored at
/// i * axes[1].size() + j.
struct KernelEstimate {
    std::size_t dims = 1;
    std::array<std::vector<double>, 2> axes;
    std::array<double, 2> bandwidth{};
    std::vector<double> estimate;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> mass;  // sum_i K_h(x* - x_i)
    std::vector<std::uint8_t> supported;
    std::size_t observations = 0;
    std::size_t bootstrap_reps = 0;  // 0: no bands computed
    double band_level = 0.0;
    std::uint64_t seed = 0;
    double support_floor = 0.0;

    std::size_t size() const { return estimate.size(); }
};

/// 1.06 sd n^(-1/5) in 1D, 1.06 sd n^(-1/6) per predictor in 2D.
/// Throws DegenerateBandwidth for a constant predictor.
std::array<double, 2> silverman_bandwidth(std::span<const Observation> data, std::size_t dims);

/// Point estimate only; lower and upper equal the estimate.
/// Throws TooFewObservations (< 2), DegenerateBandwidth, InvalidArgument.
KernelEstimate kernel_regress(std::span<const Observation> data, const KernelConfig& config);

/// Point estimate plus pointwise percentile bands from pairs resampling.
/// Replicate b draws from stream_engine(seed, b), so bands do not depend on
/// thread count.
KernelEstimate bootstrap_bands(std::span<const Observation> data, const KernelConfig& config);

/// 2D estimate for colour maps (no bands). Requires config.dims == 2.
KernelEstimate colormap_grid(std::span<const Observation> data, const KernelConfig& config);

/// (x, estimate, lower, upper, supported); masked points carry empty fields.
TableWriter curve_table(const KernelEstimate& est);
/// (x1, x2, estimate, supported); masked points carry an empty estimate.
TableWriter grid_table(const KernelEstimate& est);

}  // namespace kuznets
