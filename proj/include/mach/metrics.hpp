#pragma once

#include "mach/tensor.hpp"
#include "mach/tucker.hpp"

#include <span>
#include <utility>
#include <vector>

namespace mach {

/// Side-by-side comparison of two decompositions of the same tensor.
/// per_mode_rho holds the sign-resolved Pearson correlation between the
/// leading factor columns, one value per mode; flipped marks modes where the
/// second model's column was negated to align it. When the top two core
/// slice norms of a mode are too close to separate, per-column correlation
/// is ill-defined, so tied is set and tie_subspace_sin adds the sine of the
/// largest principal angle between the two factor subspaces of that mode.
struct ComparisonReport {
    std::vector<double> per_mode_rho;
    std::vector<bool> flipped;
    std::vector<bool> tied;
    std::vector<double> tie_subspace_sin;
    double accuracy_exact = 0.0;
    double accuracy_mach = 0.0;
    std::pair<double, double> core_interaction{0.0, 0.0};
};

/// Sample Pearson correlation. Lengths must match (ShapeError) and be at
/// least 2; a zero-variance input leaves the correlation undefined and
/// raises ArgumentError. Identical inputs give exactly 1.0 and exactly
/// negated inputs exactly -1.0.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson correlation between one factor column of each model. mode is
/// 0-based, component 1-based and at most the smaller of the two mode ranks.
/// The second column is negated first when its inner product with the first
/// is negative, so genuinely aligned components score in [0, 1]; *flipped
/// records whether that happened.
double pc_correlation(const TuckerModel& exact, const TuckerModel& approx, int mode,
                      int component = 1, bool* flipped = nullptr);

/// Full report: component-1 correlations per mode, both models' accuracy
/// against reference, and the leading core entry of each model.
ComparisonReport compare(const TuckerModel& exact, const TuckerModel& approx,
                         const DenseTensor& reference);

}  // namespace mach
