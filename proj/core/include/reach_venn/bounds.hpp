#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reach_venn/venn.hpp"

namespace reach_venn {

struct BoundInterval {
    double lower = 0.0;
    double upper = 0.0;
    /// The LP was unbounded above, or the upper end was clamped to the universe.
    bool capped = false;

    [[nodiscard]] double width() const { return upper - lower; }
    [[nodiscard]] bool contains(double value, double tol = 0.0) const {
        return value >= lower - tol && value <= upper + tol;
    }
    [[nodiscard]] bool within(const BoundInterval& outer, double tol = 0.0) const {
        return lower >= outer.lower - tol && upper <= outer.upper + tol;
    }
};

struct ConsistencyReport {
    bool consistent = false;
    /// Optimum of max t s.t. observations hold and t <= x_j, in reach units.
    double t_star = 0.0;
    /// Same optimum on the scaled problem; consistent iff >= -lp::kFeasTol.
    double t_star_scaled = 0.0;
    std::optional<RegionAllocation> witness;
    std::string diagnostic;
};

/// Row scale used for every LP: the declared universe, else the largest
/// observed reach (1 for an all-zero dataset).
double reach_scale(const ReachDataset& dataset);

ConsistencyReport check_consistency(const ReachDataset& dataset);

/// Tightest [min, max] of the target's reach over all non-negative region
/// allocations reproducing every observation. Throws ReachError when the
/// observations are inconsistent.
BoundInterval subset_bounds(const ReachDataset& dataset, SubsetMask target);

/// Replaces every observed reach by its value under the non-negative
/// allocation closest (least squares, scaled) to the observations. Returns
/// the input unchanged when it is already consistent.
ReachDataset repair_dataset(const ReachDataset& dataset);

/// Least-squares non-negative allocation of the non-empty regions. When a
/// universe is declared the allocation is also capped at it.
RegionAllocation least_squares_allocation(const ReachDataset& dataset);

enum class CurveMode { upper_trace, lower_trace, free };

struct CurvePoint {
    SubsetMask prefix;
    BoundInterval bounds;
    /// Pinned value in trace modes.
    std::optional<double> traced;
};

/// Bounds for the union of the first k BGs of `order` (1-based BG ids),
/// k = 2 ... P-1.
std::vector<CurvePoint> incremental_curve_bounds(const ReachDataset& dataset, std::span<const int> order,
                                                 CurveMode mode);

}  // namespace reach_venn
