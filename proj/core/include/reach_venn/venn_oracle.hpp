#pragma once

#include "reach_venn/bounds.hpp"
#include "reach_venn/venn.hpp"

namespace reach_venn {

/// Brute-force bounds for small diagrams (P <= 4). Free region reaches are
/// enumerated on a grid of spacing `step`; the remaining regions are solved
/// from the observation equalities, and non-negative survivors give the
/// min / max target reach. Exact only up to one grid step. Does not use the
/// LP solver, so it can serve as an independent check of subset_bounds.
BoundInterval oracle_bounds_by_grid(const ReachDataset& dataset, SubsetMask target, double step,
                                    std::size_t max_points = 20'000'000);

}  // namespace reach_venn
