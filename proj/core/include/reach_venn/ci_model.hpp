#pragma once

#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "reach_venn/venn.hpp"

namespace reach_venn {

/// Tuning parameter d in (1, inf]; infinity selects the exact 0/1 limit.
inline constexpr double kInfiniteD = std::numeric_limits<double>::infinity();

/// Fit residual at or below this value (proportion scale) counts as a perfect fit.
inline constexpr double kPerfectFitEps = 1e-9;

/// Stand-in for d = 1, where every segment collapses to the independence model.
inline constexpr double kDFloor = 1.0 + 1e-9;

/// Probability that a user in activity segment `segment` is reached by
/// `subset`, given per-BG reach proportions.
double segment_probability(SubsetMask subset, std::size_t segment, std::span<const double> proportions, double d);

struct SegmentMatrix {
    double d = kInfiniteD;
    std::vector<SubsetMask> rows;
    /// rows.size() x 2^P, columns in canonical segment order.
    Eigen::MatrixXd values;
};

SegmentMatrix build_segment_matrix(std::span<const double> proportions, double d, std::span<const SubsetMask> rows);

/// Uses the dataset's universe (or its estimate) to derive r(G_i).
SegmentMatrix build_segment_matrix(const ReachDataset& dataset, double d, std::span<const SubsetMask> rows);

/// Universe size U > R(union) satisfying 1 - R(union)/U = prod_i (1 - R(G_i)/U).
double estimate_universe(const ReachDataset& dataset);

/// Declared universe, else the independence estimate.
double universe_or_estimate(const ReachDataset& dataset);

struct CiModel {
    int num_bgs = 0;
    double d = kInfiniteD;
    double universe_size = 0.0;
    std::vector<double> single_bg_proportions;
    /// 2^P segment weights, non-negative, summing to at most 1.
    std::vector<double> weights;
    /// ||r - Z(d) w||^2 on the training rows.
    double training_residual = 0.0;
};

CiModel fit(const ReachDataset& dataset, double d);

/// Point estimate z(target)' w * U, clamped to [0, U].
double predict(const CiModel& model, SubsetMask target);

/// Smallest d (within 1e-3) whose fit residual is <= kPerfectFitEps. Returns
/// kDFloor when the near-independence model already fits.
double min_perfect_fit_d(const ReachDataset& dataset);

}  // namespace reach_venn
