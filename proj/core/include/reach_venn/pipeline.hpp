#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reach_venn/bounds.hpp"
#include "reach_venn/ci_model.hpp"
#include "reach_venn/venn.hpp"

namespace reach_venn {

// ---------------------------------------------------------------------------
// Adaptive selection of training points

/// Training-point selection state. `chosen` and `candidates` are disjoint;
/// masks that are neither (e.g. held-out testing points) are never eligible.
class SelectionState {
public:
    /// Starts from a dataset that already holds at least the basic points.
    /// Every other non-zero mask not in `excluded` becomes a candidate.
    static SelectionState initial(const ReachDataset& measurements, std::span<const SubsetMask> excluded = {});

    [[nodiscard]] const std::vector<SubsetMask>& chosen() const { return chosen_; }
    [[nodiscard]] const std::vector<SubsetMask>& candidates() const { return candidates_; }
    [[nodiscard]] const ReachDataset& measurements() const { return measurements_; }

    /// Moves `mask` from the candidates to the chosen list with its measured reach.
    [[nodiscard]] SelectionState advanced(SubsetMask mask, double reach) const;

private:
    SelectionState(std::vector<SubsetMask> chosen, std::vector<SubsetMask> candidates, ReachDataset measurements)
        : chosen_(std::move(chosen)), candidates_(std::move(candidates)), measurements_(std::move(measurements)) {}

    std::vector<SubsetMask> chosen_;
    std::vector<SubsetMask> candidates_;
    ReachDataset measurements_;
};

struct SelectionStep {
    SelectionState state;
    SubsetMask selected;
    double gap = 0.0;
    double measured = 0.0;
    /// Bounds of every candidate evaluated this round, ascending canonical order.
    std::vector<std::pair<SubsetMask, BoundInterval>> candidate_bounds;
};

using MeasureFn = std::function<double(SubsetMask)>;

/// Measures the candidate with the widest bound gap (ties: smallest index).
SelectionStep select_next_point(const SelectionState& state, const MeasureFn& measure);

// ---------------------------------------------------------------------------
// Cross-validation of d and error bars

struct DGrid {
    double d_min = 1.0;
    double d_max = 5.0;
    int count = 10;

    /// Evenly spaced values d_min + c (d_max - d_min) / (count - 1).
    [[nodiscard]] std::vector<double> values() const;
};

/// Value actually fitted for a grid entry (d = 1 maps to kDFloor).
double effective_d(double grid_value);

struct RelativeError {
    double value = 0.0;
    bool degenerate_gap = false;
};

/// (estimate - truth) / (upper - lower). When the gap is below 1e-9 * U the
/// result is 0 if |estimate - truth| is also below it, else a signed infinity.
RelativeError relative_error(double estimate, double truth, const BoundInterval& interval, double universe);

/// Leave-one-out |e_rel| for each non-basic training point at parameter d.
/// Each fold fits on the other n-1 points and bounds the held-out point
/// with the same n-1 points.
std::vector<double> validation_errors(const ReachDataset& dataset, double d);

struct TuneResult {
    double d = kInfiniteD;
    /// Mean |e_rel| per grid value, in grid order.
    std::vector<double> mean_abs_error;
    std::vector<double> grid;
};

/// Grid search of d minimising the mean leave-one-out |e_rel|. Needs n > P+1.
TuneResult tune_d(const ReachDataset& dataset, const DGrid& grid = {});

/// Nearest-rank percentile (alpha in (0, 100]).
double percentile_nearest_rank(std::vector<double> values, double alpha);

/// [max(lo, R - q/2 (hi - lo)), min(hi, R + q/2 (hi - lo))].
BoundInterval error_bar_interval(double point, const BoundInterval& interval_100, double q_alpha);

// ---------------------------------------------------------------------------
// Final estimation

enum class DSource { cross_validation, default_infinite, user };

struct EstimateOptions {
    bool clamp = true;
    std::optional<double> alpha;
    /// Fixed d; when unset, d is tuned by cross-validation (or defaults to inf).
    std::optional<double> d;
    DGrid grid;
};

struct Estimate {
    SubsetMask target;
    double point = 0.0;
    BoundInterval interval_100;
    std::optional<BoundInterval> interval_alpha;
    std::optional<double> alpha;
    /// Why no alpha interval was produced, when one was requested.
    std::string alpha_note;
    bool observed = false;
};

/// Runs repair, universe estimation, d selection and the final fit once,
/// then answers estimates for any number of targets.
class Estimator {
public:
    Estimator(const ReachDataset& dataset, EstimateOptions options = {});

    [[nodiscard]] Estimate estimate(SubsetMask target) const;
    /// Alpha-level interval around the point estimate; nullopt without validation points.
    [[nodiscard]] std::optional<BoundInterval> error_bar(SubsetMask target, double alpha) const;

    [[nodiscard]] const ReachDataset& training() const { return training_; }
    [[nodiscard]] const CiModel& model() const { return model_; }
    [[nodiscard]] double d() const { return model_.d; }
    [[nodiscard]] DSource d_source() const { return d_source_; }
    [[nodiscard]] bool repaired() const { return repaired_; }
    [[nodiscard]] bool universe_estimated() const { return universe_estimated_; }
    [[nodiscard]] const std::optional<TuneResult>& tuning() const { return tuning_; }
    /// Leave-one-out |e_rel| at the final d (empty when n = P+1).
    [[nodiscard]] const std::vector<double>& validation() const { return validation_; }

private:
    EstimateOptions options_;
    ReachDataset training_;
    CiModel model_;
    DSource d_source_ = DSource::default_infinite;
    bool repaired_ = false;
    bool universe_estimated_ = false;
    std::optional<TuneResult> tuning_;
    std::vector<double> validation_;
};

Estimate estimate_subset(const ReachDataset& dataset, SubsetMask target, const EstimateOptions& options = {});

}  // namespace reach_venn
