#include "reach_venn/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace reach_venn {
namespace {

bool is_basic(SubsetMask m) { return m.is_single() || m.is_full(); }

struct Fold {
    SubsetMask held_out;
    double truth;
    ReachDataset rest;
    BoundInterval bounds;
    double universe;
};

std::vector<Fold> make_folds(const ReachDataset& dataset) {
    std::vector<Fold> folds;
    for (const auto& obs : dataset.observations()) {
        if (is_basic(obs.subset)) continue;
        ReachDataset rest = dataset.without(obs.subset);
        const BoundInterval bounds = subset_bounds(rest, obs.subset);
        const double universe = universe_or_estimate(rest);
        folds.push_back({obs.subset, obs.reach, std::move(rest), bounds, universe});
    }
    return folds;
}

std::vector<double> fold_errors(const std::vector<Fold>& folds, double d, bool clamp) {
    std::vector<double> out;
    out.reserve(folds.size());
    for (const auto& fold : folds) {
        const CiModel model = fit(fold.rest, d);
        double estimate = predict(model, fold.held_out);
        if (clamp) estimate = std::clamp(estimate, fold.bounds.lower, fold.bounds.upper);
        out.push_back(std::abs(relative_error(estimate, fold.truth, fold.bounds, fold.universe).value));
    }
    return out;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::size_t non_basic_count(const ReachDataset& dataset) {
    return static_cast<std::size_t>(std::count_if(dataset.observations().begin(), dataset.observations().end(),
                                                  [](const auto& o) { return !is_basic(o.subset); }));
}

}  // namespace

SelectionState SelectionState::initial(const ReachDataset& measurements, std::span<const SubsetMask> excluded) {
    if (!measurements.has_basic_points()) throw ReachError("selection needs every single-BG reach and the union");
    std::vector<SubsetMask> chosen;
    for (const auto& obs : measurements.observations()) chosen.push_back(obs.subset);
    std::vector<SubsetMask> candidates;
    for (SubsetMask m : enumerate_masks(measurements.num_bgs(), MaskFilter::all)) {
        if (measurements.contains(m)) continue;
        if (std::find(excluded.begin(), excluded.end(), m) != excluded.end()) continue;
        candidates.push_back(m);
    }
    return {std::move(chosen), std::move(candidates), measurements};
}

SelectionState SelectionState::advanced(SubsetMask mask, double reach) const {
    auto it = std::find(candidates_.begin(), candidates_.end(), mask);
    if (it == candidates_.end()) throw ReachError("mask " + mask.to_string() + " is not a candidate");
    auto candidates = candidates_;
    candidates.erase(candidates.begin() + (it - candidates_.begin()));
    auto chosen = chosen_;
    chosen.push_back(mask);
    return {std::move(chosen), std::move(candidates), measurements_.with({mask, reach})};
}

SelectionStep select_next_point(const SelectionState& state, const MeasureFn& measure) {
    if (state.candidates().empty()) throw ReachError("selection exhausted");
    const double tol = 1e-9 * reach_scale(state.measurements());
    std::vector<std::pair<SubsetMask, BoundInterval>> evaluated;
    SubsetMask best;
    double best_gap = -1.0;
    for (SubsetMask m : state.candidates()) {
        const BoundInterval b = subset_bounds(state.measurements(), m);
        evaluated.emplace_back(m, b);
        if (b.width() > best_gap + tol) {
            best_gap = b.width();
            best = m;
        }
    }
    const double reach = measure(best);
    return {state.advanced(best, reach), best, best_gap, reach, std::move(evaluated)};
}

std::vector<double> DGrid::values() const {
    if (count < 1) throw ReachError("d grid needs at least one value");
    if (count == 1) return {d_min};
    std::vector<double> out;
    for (int c = 0; c < count; ++c) out.push_back(d_min + c * (d_max - d_min) / (count - 1));
    return out;
}

double effective_d(double grid_value) { return grid_value <= 1.0 ? kDFloor : grid_value; }

RelativeError relative_error(double estimate, double truth, const BoundInterval& interval, double universe) {
    const double tol_gap = 1e-9 * universe;
    const double diff = estimate - truth;
    if (interval.width() < tol_gap) {
        if (std::abs(diff) <= tol_gap) return {0.0, true};
        return {diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity(), true};
    }
    return {diff / interval.width(), false};
}

std::vector<double> validation_errors(const ReachDataset& dataset, double d) {
    return fold_errors(make_folds(dataset), d, true);
}

TuneResult tune_d(const ReachDataset& dataset, const DGrid& grid) {
    if (!dataset.has_basic_points()) throw ReachError("tuning needs every single-BG reach and the union");
    if (non_basic_count(dataset) == 0) throw ReachError("no validation points; use default_d");
    const auto folds = make_folds(dataset);
    TuneResult result;
    result.grid = grid.values();
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = 0;
    for (std::size_t i = 0; i < result.grid.size(); ++i) {
        const double err = mean(fold_errors(folds, effective_d(result.grid[i]), true));
        result.mean_abs_error.push_back(err);
        if (err < best - 1e-12) {
            best = err;
            best_index = i;
        }
    }
    result.d = result.grid[best_index];
    return result;
}

double percentile_nearest_rank(std::vector<double> values, double alpha) {
    if (values.empty()) throw ReachError("percentile of an empty sample");
    if (!(alpha > 0.0 && alpha <= 100.0)) throw ReachError("percentile must be in (0, 100]");
    std::sort(values.begin(), values.end());
    const double rank = std::ceil(alpha / 100.0 * static_cast<double>(values.size()) - 1e-9);
    const std::size_t idx = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(values.size()))) - 1;
    return values[idx];
}

BoundInterval error_bar_interval(double point, const BoundInterval& interval_100, double q_alpha) {
    const double half = q_alpha / 2.0 * interval_100.width();
    BoundInterval out;
    out.lower = std::max(interval_100.lower, point - half);
    out.upper = std::min(interval_100.upper, point + half);
    if (std::isnan(out.lower)) out.lower = interval_100.lower;
    if (std::isnan(out.upper)) out.upper = interval_100.upper;
    out.lower = std::min(out.lower, interval_100.upper);
    out.upper = std::max(out.upper, out.lower);
    out.capped = interval_100.capped;
    return out;
}

Estimator::Estimator(const ReachDataset& dataset, EstimateOptions options)
    : options_(std::move(options)), training_(dataset) {
    if (!dataset.has_basic_points()) throw ReachError("estimation needs every single-BG reach and the union");
    if (!check_consistency(training_).consistent) {
        training_ = repair_dataset(training_);
        repaired_ = true;
    }
    if (!training_.universe_size()) {
        training_ = training_.with_universe(estimate_universe(training_));
        universe_estimated_ = true;
    }

    double d = kInfiniteD;
    if (options_.d) {
        d = *options_.d;
        d_source_ = DSource::user;
    } else if (non_basic_count(training_) > 0) {
        tuning_ = tune_d(training_, options_.grid);
        d = effective_d(tuning_->d);
        d_source_ = DSource::cross_validation;
    }
    model_ = fit(training_, d);
    if (options_.alpha && non_basic_count(training_) > 0) validation_ = fold_errors(make_folds(training_), d, options_.clamp);
}

std::optional<BoundInterval> Estimator::error_bar(SubsetMask target, double alpha) const {
    if (non_basic_count(training_) == 0) return std::nullopt;
    const std::vector<double> errors =
        validation_.empty() ? fold_errors(make_folds(training_), model_.d, options_.clamp) : validation_;
    const double q = percentile_nearest_rank(errors, alpha);
    const BoundInterval bounds = subset_bounds(training_, target);
    double point = training_.reach_of(target).value_or(predict(model_, target));
    if (options_.clamp) point = std::clamp(point, bounds.lower, bounds.upper);
    return error_bar_interval(point, bounds, q);
}

Estimate Estimator::estimate(SubsetMask target) const {
    Estimate out;
    out.target = target;
    out.interval_100 = subset_bounds(training_, target);
    if (const auto observed = training_.reach_of(target)) {
        out.point = *observed;
        out.observed = true;
    } else {
        out.point = predict(model_, target);
    }
    if (options_.clamp) out.point = std::clamp(out.point, out.interval_100.lower, out.interval_100.upper);
    if (options_.alpha) {
        out.alpha = options_.alpha;
        out.interval_alpha = error_bar(target, *options_.alpha);
        if (!out.interval_alpha) out.alpha_note = "unavailable: no validation points (n = P+1)";
    }
    return out;
}

Estimate estimate_subset(const ReachDataset& dataset, SubsetMask target, const EstimateOptions& options) {
    return Estimator(dataset, options).estimate(target);
}

}  // namespace reach_venn
