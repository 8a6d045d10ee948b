#include "reach_venn/ci_model.hpp"

#include <algorithm>
#include <cmath>

#include "reach_venn/bounds.hpp"
#include "reach_venn/least_squares.hpp"

namespace reach_venn {
namespace {

void check_d(double d) {
    if (std::isnan(d) || d <= 1.0) throw ReachError("d must exceed 1");
}

std::vector<double> single_proportions(const ReachDataset& dataset, double universe) {
    std::vector<double> out;
    for (int i = 1; i <= dataset.num_bgs(); ++i) {
        const auto r = dataset.reach_of(SubsetMask::single(i, dataset.num_bgs()));
        if (!r) throw ReachError("single-BG reach of BG " + std::to_string(i) + " is not observed");
        out.push_back(std::clamp(*r / universe, 0.0, 1.0));
    }
    return out;
}

double fit_residual(const ReachDataset& dataset, double d) { return fit(dataset, d).training_residual; }

}  // namespace

double segment_probability(SubsetMask subset, std::size_t segment, std::span<const double> proportions, double d) {
    if (std::isinf(d)) return (subset.bits() & segment) != 0 ? 1.0 : 0.0;
    double miss = 1.0;
    for (int i = 1; i <= subset.num_bgs(); ++i) {
        if (!subset.contains(i)) continue;
        const double r = proportions[static_cast<std::size_t>(i - 1)];
        const bool high = (segment >> (i - 1)) & 1U;
        const double reach = high ? 1.0 - (1.0 - r) / d : r / d;
        miss *= 1.0 - reach;
    }
    return 1.0 - miss;
}

SegmentMatrix build_segment_matrix(std::span<const double> proportions, double d, std::span<const SubsetMask> rows) {
    check_d(d);
    if (rows.empty()) throw ReachError("segment matrix needs at least one row");
    const int p = rows.front().num_bgs();
    if (static_cast<int>(proportions.size()) != p) throw ReachError("need one proportion per BG");
    const std::size_t cols = region_count(p);
    SegmentMatrix out{d, {rows.begin(), rows.end()}, Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols))};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].empty()) throw ReachError("empty subset has no reach");
        for (std::size_t c = 0; c < cols; ++c) {
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = segment_probability(rows[i], c, proportions, d);
        }
    }
    return out;
}

SegmentMatrix build_segment_matrix(const ReachDataset& dataset, double d, std::span<const SubsetMask> rows) {
    const double universe = universe_or_estimate(dataset);
    const auto proportions = single_proportions(dataset, universe);
    return build_segment_matrix(proportions, d, rows);
}

double estimate_universe(const ReachDataset& dataset) {
    const int p = dataset.num_bgs();
    const auto union_reach = dataset.reach_of(SubsetMask::full(p));
    if (!dataset.has_basic_points() || !union_reach) throw ReachError("universe estimation needs every single-BG reach and the union");
    std::vector<double> singles;
    double sum = 0.0;
    for (int i = 1; i <= p; ++i) {
        const double r = *dataset.reach_of(SubsetMask::single(i, p));
        if (r > *union_reach) throw ReachError("inconsistent basics: a single-BG reach exceeds the union");
        singles.push_back(r);
        sum += r;
    }
    if (sum <= *union_reach) throw ReachError("no finite independent universe: BGs do not overlap");

    const double ru = *union_reach;
    auto g = [&](double u) {
        double prod = 1.0;
        for (double r : singles) prod *= 1.0 - r / u;
        return (1.0 - ru / u) - prod;
    };
    double lo = ru * (1.0 + 1e-9);
    if (g(lo) >= 0.0) return lo;
    double hi = 2.0 * lo;
    int doublings = 0;
    while (g(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (++doublings > 200) throw ReachError("universe bracket did not close");
    }
    while ((hi - lo) > 1e-10 * lo) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double universe_or_estimate(const ReachDataset& dataset) {
    if (dataset.universe_size()) return *dataset.universe_size();
    return estimate_universe(dataset);
}

CiModel fit(const ReachDataset& dataset, double d) {
    check_d(d);
    if (!dataset.has_basic_points()) throw ReachError("model fitting needs every single-BG reach and the union");
    const double universe = universe_or_estimate(dataset);
    CiModel model;
    model.num_bgs = dataset.num_bgs();
    model.d = d;
    model.universe_size = universe;
    model.single_bg_proportions = single_proportions(dataset, universe);

    std::vector<SubsetMask> rows;
    Eigen::VectorXd r(static_cast<Eigen::Index>(dataset.size()));
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        rows.push_back(dataset.observations()[i].subset);
        r(static_cast<Eigen::Index>(i)) = dataset.observations()[i].reach / universe;
    }
    const SegmentMatrix z = build_segment_matrix(model.single_bg_proportions, d, rows);
    const LeastSquaresResult ls = capped_simplex_least_squares(z.values, r);
    model.weights.assign(ls.x.data(), ls.x.data() + ls.x.size());
    model.training_residual = ls.objective;
    return model;
}

double predict(const CiModel& model, SubsetMask target) {
    if (target.empty()) throw ReachError("empty subset has no reach");
    if (target.num_bgs() != model.num_bgs) throw ReachError("target BG count differs from model");
    double share = 0.0;
    for (std::size_t c = 0; c < model.weights.size(); ++c) {
        if (model.weights[c] == 0.0) continue;
        share += model.weights[c] * segment_probability(target, c, model.single_bg_proportions, model.d);
    }
    return std::clamp(share * model.universe_size, 0.0, model.universe_size);
}

double min_perfect_fit_d(const ReachDataset& dataset) {
    if (!check_consistency(dataset).consistent) throw ReachError("min_perfect_fit_d needs consistent training points");
    if (fit_residual(dataset, kDFloor) <= kPerfectFitEps) return kDFloor;
    double lo = kDFloor;
    double hi = 2.0;
    while (fit_residual(dataset, hi) > kPerfectFitEps) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1073741824.0) {
            if (fit_residual(dataset, kInfiniteD) <= kPerfectFitEps) return kInfiniteD;
            throw ReachError("no finite d reaches a perfect fit");
        }
    }
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if (fit_residual(dataset, mid) <= kPerfectFitEps) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace reach_venn
