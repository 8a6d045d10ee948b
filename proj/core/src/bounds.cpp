#include "reach_venn/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "reach_venn/least_squares.hpp"
#include "reach_venn/lp.hpp"

namespace reach_venn {
namespace {

// Observation rows over the non-empty regions 1 ... 2^P-1 (column j-1 is region j).
std::vector<double> region_row(SubsetMask mask) {
    const std::size_t regions = region_count(mask.num_bgs());
    std::vector<double> row(regions - 1, 0.0);
    for (std::size_t j = 1; j < regions; ++j) row[j - 1] = (j & mask.bits()) != 0 ? 1.0 : 0.0;
    return row;
}

Eigen::MatrixXd observation_matrix(const ReachDataset& dataset) {
    const std::size_t cols = region_count(dataset.num_bgs()) - 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dataset.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const auto bits = dataset.observations()[i].subset.bits();
        for (std::size_t j = 1; j <= cols; ++j) {
            if ((j & bits) != 0) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 1)) = 1.0;
        }
    }
    return a;
}

}  // namespace

double reach_scale(const ReachDataset& dataset) {
    if (dataset.universe_size()) return *dataset.universe_size();
    const double m = dataset.max_reach();
    return m > 0.0 ? m : 1.0;
}

ConsistencyReport check_consistency(const ReachDataset& dataset) {
    if (dataset.size() == 0) throw ReachError("consistency check needs at least one observation");
    const double scale = reach_scale(dataset);
    const std::size_t regions = region_count(dataset.num_bgs()) - 1;

    // x_j = t + y_j with y >= 0: max t s.t. B y + t (B 1) = R / scale, t <= 1.
    lp::LinearProgram program;
    program.sense = lp::Sense::maximize;
    const std::size_t t_index = regions;
    program.objective.assign(regions + 1, 0.0);
    program.objective[t_index] = 1.0;
    program.lower.assign(regions + 1, 0.0);
    program.upper.assign(regions + 1, lp::kInf);
    program.lower[t_index] = -lp::kInf;
    program.upper[t_index] = 1.0;
    for (const auto& obs : dataset.observations()) {
        auto row = region_row(obs.subset);
        double count = 0.0;
        for (double v : row) count += v;
        row.push_back(count);
        program.add(std::move(row), lp::Relation::equal, obs.reach / scale);
    }

    const lp::Solution sol = lp::solve(program);
    ConsistencyReport report;
    if (sol.status != lp::Status::optimal) {
        report.consistent = false;
        report.t_star = report.t_star_scaled = -lp::kInf;
        report.diagnostic = sol.status == lp::Status::infeasible ? "observation system is numerically infeasible"
                                                                 : "consistency program unbounded";
        return report;
    }
    const double t = sol.x[t_index];
    report.t_star_scaled = t;
    report.t_star = t * scale;
    report.consistent = t >= -lp::kFeasTol;
    if (report.consistent) {
        std::vector<double> values(regions + 1, 0.0);
        for (std::size_t j = 0; j < regions; ++j) values[j + 1] = std::max(0.0, (sol.x[j] + t) * scale);
        if (dataset.universe_size()) {
            double covered = 0.0;
            for (double v : values) covered += v;
            values[0] = std::max(0.0, *dataset.universe_size() - covered);
        }
        report.witness = RegionAllocation(dataset.num_bgs(), std::move(values));
    } else {
        report.diagnostic = "no non-negative region allocation reproduces the observations";
    }
    return report;
}

BoundInterval subset_bounds(const ReachDataset& dataset, SubsetMask target) {
    if (target.empty()) throw ReachError("empty subset has no reach");
    if (target.num_bgs() != dataset.num_bgs()) throw ReachError("target BG count differs from dataset");
    const double scale = reach_scale(dataset);

    lp::LinearProgram program;
    program.objective = region_row(target);
    for (const auto& obs : dataset.observations()) {
        program.add(region_row(obs.subset), lp::Relation::equal, obs.reach / scale);
    }

    program.sense = lp::Sense::minimize;
    const lp::Solution low = lp::solve(program);
    if (low.status == lp::Status::infeasible) {
        throw ReachError("observations are inconsistent; run repair_dataset first");
    }
    program.sense = lp::Sense::maximize;
    const lp::Solution high = lp::solve(program);

    BoundInterval out;
    out.lower = std::max(0.0, low.value) * scale;
    if (high.status == lp::Status::unbounded) {
        out.capped = true;
        if (dataset.universe_size()) {
            out.upper = *dataset.universe_size();
        } else {
            double singles = 0.0;
            for (const auto& obs : dataset.observations()) {
                if (obs.subset.is_single()) singles += obs.reach;
            }
            out.upper = singles;
        }
        out.upper = std::max(out.upper, out.lower);
    } else {
        out.upper = high.value * scale;
        if (dataset.universe_size() && out.upper > *dataset.universe_size()) {
            out.upper = *dataset.universe_size();
            out.capped = true;
        }
    }
    if (out.upper - out.lower < lp::kFeasTol * scale) {
        const double mid = 0.5 * (out.lower + out.upper);
        out.lower = out.upper = mid;
    }
    return out;
}

RegionAllocation least_squares_allocation(const ReachDataset& dataset) {
    const double scale = reach_scale(dataset);
    const Eigen::MatrixXd a = observation_matrix(dataset);
    Eigen::VectorXd b(static_cast<Eigen::Index>(dataset.size()));
    for (std::size_t i = 0; i < dataset.size(); ++i) b(static_cast<Eigen::Index>(i)) = dataset.observations()[i].reach / scale;

    const LeastSquaresResult fit = dataset.universe_size() ? capped_simplex_least_squares(a, b) : nnls(a, b);
    std::vector<double> values(region_count(dataset.num_bgs()), 0.0);
    double covered = 0.0;
    for (Eigen::Index j = 0; j < fit.x.size(); ++j) {
        values[static_cast<std::size_t>(j) + 1] = std::max(0.0, fit.x(j)) * scale;
        covered += values[static_cast<std::size_t>(j) + 1];
    }
    if (dataset.universe_size()) values[0] = std::max(0.0, *dataset.universe_size() - covered);
    return {dataset.num_bgs(), std::move(values)};
}

ReachDataset repair_dataset(const ReachDataset& dataset) {
    if (dataset.size() == 0 || check_consistency(dataset).consistent) return dataset;
    const RegionAllocation alloc = least_squares_allocation(dataset);
    std::vector<double> reaches;
    reaches.reserve(dataset.size());
    for (const auto& obs : dataset.observations()) {
        double r = subset_reach_from_allocation(obs.subset, alloc);
        if (dataset.universe_size()) r = std::min(r, *dataset.universe_size());
        reaches.push_back(r);
    }
    return dataset.with_reaches(reaches);
}

std::vector<CurvePoint> incremental_curve_bounds(const ReachDataset& dataset, std::span<const int> order,
                                                 CurveMode mode) {
    const int p = dataset.num_bgs();
    if (static_cast<int>(order.size()) != p) throw ReachError("order must list every BG exactly once");
    std::vector<bool> seen(static_cast<std::size_t>(p) + 1, false);
    for (int bg : order) {
        if (bg < 1 || bg > p || seen[static_cast<std::size_t>(bg)]) throw ReachError("order is not a permutation of 1..P");
        seen[static_cast<std::size_t>(bg)] = true;
    }

    std::vector<CurvePoint> out;
    ReachDataset working = dataset;
    std::uint32_t bits = 1U << (order[0] - 1);
    for (int k = 2; k <= p - 1; ++k) {
        bits |= 1U << (order[static_cast<std::size_t>(k - 1)] - 1);
        const SubsetMask prefix(bits, p);
        CurvePoint point{prefix, subset_bounds(working, prefix), std::nullopt};
        if (mode != CurveMode::free) {
            const double pinned = mode == CurveMode::upper_trace ? point.bounds.upper : point.bounds.lower;
            point.traced = pinned;
            if (!working.contains(prefix)) working = working.with({prefix, pinned});
        }
        out.push_back(point);
    }
    return out;
}

}  // namespace reach_venn
