#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "reach_venn/venn.hpp"

namespace fixtures {

using namespace reach_venn;

inline SubsetMask m(const char* text) { return SubsetMask::parse(text); }

/// Three BGs, 3000 each, union 7000, R(G2 u G3) = 5000.
inline ReachDataset worked_example() {
    return {3, std::nullopt, {{m("100"), 3000}, {m("010"), 3000}, {m("001"), 3000}, {m("111"), 7000}, {m("011"), 5000}}};
}

/// Five BGs at 100000 each, union 336160 (independent, r = 0.2, U = 500000).
inline ReachDataset five_bg_basics(std::optional<double> universe = std::nullopt) {
    std::vector<ReachObservation> obs;
    for (int i = 1; i <= 5; ++i) obs.push_back({SubsetMask::single(i, 5), 100000});
    obs.push_back({SubsetMask::full(5), 336160});
    return {5, universe, obs};
}

inline ReachDataset five_bg_with_extras() {
    return five_bg_basics()
        .with({m("10001"), 180000})
        .with({m("10010"), 180000})
        .with({m("01110"), 244000})
        .with({m("11010"), 244000})
        .with({m("01111"), 295200});
}

/// Tight bounds from singles and the full union alone.
inline std::pair<double, double> basics_only_bounds(const ReachDataset& ds, SubsetMask target) {
    const int p = ds.num_bgs();
    double max_single = 0.0, inside = 0.0, outside = 0.0;
    for (int i = 1; i <= p; ++i) {
        const double r = *ds.reach_of(SubsetMask::single(i, p));
        if (target.contains(i)) {
            max_single = std::max(max_single, r);
            inside += r;
        } else {
            outside += r;
        }
    }
    const double full = *ds.reach_of(SubsetMask::full(p));
    return {std::max(max_single, full - outside), std::min(inside, full)};
}

inline RegionAllocation random_allocation(int p, std::mt19937_64& rng, double scale = 1e5, double zero_prob = 0.2) {
    std::exponential_distribution<double> ex(1.0);
    std::bernoulli_distribution zero(zero_prob);
    std::vector<double> v(region_count(p), 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = zero(rng) ? 0.0 : std::round(scale * ex(rng));
    return {p, v};
}

/// Random training masks: every basic mask plus `extra` distinct others.
inline std::vector<SubsetMask> random_training_masks(int p, std::size_t extra, std::mt19937_64& rng) {
    std::vector<SubsetMask> out = basic_masks(p);
    std::vector<SubsetMask> others;
    for (SubsetMask s : enumerate_masks(p, MaskFilter::all)) {
        if (std::find(out.begin(), out.end(), s) == out.end()) others.push_back(s);
    }
    std::shuffle(others.begin(), others.end(), rng);
    for (std::size_t i = 0; i < std::min(extra, others.size()); ++i) out.push_back(others[i]);
    return out;
}

inline ReachDataset dataset_from_allocation(const RegionAllocation& alloc, const std::vector<SubsetMask>& masks,
                                            bool declare_universe) {
    std::vector<ReachObservation> obs;
    for (SubsetMask s : masks) obs.push_back({s, subset_reach_from_allocation(s, alloc)});
    return {alloc.num_bgs, declare_universe ? std::optional<double>(alloc.total()) : std::nullopt, obs};
}

// ---------------------------------------------------------------------------
// Independent oracles for the capped-simplex least squares
//   min f(w) = ||b - A w||^2,  w >= 0, sum(w) <= 1

inline double capped_objective(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& w) {
    return (b - a * w).squaredNorm();
}

/// Frank-Wolfe duality gap: f(w) - f* <= gap for any feasible w.
inline double frank_wolfe_gap(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& w) {
    const Eigen::VectorXd grad = 2.0 * a.transpose() * (a * w - b);
    const double best_vertex = std::min(0.0, grad.minCoeff());
    return grad.dot(w) - best_vertex;
}

inline Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& v) {
    Eigen::VectorXd pos = v.cwiseMax(0.0);
    if (pos.sum() <= 1.0) return pos;
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0, theta = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        cumulative += u[k];
        const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (u[k] - t > 0.0) theta = t;
    }
    return (v.array() - theta).cwiseMax(0.0);
}

/// Accelerated projected gradient (FISTA) run for a fixed, generous number of steps.
inline Eigen::VectorXd projected_gradient_oracle(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int iterations = 200000) {
    const double lipschitz = 2.0 * std::pow(Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0), 2) + 1e-12;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(a.cols());
    Eigen::VectorXd y = w;
    double t = 1.0;
    for (int k = 0; k < iterations; ++k) {
        const Eigen::VectorXd grad = 2.0 * a.transpose() * (a * y - b);
        const Eigen::VectorXd next = project_capped_simplex(y - grad / lipschitz);
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = next + ((t - 1.0) / tn) * (next - w);
        w = next;
        t = tn;
    }
    return w;
}

}  // namespace fixtures
