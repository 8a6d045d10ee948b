#include "reach_venn/venn_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace reach_venn {

BoundInterval oracle_bounds_by_grid(const ReachDataset& dataset, SubsetMask target, double step,
                                    std::size_t max_points) {
    const int p = dataset.num_bgs();
    if (p > 4) throw ReachError("grid oracle supports P <= 4");
    if (!(step > 0.0)) throw ReachError("grid step must be positive");
    if (target.empty()) throw ReachError("empty subset has no reach");

    const std::size_t regions = region_count(p) - 1;
    const std::size_t rows = dataset.size();
    // Augmented system over regions 1..2^P-1, reduced to row echelon form.
    std::vector<std::vector<double>> m(rows, std::vector<double>(regions + 1, 0.0));
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& obs = dataset.observations()[i];
        for (std::size_t j = 1; j <= regions; ++j) m[i][j - 1] = (j & obs.subset.bits()) ? 1.0 : 0.0;
        m[i][regions] = obs.reach;
    }
    std::vector<std::size_t> pivot_cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < regions && r < rows; ++c) {
        std::size_t best = r;
        for (std::size_t i = r; i < rows; ++i) {
            if (std::abs(m[i][c]) > std::abs(m[best][c])) best = i;
        }
        if (std::abs(m[best][c]) < 1e-12) continue;
        std::swap(m[r], m[best]);
        const double inv = 1.0 / m[r][c];
        for (double& v : m[r]) v *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0.0) continue;
            const double f = m[i][c];
            for (std::size_t k = 0; k <= regions; ++k) m[i][k] -= f * m[r][k];
        }
        pivot_cols.push_back(c);
        ++r;
    }
    const double scale = std::max(1.0, dataset.max_reach());
    for (std::size_t i = r; i < rows; ++i) {
        if (std::abs(m[i][regions]) > 1e-9 * scale) throw ReachError("observations are inconsistent");
    }

    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < regions; ++c) {
        if (std::find(pivot_cols.begin(), pivot_cols.end(), c) == pivot_cols.end()) free_cols.push_back(c);
    }

    // Each free region is bounded by the smallest observation containing it.
    std::vector<std::size_t> steps(free_cols.size(), 0);
    double total_points = 1.0;
    for (std::size_t f = 0; f < free_cols.size(); ++f) {
        const std::size_t region = free_cols[f] + 1;
        double cap = std::numeric_limits<double>::infinity();
        for (const auto& obs : dataset.observations()) {
            if (region & obs.subset.bits()) cap = std::min(cap, obs.reach);
        }
        if (!std::isfinite(cap)) {
            if (region & target.bits()) throw ReachError("target touches an unconstrained region");
            cap = 0.0;
        }
        steps[f] = static_cast<std::size_t>(std::floor(cap / step + 1e-9));
        total_points *= static_cast<double>(steps[f] + 1);
    }
    if (total_points > static_cast<double>(max_points)) throw ReachError("grid too large");

    std::vector<std::size_t> counter(free_cols.size(), 0);
    std::vector<double> x(regions, 0.0);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const double neg_tol = 1e-9 * scale;
    while (true) {
        for (std::size_t f = 0; f < free_cols.size(); ++f) x[free_cols[f]] = static_cast<double>(counter[f]) * step;
        bool feasible = true;
        for (std::size_t i = 0; i < pivot_cols.size() && feasible; ++i) {
            double v = m[i][regions];
            for (std::size_t f : free_cols) v -= m[i][f] * x[f];
            if (v < -neg_tol) feasible = false;
            x[pivot_cols[i]] = std::max(0.0, v);
        }
        if (feasible) {
            double reach = 0.0;
            for (std::size_t j = 1; j <= regions; ++j) {
                if (j & target.bits()) reach += x[j - 1];
            }
            lo = std::min(lo, reach);
            hi = std::max(hi, reach);
        }
        std::size_t f = 0;
        while (f < counter.size() && counter[f] == steps[f]) counter[f++] = 0;
        if (f == counter.size()) break;
        ++counter[f];
    }
    if (!(lo <= hi)) throw ReachError("grid too coarse");
    return {lo, hi, false};
}

}  // namespace reach_venn
