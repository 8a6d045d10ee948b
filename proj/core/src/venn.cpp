#include "reach_venn/venn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace reach_venn {

void check_num_bgs(int num_bgs) {
    if (num_bgs < kMinBgs || num_bgs > kMaxBgs) {
        throw ReachError("number of BGs must be in [2, 20], got " + std::to_string(num_bgs));
    }
}

SubsetMask::SubsetMask(std::uint32_t bits, int num_bgs) : bits_(bits), num_bgs_(num_bgs) {
    check_num_bgs(num_bgs);
    if (bits >= (1U << num_bgs)) {
        throw ReachError("mask has flags beyond BG " + std::to_string(num_bgs));
    }
}

SubsetMask SubsetMask::parse(std::string_view text) {
    const int p = static_cast<int>(text.size());
    check_num_bgs(p);
    std::uint32_t bits = 0;
    for (int i = 0; i < p; ++i) {
        const char c = text[static_cast<std::size_t>(i)];
        if (c == '1') {
            bits |= 1U << i;
        } else if (c != '0') {
            throw ReachError("subset string must contain only 0/1: '" + std::string(text) + "'");
        }
    }
    return {bits, p};
}

SubsetMask SubsetMask::single(int bg, int num_bgs) {
    if (bg < 1 || bg > num_bgs) {
        throw ReachError("BG index out of range: " + std::to_string(bg));
    }
    return {1U << (bg - 1), num_bgs};
}

SubsetMask SubsetMask::full(int num_bgs) {
    check_num_bgs(num_bgs);
    return {(1U << num_bgs) - 1U, num_bgs};
}

int SubsetMask::popcount() const { return std::popcount(bits_); }

std::string SubsetMask::to_string() const {
    std::string out(static_cast<std::size_t>(num_bgs_), '0');
    for (int i = 0; i < num_bgs_; ++i) {
        if (contains(i + 1)) out[static_cast<std::size_t>(i)] = '1';
    }
    return out;
}

SubsetMask operator|(SubsetMask a, SubsetMask b) {
    if (a.num_bgs_ != b.num_bgs_) throw ReachError("mask BG counts differ");
    return {a.bits_ | b.bits_, a.num_bgs_};
}

ReachDataset::ReachDataset(int num_bgs, std::optional<double> universe_size,
                           std::vector<ReachObservation> observations)
    : num_bgs_(num_bgs), universe_size_(universe_size), observations_(std::move(observations)) {
    check_num_bgs(num_bgs);
    if (universe_size_ && !(*universe_size_ > 0.0 && std::isfinite(*universe_size_))) {
        throw ReachError("universe size must be positive and finite");
    }
    for (const auto& obs : observations_) {
        if (obs.subset.num_bgs() != num_bgs) throw ReachError("observation mask has wrong BG count");
        if (obs.subset.empty()) throw ReachError("empty subset has no reach");
        if (!(obs.reach >= 0.0) || !std::isfinite(obs.reach)) {
            throw ReachError("reach must be non-negative and finite for " + obs.subset.to_string());
        }
        if (universe_size_ && obs.reach > *universe_size_ * (1.0 + 1e-12)) {
            throw ReachError("reach exceeds universe size for " + obs.subset.to_string());
        }
    }
    std::sort(observations_.begin(), observations_.end(),
              [](const auto& a, const auto& b) { return a.subset < b.subset; });
    auto dup = std::adjacent_find(observations_.begin(), observations_.end(),
                                  [](const auto& a, const auto& b) { return a.subset == b.subset; });
    if (dup != observations_.end()) {
        throw ReachError("duplicate observation for subset " + dup->subset.to_string());
    }
}

std::optional<double> ReachDataset::reach_of(SubsetMask subset) const {
    auto it = std::lower_bound(observations_.begin(), observations_.end(), subset,
                               [](const auto& obs, SubsetMask m) { return obs.subset < m; });
    if (it != observations_.end() && it->subset == subset) return it->reach;
    return std::nullopt;
}

bool ReachDataset::has_basic_points() const {
    return std::ranges::all_of(basic_masks(num_bgs_), [&](SubsetMask m) { return contains(m); });
}

double ReachDataset::max_reach() const {
    double best = 0.0;
    for (const auto& obs : observations_) best = std::max(best, obs.reach);
    return best;
}

ReachDataset ReachDataset::with(ReachObservation extra) const {
    auto obs = observations_;
    obs.push_back(extra);
    return {num_bgs_, universe_size_, std::move(obs)};
}

ReachDataset ReachDataset::without(SubsetMask subset) const {
    auto obs = observations_;
    std::erase_if(obs, [&](const auto& o) { return o.subset == subset; });
    return {num_bgs_, universe_size_, std::move(obs)};
}

ReachDataset ReachDataset::with_universe(std::optional<double> universe_size) const {
    return {num_bgs_, universe_size, observations_};
}

ReachDataset ReachDataset::with_reaches(std::span<const double> reaches) const {
    if (reaches.size() != observations_.size()) throw ReachError("reach count mismatch");
    auto obs = observations_;
    for (std::size_t i = 0; i < obs.size(); ++i) obs[i].reach = std::max(0.0, reaches[i]);
    return {num_bgs_, universe_size_, std::move(obs)};
}

RegionAllocation::RegionAllocation(int p, std::vector<double> v) : num_bgs(p), values(std::move(v)) {
    check_num_bgs(p);
    if (values.size() != region_count(p)) throw ReachError("allocation must have 2^P entries");
    for (double x : values) {
        if (!(x >= 0.0)) throw ReachError("region reach must be non-negative");
    }
}

RegionAllocation RegionAllocation::zeros(int p) {
    check_num_bgs(p);
    return {p, std::vector<double>(region_count(p), 0.0)};
}

double RegionAllocation::total() const { return std::accumulate(values.begin(), values.end(), 0.0); }

std::vector<std::uint8_t> incidence_vector(SubsetMask subset, int num_bgs) {
    if (subset.empty()) throw ReachError("empty subset has no reach");
    if (subset.num_bgs() != num_bgs) throw ReachError("mask BG count differs from P");
    std::vector<std::uint8_t> out(region_count(num_bgs), 0);
    for (std::size_t j = 1; j < out.size(); ++j) out[j] = (j & subset.bits()) != 0 ? 1 : 0;
    return out;
}

double subset_reach_from_allocation(SubsetMask subset, const RegionAllocation& alloc) {
    if (subset.empty()) throw ReachError("empty subset has no reach");
    if (subset.num_bgs() != alloc.num_bgs) throw ReachError("mask BG count differs from allocation");
    double sum = 0.0;
    for (std::size_t j = 1; j < alloc.values.size(); ++j) {
        if ((j & subset.bits()) != 0) sum += alloc.values[j];
    }
    return sum;
}

std::vector<SubsetMask> enumerate_masks(int num_bgs, MaskFilter filter, int k) {
    check_num_bgs(num_bgs);
    std::vector<SubsetMask> out;
    const std::uint32_t n = 1U << num_bgs;
    for (std::uint32_t bits = 1; bits < n; ++bits) {
        const int pc = std::popcount(bits);
        bool keep = false;
        switch (filter) {
            case MaskFilter::all: keep = true; break;
            case MaskFilter::single_bgs: keep = pc == 1; break;
            case MaskFilter::full_union: keep = bits == n - 1; break;
            case MaskFilter::popcount: keep = pc == k; break;
        }
        if (keep) out.emplace_back(bits, num_bgs);
    }
    return out;
}

std::vector<SubsetMask> basic_masks(int num_bgs) {
    auto out = enumerate_masks(num_bgs, MaskFilter::single_bgs);
    out.push_back(SubsetMask::full(num_bgs));
    return out;
}

}  // namespace reach_venn
