#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reach_venn {

/// Thrown for contract violations and malformed input across the library.
class ReachError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kMinBgs = 2;
inline constexpr int kMaxBgs = 20;

/// A subset of the P buying groups. Flag i (1-based) contributes 2^(i-1)
/// to the canonical index, so the string "110" (G1, G2) has index 3.
class SubsetMask {
public:
    constexpr SubsetMask() = default;
    SubsetMask(std::uint32_t bits, int num_bgs);

    /// Parses "x1...xP", leftmost character is BG 1.
    static SubsetMask parse(std::string_view text);
    static SubsetMask single(int bg, int num_bgs);  // bg is 1-based
    static SubsetMask full(int num_bgs);

    [[nodiscard]] constexpr std::uint32_t bits() const { return bits_; }
    [[nodiscard]] constexpr std::size_t index() const { return bits_; }
    [[nodiscard]] constexpr int num_bgs() const { return num_bgs_; }
    [[nodiscard]] constexpr bool empty() const { return bits_ == 0; }
    [[nodiscard]] int popcount() const;
    [[nodiscard]] bool contains(int bg) const { return (bits_ >> (bg - 1)) & 1U; }
    [[nodiscard]] bool is_subset_of(SubsetMask other) const { return (bits_ & ~other.bits_) == 0; }
    [[nodiscard]] bool is_single() const { return popcount() == 1; }
    [[nodiscard]] bool is_full() const { return bits_ == (1U << num_bgs_) - 1U; }

    [[nodiscard]] std::string to_string() const;

    friend SubsetMask operator|(SubsetMask a, SubsetMask b);
    friend constexpr bool operator==(SubsetMask, SubsetMask) = default;
    friend constexpr auto operator<=>(SubsetMask a, SubsetMask b) { return a.bits_ <=> b.bits_; }

private:
    std::uint32_t bits_ = 0;
    int num_bgs_ = 0;
};

struct ReachObservation {
    SubsetMask subset;
    double reach = 0.0;
};

/// Observed reaches of distinct subsets. Observations are kept in ascending
/// canonical order regardless of input order.
class ReachDataset {
public:
    ReachDataset(int num_bgs, std::optional<double> universe_size,
                 std::vector<ReachObservation> observations);

    [[nodiscard]] int num_bgs() const { return num_bgs_; }
    [[nodiscard]] const std::optional<double>& universe_size() const { return universe_size_; }
    [[nodiscard]] const std::vector<ReachObservation>& observations() const { return observations_; }
    [[nodiscard]] std::size_t size() const { return observations_.size(); }

    [[nodiscard]] std::optional<double> reach_of(SubsetMask subset) const;
    [[nodiscard]] bool contains(SubsetMask subset) const { return reach_of(subset).has_value(); }
    /// All P single-BG masks plus the full union are observed.
    [[nodiscard]] bool has_basic_points() const;
    /// Largest observed reach (0 for an empty dataset).
    [[nodiscard]] double max_reach() const;

    [[nodiscard]] ReachDataset with(ReachObservation extra) const;
    [[nodiscard]] ReachDataset without(SubsetMask subset) const;
    [[nodiscard]] ReachDataset with_universe(std::optional<double> universe_size) const;
    [[nodiscard]] ReachDataset with_reaches(std::span<const double> reaches) const;

private:
    int num_bgs_;
    std::optional<double> universe_size_;
    std::vector<ReachObservation> observations_;
};

/// Reach of each of the 2^P primitive regions; index 0 is the region no BG reaches.
struct RegionAllocation {
    int num_bgs = 0;
    std::vector<double> values;

    RegionAllocation() = default;
    RegionAllocation(int num_bgs, std::vector<double> values);
    static RegionAllocation zeros(int num_bgs);

    [[nodiscard]] double total() const;
};

enum class MaskFilter { all, single_bgs, full_union, popcount };

void check_num_bgs(int num_bgs);
[[nodiscard]] inline std::size_t region_count(int num_bgs) { return std::size_t{1} << num_bgs; }

/// Entry j is 1 iff primitive region j meets the subset. Entry 0 is always 0.
std::vector<std::uint8_t> incidence_vector(SubsetMask subset, int num_bgs);

double subset_reach_from_allocation(SubsetMask subset, const RegionAllocation& alloc);

/// Non-zero masks in ascending canonical order. `k` is used only for MaskFilter::popcount.
std::vector<SubsetMask> enumerate_masks(int num_bgs, MaskFilter filter, int k = 0);

/// The P single-BG masks followed by the full-union mask.
std::vector<SubsetMask> basic_masks(int num_bgs);

}  // namespace reach_venn
