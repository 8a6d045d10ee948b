#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "reach_venn/venn.hpp"

namespace reach_venn {

/// Mixture of independent groups: weights ~ U(0,1) normalised, and each
/// group's per-BG reach proportion ~ Beta(a, b) (or a fixed value).
struct CiGroupsSpec {
    int num_groups = 10;
    double beta_a = 0.4;
    double beta_b = 2.0;
    std::optional<double> fixed_reach;
};

/// Region proportions ~ Dirichlet(alpha, ..., alpha) over all 2^P regions.
struct DirichletSpec {
    double alpha = 2.0;
};

struct GeneratorSpec {
    std::variant<CiGroupsSpec, DirichletSpec> kind = CiGroupsSpec{};
    int num_bgs = 6;
    double universe_size = 1e6;
    std::uint64_t seed = 0;

    /// "ci", "ci:G:a:b", "independent:r", "dirichlet:alpha".
    static GeneratorSpec parse(std::string_view text, int num_bgs, double universe_size, std::uint64_t seed);
    [[nodiscard]] std::string describe() const;
};

struct GroundTruth {
    /// All 2^P regions including index 0; sums to the universe size.
    RegionAllocation allocation;
    GeneratorSpec generator;
};

using Engine = std::mt19937_64;

/// Stream for replicate `index` of a run seeded with `seed` (seed xor index).
Engine replicate_engine(std::uint64_t seed, std::uint64_t index = 0);

GroundTruth generate(const GeneratorSpec& spec);
GroundTruth generate(const GeneratorSpec& spec, Engine& engine);

double true_reach(const GroundTruth& truth, SubsetMask subset);

/// Dataset of the true reaches of `masks`, universe declared.
ReachDataset dataset_from_truth(const GroundTruth& truth, std::span<const SubsetMask> masks);

/// Gaussian noise with sigma = 0.1 / 1.645 * R on each observation, clamped at 0.
std::vector<ReachObservation> add_measurement_noise(std::vector<ReachObservation> observations, Engine& engine);
std::vector<ReachObservation> add_measurement_noise(std::vector<ReachObservation> observations, std::uint64_t seed);

inline constexpr double kNoiseRelativeSigma = 0.1 / 1.645;

}  // namespace reach_venn
