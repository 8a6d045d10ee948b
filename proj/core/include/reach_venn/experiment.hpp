#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reach_venn/pipeline.hpp"
#include "reach_venn/synth.hpp"

namespace reach_venn {

struct TargetError {
    SubsetMask target;
    double truth = 0.0;
    double estimate = 0.0;
    BoundInterval bounds;
    double relative_error = 0.0;
    bool degenerate_gap = false;
};

struct ReplicateResult {
    std::uint64_t index = 0;
    double d = kInfiniteD;
    bool repaired = false;
    std::vector<TargetError> errors;
};

struct ExperimentOptions {
    int replicates = 100;
    /// Worker threads; 0 means hardware concurrency, further capped by REACH_VENN_THREADS.
    int threads = 0;
    EstimateOptions estimate;
};

struct ExperimentReport {
    GeneratorSpec generator;
    int replicates = 0;
    std::vector<ReplicateResult> results;
    /// Nearest-rank 90th percentile of |relative error| over all error terms.
    double q90 = 0.0;
    std::size_t error_count = 0;
    double runtime_seconds = 0.0;
};

/// Training masks of the protocol: single BGs, all-but-one unions and the full union.
std::vector<SubsetMask> experiment_training_masks(int num_bgs);
/// Every other non-zero mask (2^P - 2P - 2 of them).
std::vector<SubsetMask> experiment_testing_masks(int num_bgs);

/// One replicate: truth, noisy training points, repair, tuning, fit, and the
/// relative error of every testing mask against the clean truth.
ReplicateResult run_replicate(const GeneratorSpec& spec, std::uint64_t index, const EstimateOptions& options = {});

ExperimentReport run_experiment(const GeneratorSpec& spec, const ExperimentOptions& options);

/// Thread count after applying REACH_VENN_THREADS.
int effective_threads(int requested);

}  // namespace reach_venn
