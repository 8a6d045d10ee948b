#include <benchmark/benchmark.h>

#include "reach_venn/bounds.hpp"
#include "reach_venn/ci_model.hpp"
#include "reach_venn/experiment.hpp"
#include "reach_venn/synth.hpp"

using namespace reach_venn;

namespace {

ReachDataset training_set(int p, std::uint64_t seed) {
    const GroundTruth t = generate(GeneratorSpec::parse("dirichlet:2", p, 1e6, seed));
    return dataset_from_truth(t, experiment_training_masks(p));
}

void BM_SubsetBounds(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const ReachDataset ds = training_set(p, 1);
    const SubsetMask target(3, p);
    for (auto _ : state) benchmark::DoNotOptimize(subset_bounds(ds, target));
}
BENCHMARK(BM_SubsetBounds)->DenseRange(4, 8, 2);

void BM_Consistency(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const ReachDataset ds = training_set(p, 2);
    for (auto _ : state) benchmark::DoNotOptimize(check_consistency(ds));
}
BENCHMARK(BM_Consistency)->DenseRange(4, 8, 2);

void BM_Fit(benchmark::State& state) {
    const int p = static_cast<int>(state.range(0));
    const ReachDataset ds = training_set(p, 3);
    for (auto _ : state) benchmark::DoNotOptimize(fit(ds, 2.0));
}
BENCHMARK(BM_Fit)->DenseRange(4, 8, 2);

void BM_Replicate(benchmark::State& state) {
    const GeneratorSpec spec = GeneratorSpec::parse("ci", static_cast<int>(state.range(0)), 1e6, 4);
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_replicate(spec, i++));
}
BENCHMARK(BM_Replicate)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
