#include "reach_venn/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace reach_venn {

std::vector<SubsetMask> experiment_training_masks(int num_bgs) {
    std::vector<SubsetMask> out;
    for (SubsetMask m : enumerate_masks(num_bgs, MaskFilter::all)) {
        const int k = m.popcount();
        if (k == 1 || k == num_bgs - 1 || k == num_bgs) out.push_back(m);
    }
    return out;
}

std::vector<SubsetMask> experiment_testing_masks(int num_bgs) {
    std::vector<SubsetMask> out;
    for (SubsetMask m : enumerate_masks(num_bgs, MaskFilter::all)) {
        const int k = m.popcount();
        if (k != 1 && k != num_bgs - 1 && k != num_bgs) out.push_back(m);
    }
    return out;
}

ReplicateResult run_replicate(const GeneratorSpec& spec, std::uint64_t index, const EstimateOptions& options) {
    if (spec.num_bgs < 4) throw ReachError("experiment needs P >= 4");
    Engine engine = replicate_engine(spec.seed, index);
    const GroundTruth truth = generate(spec, engine);
    const double u = spec.universe_size;

    std::vector<ReachObservation> clean;
    for (SubsetMask m : experiment_training_masks(spec.num_bgs)) clean.push_back({m, true_reach(truth, m)});
    auto noisy = add_measurement_noise(std::move(clean), engine);
    for (auto& obs : noisy) obs.reach = std::min(obs.reach, u);

    const Estimator estimator(ReachDataset(spec.num_bgs, u, std::move(noisy)), options);
    ReplicateResult result;
    result.index = index;
    result.d = estimator.d();
    result.repaired = estimator.repaired();
    for (SubsetMask target : experiment_testing_masks(spec.num_bgs)) {
        const Estimate est = estimator.estimate(target);
        TargetError e;
        e.target = target;
        e.truth = true_reach(truth, target);
        e.estimate = est.point;
        e.bounds = est.interval_100;
        const RelativeError rel = relative_error(est.point, e.truth, est.interval_100, u);
        e.relative_error = rel.value;
        e.degenerate_gap = rel.degenerate_gap;
        result.errors.push_back(e);
    }
    return result;
}

int effective_threads(int requested) {
    int threads = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (const char* env = std::getenv("REACH_VENN_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) threads = std::min(threads, cap);
        } catch (const std::exception&) {
        }
    }
    return threads;
}

ExperimentReport run_experiment(const GeneratorSpec& spec, const ExperimentOptions& options) {
    if (options.replicates < 1) throw ReachError("replicates must be at least 1");
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport report;
    report.generator = spec;
    report.replicates = options.replicates;
    report.results.resize(static_cast<std::size_t>(options.replicates));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= options.replicates) return;
            try {
                report.results[static_cast<std::size_t>(i)] = run_replicate(spec, static_cast<std::uint64_t>(i), options.estimate);
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int threads = std::min(effective_threads(options.threads), options.replicates);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<double> abs_errors;
    for (const auto& r : report.results) {
        for (const auto& e : r.errors) abs_errors.push_back(std::abs(e.relative_error));
    }
    report.error_count = abs_errors.size();
    report.q90 = percentile_nearest_rank(std::move(abs_errors), 90.0);
    report.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace reach_venn
