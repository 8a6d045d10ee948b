#include <cmath>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reach_venn/bounds.hpp"
#include "reach_venn/experiment.hpp"
#include "reach_venn/io.hpp"
#include "reach_venn/pipeline.hpp"

using namespace reach_venn;
using io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInconsistent = 2;
constexpr int kExitUnavailable = 3;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::optional<double> parse_d(const std::string& text) {
    if (text == "auto") return std::nullopt;
    if (text == "inf") return kInfiniteD;
    try {
        std::size_t used = 0;
        const double d = std::stod(text, &used);
        if (used != text.size()) throw UsageError("");
        if (!(d > 1.0)) throw UsageError("--d must exceed 1");
        return d;
    } catch (const UsageError& e) {
        throw UsageError(std::string(e.what()).empty() ? "--d takes auto, inf or a number" : e.what());
    } catch (const std::exception&) {
        throw UsageError("--d takes auto, inf or a number");
    }
}

ReachDataset load(const std::string& path) {
    try {
        return io::read_dataset(path);
    } catch (const ReachError& e) {
        throw UsageError(e.what());
    }
}

SubsetMask parse_target(const std::string& text, int p) {
    SubsetMask m;
    try {
        m = SubsetMask::parse(text);
    } catch (const ReachError& e) {
        throw UsageError(e.what());
    }
    if (m.num_bgs() != p) throw UsageError("target '" + text + "' must have " + std::to_string(p) + " characters");
    return m;
}

std::vector<int> parse_order(const std::string& text, int p) {
    std::vector<int> order;
    if (text.empty()) {
        order.resize(static_cast<std::size_t>(p));
        std::iota(order.begin(), order.end(), 1);
        return order;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            order.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw UsageError("--order takes a comma-separated permutation of 1..P");
        }
    }
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(static_cast<std::size_t>(p));
    std::iota(expect.begin(), expect.end(), 1);
    if (sorted != expect) throw UsageError("--order must be a permutation of 1..P");
    return order;
}

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

int require_consistent(const ReachDataset& dataset) {
    const auto report = check_consistency(dataset);
    if (report.consistent) return kExitOk;
    std::cerr << "inconsistent observations (t* = " << report.t_star << "); run `check --repair` first\n";
    return kExitInconsistent;
}

const char* d_source_name(DSource s) {
    switch (s) {
        case DSource::cross_validation: return "cross_validation";
        case DSource::default_infinite: return "default_infinite";
        case DSource::user: return "user";
    }
    return "";
}

Json fit_json(const Estimator& est) {
    Json j{{"model", io::to_json(est.model())},
           {"d_source", d_source_name(est.d_source())},
           {"repaired", est.repaired()},
           {"universe_estimated", est.universe_estimated()}};
    if (est.tuning()) {
        Json grid = Json::array();
        for (std::size_t i = 0; i < est.tuning()->grid.size(); ++i) {
            grid.push_back({{"d", est.tuning()->grid[i]}, {"mean_abs_error", est.tuning()->mean_abs_error[i]}});
        }
        j["tuning"] = {{"d", est.tuning()->d}, {"grid", std::move(grid)}};
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reach deduplication across buying groups: consistency, bounds and model estimates"};
    app.require_subcommand(1);

    std::string dataset_path, target, order_text, mode = "free", d_text = "auto", repair_out, model_out, truth_path;
    std::string generator = "ci", out_path;
    bool all_targets = false, no_clamp = false, terms = false;
    double alpha = 0.0, universe = 1e6;
    int budget = 10, p = 6, replicates = 100, threads = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> excluded;

    auto* check = app.add_subcommand("check", "Report whether observations admit a non-negative Venn allocation");
    check->add_option("dataset", dataset_path, "Dataset JSON")->required();
    check->add_option("--repair", repair_out, "Write the least-squares repaired dataset here when inconsistent");

    auto* bounds = app.add_subcommand("bounds", "Tightest reach bounds for unobserved subsets");
    bounds->add_option("dataset", dataset_path, "Dataset JSON")->required();
    auto* target_opt = bounds->add_option("--target", target, "Subset x1...xP");
    auto* all_opt = bounds->add_flag("--all", all_targets, "Every non-empty subset");
    target_opt->excludes(all_opt);

    auto* curve = app.add_subcommand("curve", "Prefix bounds of an incremental reach curve (CSV)");
    curve->add_option("dataset", dataset_path, "Dataset JSON")->required();
    curve->add_option("--order", order_text, "Comma-separated BG order (default 1..P)");
    curve->add_option("--mode", mode, "upper | lower | free")->check(CLI::IsMember({"upper", "lower", "free"}));

    auto* fit_cmd = app.add_subcommand("fit", "Fit the conditional independence model");
    fit_cmd->add_option("dataset", dataset_path, "Dataset JSON")->required();
    fit_cmd->add_option("--d", d_text, "auto | inf | value > 1");
    fit_cmd->add_option("--out", model_out, "Write the model JSON here");

    auto* predict_cmd = app.add_subcommand("predict", "Point estimate, 100% interval and optional error bar");
    predict_cmd->add_option("dataset", dataset_path, "Dataset JSON")->required();
    predict_cmd->add_option("--target", target, "Subset x1...xP")->required();
    predict_cmd->add_option("--d", d_text, "auto | inf | value > 1");
    predict_cmd->add_option("--alpha", alpha, "Error-bar percentile in (0, 100]")->check(CLI::Range(1e-9, 100.0));
    predict_cmd->add_flag("--no-clamp", no_clamp, "Do not clamp the point estimate into the 100% interval");

    auto* select = app.add_subcommand("select", "Adaptive max-gap selection of extra training points");
    select->add_option("dataset", dataset_path, "Dataset JSON with the basic points")->required();
    select->add_option("--budget", budget, "Number of points to select")->check(CLI::NonNegativeNumber);
    select->add_option("--truth", truth_path, "Dataset or ground-truth JSON answering measurements")->required();
    select->add_option("--exclude", excluded, "Masks never eligible (e.g. testing points)");

    auto* experiment = app.add_subcommand("experiment", "Synthetic replicate study (q90 of relative errors)");
    experiment->add_option("--generator", generator, "ci | ci:G:a:b | independent:r | dirichlet:alpha");
    experiment->add_option("--p", p, "Number of BGs")->check(CLI::Range(4, kMaxBgs));
    experiment->add_option("--replicates", replicates, "Replicate count")->check(CLI::PositiveNumber);
    experiment->add_option("--seed", seed, "Base seed");
    experiment->add_option("--universe", universe, "Universe size")->check(CLI::PositiveNumber);
    experiment->add_option("--threads", threads, "Worker threads (0 = all, capped by REACH_VENN_THREADS)");
    experiment->add_option("--out", out_path, "Write the full report JSON here");
    experiment->add_flag("--terms", terms, "Include every error term in the report");

    auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic ground truth");
    generate_cmd->add_option("--generator", generator, "ci | ci:G:a:b | independent:r | dirichlet:alpha");
    generate_cmd->add_option("--p", p, "Number of BGs")->check(CLI::Range(kMinBgs, kMaxBgs));
    generate_cmd->add_option("--seed", seed, "Seed");
    generate_cmd->add_option("--universe", universe, "Universe size")->check(CLI::PositiveNumber);
    generate_cmd->add_option("--out", out_path, "Output JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (check->parsed()) {
            const ReachDataset ds = load(dataset_path);
            const auto report = check_consistency(ds);
            Json j{{"status", report.consistent ? "consistent" : "inconsistent"}, {"t_star", report.t_star}};
            if (!report.diagnostic.empty()) j["diagnostic"] = report.diagnostic;
            if (!report.consistent && !repair_out.empty()) {
                io::write_json(repair_out, io::to_json(repair_dataset(ds)));
                j["repaired"] = repair_out;
            }
            print(j);
            return report.consistent ? kExitOk : kExitInconsistent;
        }
        if (bounds->parsed()) {
            if (target.empty() && !all_targets) throw UsageError("bounds needs --target MASK or --all");
            const ReachDataset ds = load(dataset_path);
            if (const int rc = require_consistent(ds)) return rc;
            if (!all_targets) {
                Json j = io::to_json(subset_bounds(ds, parse_target(target, ds.num_bgs())));
                j["target"] = target;
                print(j);
                return kExitOk;
            }
            Json list = Json::array();
            for (SubsetMask m : enumerate_masks(ds.num_bgs(), MaskFilter::all)) {
                Json j = io::to_json(subset_bounds(ds, m));
                j["target"] = m.to_string();
                j["observed"] = ds.contains(m);
                list.push_back(std::move(j));
            }
            print(list);
            return kExitOk;
        }
        if (curve->parsed()) {
            const ReachDataset ds = load(dataset_path);
            const auto order = parse_order(order_text, ds.num_bgs());
            if (const int rc = require_consistent(ds)) return rc;
            const CurveMode cm = mode == "upper" ? CurveMode::upper_trace : mode == "lower" ? CurveMode::lower_trace : CurveMode::free;
            std::cout << "prefix_length,prefix,lower,upper,traced\n";
            std::cout.precision(12);
            for (const auto& pt : incremental_curve_bounds(ds, order, cm)) {
                std::cout << pt.prefix.popcount() << ',' << pt.prefix.to_string() << ',' << pt.bounds.lower << ','
                          << pt.bounds.upper << ',';
                if (pt.traced) std::cout << *pt.traced;
                std::cout << '\n';
            }
            return kExitOk;
        }
        if (fit_cmd->parsed()) {
            const ReachDataset ds = load(dataset_path);
            EstimateOptions opts;
            opts.d = parse_d(d_text);
            const Estimator est(ds, opts);
            if (!model_out.empty()) io::write_json(model_out, io::to_json(est.model()));
            print(fit_json(est));
            return kExitOk;
        }
        if (predict_cmd->parsed()) {
            const ReachDataset ds = load(dataset_path);
            EstimateOptions opts;
            opts.d = parse_d(d_text);
            opts.clamp = !no_clamp;
            if (alpha > 0.0) opts.alpha = alpha;
            const SubsetMask t = parse_target(target, ds.num_bgs());
            const Estimator est(ds, opts);
            const Estimate e = est.estimate(t);
            Json j = io::to_json(e);
            j["d"] = io::d_to_json(est.d());
            j["d_source"] = d_source_name(est.d_source());
            j["repaired"] = est.repaired();
            print(j);
            return e.alpha && !e.interval_alpha ? kExitUnavailable : kExitOk;
        }
        if (select->parsed()) {
            const ReachDataset ds = load(dataset_path);
            const ReachDataset truth = load(truth_path);
            if (truth.num_bgs() != ds.num_bgs()) throw UsageError("truth and dataset disagree on num_bgs");
            std::vector<SubsetMask> excl;
            for (const auto& s : excluded) excl.push_back(parse_target(s, ds.num_bgs()));
            if (const int rc = require_consistent(ds)) return rc;
            SelectionState state = SelectionState::initial(ds, excl);
            const MeasureFn measure = [&](SubsetMask m) {
                const auto r = truth.reach_of(m);
                if (!r) throw ReachError("truth file has no reach for " + m.to_string());
                return *r;
            };
            Json rounds = Json::array();
            for (int k = 0; k < budget; ++k) {
                if (state.candidates().empty()) {
                    std::cerr << "warning: selection exhausted after " << k << " of " << budget << " rounds\n";
                    break;
                }
                SelectionStep step = select_next_point(state, measure);
                Json cands = Json::array();
                for (const auto& [m, b] : step.candidate_bounds) {
                    Json cj = io::to_json(b);
                    cj["target"] = m.to_string();
                    cands.push_back(std::move(cj));
                }
                rounds.push_back({{"round", k + 1},
                                  {"selected", step.selected.to_string()},
                                  {"gap", step.gap},
                                  {"measured", step.measured},
                                  {"candidates", std::move(cands)}});
                state = std::move(step.state);
            }
            Json excluded_bounds = Json::array();
            for (SubsetMask m : excl) {
                Json bj = io::to_json(subset_bounds(state.measurements(), m));
                bj["target"] = m.to_string();
                excluded_bounds.push_back(std::move(bj));
            }
            print({{"rounds", std::move(rounds)},
                   {"final_bounds_excluded", std::move(excluded_bounds)},
                   {"dataset", io::to_json(state.measurements())}});
            return kExitOk;
        }
        if (experiment->parsed()) {
            const GeneratorSpec spec = GeneratorSpec::parse(generator, p, universe, seed);
            ExperimentOptions opts;
            opts.replicates = replicates;
            opts.threads = threads;
            const ExperimentReport report = run_experiment(spec, opts);
            const Json full = io::to_json(report, terms);
            if (!out_path.empty()) io::write_json(out_path, full);
            Json summary = full;
            summary.erase("per_replicate");
            print(summary);
            return kExitOk;
        }
        if (generate_cmd->parsed()) {
            const GeneratorSpec spec = GeneratorSpec::parse(generator, p, universe, seed);
            io::write_json(out_path, io::to_json(generate(spec)));
            return kExitOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ReachError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUnavailable;
    }
    return kExitUsage;
}
