#include "reach_venn/io.hpp"

#include <cmath>
#include <fstream>

namespace reach_venn::io {
namespace {

template <typename T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ReachError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ReachError(std::string("field '") + key + "': " + e.what());
    }
}

}  // namespace

Json to_json(const ReachDataset& dataset) {
    Json j;
    j["num_bgs"] = dataset.num_bgs();
    if (dataset.universe_size()) j["universe_size"] = *dataset.universe_size();
    Json obs = Json::array();
    for (const auto& o : dataset.observations()) obs.push_back({{"subset", o.subset.to_string()}, {"reach", o.reach}});
    j["observations"] = std::move(obs);
    return j;
}

ReachDataset dataset_from_json(const Json& j) {
    const int p = field<int>(j, "num_bgs");
    std::optional<double> universe;
    if (j.contains("universe_size") && !j.at("universe_size").is_null()) universe = field<double>(j, "universe_size");
    const Json& list = j.contains("observations") ? j.at("observations") : throw ReachError("missing field 'observations'");
    if (!list.is_array()) throw ReachError("'observations' must be an array");
    std::vector<ReachObservation> obs;
    for (const Json& o : list) {
        const auto text = field<std::string>(o, "subset");
        const SubsetMask mask = SubsetMask::parse(text);
        if (mask.num_bgs() != p) throw ReachError("subset '" + text + "' does not have num_bgs characters");
        obs.push_back({mask, field<double>(o, "reach")});
    }
    return {p, universe, std::move(obs)};
}

Json d_to_json(double d) {
    if (std::isinf(d)) return "inf";
    return d;
}

double d_from_json(const Json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return kInfiniteD;
        throw ReachError("d must be a number or \"inf\"");
    }
    return j.get<double>();
}

Json to_json(const CiModel& model) {
    return {{"num_bgs", model.num_bgs},
            {"d", d_to_json(model.d)},
            {"universe_size", model.universe_size},
            {"single_bg_proportions", model.single_bg_proportions},
            {"weights", model.weights},
            {"training_residual", model.training_residual}};
}

CiModel model_from_json(const Json& j) {
    CiModel m;
    m.num_bgs = field<int>(j, "num_bgs");
    check_num_bgs(m.num_bgs);
    if (!j.contains("d")) throw ReachError("missing field 'd'");
    m.d = d_from_json(j.at("d"));
    m.universe_size = field<double>(j, "universe_size");
    m.single_bg_proportions = field<std::vector<double>>(j, "single_bg_proportions");
    m.weights = field<std::vector<double>>(j, "weights");
    m.training_residual = j.value("training_residual", 0.0);
    if (static_cast<int>(m.single_bg_proportions.size()) != m.num_bgs) throw ReachError("model needs one proportion per BG");
    if (m.weights.size() != region_count(m.num_bgs)) throw ReachError("model needs 2^P weights");
    return m;
}

Json to_json(const GroundTruth& truth) {
    const auto masks = enumerate_masks(truth.allocation.num_bgs, MaskFilter::all);
    Json j = to_json(dataset_from_truth(truth, masks));
    j["allocation"] = truth.allocation.values;
    j["generator"] = truth.generator.describe();
    j["seed"] = truth.generator.seed;
    return j;
}

GroundTruth truth_from_json(const Json& j) {
    GroundTruth t;
    const int p = field<int>(j, "num_bgs");
    t.allocation = RegionAllocation(p, field<std::vector<double>>(j, "allocation"));
    t.generator.num_bgs = p;
    t.generator.universe_size = j.contains("universe_size") ? field<double>(j, "universe_size") : t.allocation.total();
    t.generator.seed = j.value("seed", std::uint64_t{0});
    return t;
}

Json to_json(const BoundInterval& interval) {
    Json j{{"lower", interval.lower}, {"upper", interval.upper}};
    if (interval.capped) j["capped"] = true;
    return j;
}

Json to_json(const Estimate& estimate) {
    Json j{{"target", estimate.target.to_string()},
           {"point", estimate.point},
           {"interval_100", to_json(estimate.interval_100)},
           {"observed", estimate.observed}};
    if (estimate.alpha) {
        Json bar{{"alpha", *estimate.alpha}};
        if (estimate.interval_alpha) {
            bar["interval"] = to_json(*estimate.interval_alpha);
        } else {
            bar["status"] = "unavailable";
            bar["note"] = estimate.alpha_note;
        }
        j["error_bar"] = std::move(bar);
    }
    return j;
}

Json to_json(const ExperimentReport& report, bool include_terms) {
    Json j{{"generator", report.generator.describe()},
           {"num_bgs", report.generator.num_bgs},
           {"universe_size", report.generator.universe_size},
           {"seed", report.generator.seed},
           {"replicates", report.replicates},
           {"error_count", report.error_count},
           {"q90", report.q90},
           {"runtime_seconds", report.runtime_seconds}};
    Json reps = Json::array();
    for (const auto& r : report.results) {
        Json rj{{"index", r.index}, {"d", d_to_json(r.d)}, {"repaired", r.repaired}};
        Json errs = Json::array();
        for (const auto& e : r.errors) {
            if (include_terms) {
                errs.push_back({{"target", e.target.to_string()},
                                {"truth", e.truth},
                                {"estimate", e.estimate},
                                {"bounds", to_json(e.bounds)},
                                {"relative_error", std::isfinite(e.relative_error) ? Json(e.relative_error) : Json(nullptr)},
                                {"degenerate_gap", e.degenerate_gap}});
            } else {
                errs.push_back(std::isfinite(e.relative_error) ? Json(e.relative_error) : Json(nullptr));
            }
        }
        rj["relative_errors"] = std::move(errs);
        reps.push_back(std::move(rj));
    }
    j["per_replicate"] = std::move(reps);
    return j;
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ReachError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ReachError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ReachError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

ReachDataset read_dataset(const std::filesystem::path& path) { return dataset_from_json(read_json(path)); }

}  // namespace reach_venn::io
