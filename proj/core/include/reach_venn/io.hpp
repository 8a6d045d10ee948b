#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "reach_venn/bounds.hpp"
#include "reach_venn/ci_model.hpp"
#include "reach_venn/experiment.hpp"
#include "reach_venn/pipeline.hpp"
#include "reach_venn/synth.hpp"

namespace reach_venn::io {

using Json = nlohmann::json;

/// {num_bgs, universe_size?, observations: [{subset: "x1...xP", reach}]}
Json to_json(const ReachDataset& dataset);
ReachDataset dataset_from_json(const Json& j);

/// {num_bgs, d ("inf" when infinite), universe_size, single_bg_proportions, weights, training_residual}
Json to_json(const CiModel& model);
CiModel model_from_json(const Json& j);

/// Dataset of every non-zero mask plus the full `allocation` over 2^P regions.
Json to_json(const GroundTruth& truth);
GroundTruth truth_from_json(const Json& j);

Json to_json(const BoundInterval& interval);
Json to_json(const Estimate& estimate);
Json to_json(const ExperimentReport& report, bool include_terms = false);

/// d as a JSON value: a number, or the string "inf".
Json d_to_json(double d);
double d_from_json(const Json& j);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

ReachDataset read_dataset(const std::filesystem::path& path);

}  // namespace reach_venn::io
