#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "reach_venn/io.hpp"

using namespace reach_venn;
using fixtures::m;
using io::Json;

TEST_CASE("dataset round trip") {
    const ReachDataset ds = fixtures::five_bg_with_extras();
    const Json j = io::to_json(ds);
    CHECK(j.at("num_bgs") == 5);
    CHECK_FALSE(j.contains("universe_size"));
    CHECK(j.at("observations").front().at("subset") == "10000");
    const ReachDataset back = io::dataset_from_json(Json::parse(j.dump()));
    CHECK(back.num_bgs() == 5);
    CHECK(back.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(back.observations()[i].subset == ds.observations()[i].subset);
        CHECK(back.observations()[i].reach == ds.observations()[i].reach);
    }
    const ReachDataset with_u = io::dataset_from_json(io::to_json(ds.with_universe(5e5)));
    CHECK(with_u.universe_size() == 5e5);
}

TEST_CASE("dataset parsing rejects malformed input") {
    CHECK_THROWS_AS(io::dataset_from_json(Json::parse(R"({"observations": []})")), ReachError);
    CHECK_THROWS_AS(io::dataset_from_json(Json::parse(R"({"num_bgs": 2})")), ReachError);
    CHECK_THROWS_AS(io::dataset_from_json(Json::parse(R"({"num_bgs": 2, "observations": {}})")), ReachError);
    CHECK_THROWS_AS(io::dataset_from_json(Json::parse(R"({"num_bgs": 2, "observations": [{"subset": "101", "reach": 1}]})")),
                    ReachError);
    CHECK_THROWS_AS(io::dataset_from_json(Json::parse(R"({"num_bgs": 2, "observations": [{"subset": "10", "reach": "x"}]})")),
                    ReachError);
    CHECK_THROWS_AS(io::dataset_from_json(Json::parse(R"({"num_bgs": 2, "observations": [{"subset": "10", "reach": -1}]})")),
                    ReachError);
    CHECK_THROWS_AS(io::dataset_from_json(Json::parse("[1, 2]")), ReachError);
}

TEST_CASE("model round trip keeps predictions") {
    for (double d : {kInfiniteD, 2.5}) {
        const CiModel model = fit(fixtures::five_bg_with_extras(), d);
        const Json j = io::to_json(model);
        if (std::isinf(d)) CHECK(j.at("d") == "inf");
        const CiModel back = io::model_from_json(Json::parse(j.dump()));
        CHECK(back.d == model.d);
        CHECK(back.weights == model.weights);
        for (SubsetMask s : enumerate_masks(5, MaskFilter::all)) CHECK(predict(back, s) == predict(model, s));
    }
    Json bad = io::to_json(fit(fixtures::worked_example(), kInfiniteD));
    bad["weights"].erase(0);
    CHECK_THROWS_AS(io::model_from_json(bad), ReachError);
    CHECK_THROWS_AS(io::d_from_json(Json("infinite")), ReachError);
    CHECK(io::d_from_json(Json(3.5)) == 3.5);
    CHECK(std::isinf(io::d_from_json(io::d_to_json(kInfiniteD))));
}

TEST_CASE("ground truth round trip") {
    const GroundTruth t = generate(GeneratorSpec::parse("dirichlet:2", 4, 1000.0, 3));
    const Json j = io::to_json(t);
    CHECK(j.at("observations").size() == 15);
    const GroundTruth back = io::truth_from_json(Json::parse(j.dump()));
    CHECK(back.allocation.values == t.allocation.values);
    CHECK(back.generator.universe_size == 1000.0);
    const ReachDataset as_data = io::dataset_from_json(j);
    CHECK(as_data.reach_of(m("1010")) == doctest::Approx(true_reach(t, m("1010"))));
}

TEST_CASE("estimate and interval serialisation") {
    BoundInterval b{1, 2};
    CHECK(io::to_json(b) == Json{{"lower", 1.0}, {"upper", 2.0}});
    b.capped = true;
    CHECK(io::to_json(b).at("capped") == true);

    EstimateOptions opts;
    opts.alpha = 90.0;
    const Json basics = io::to_json(estimate_subset(fixtures::five_bg_basics(), m("11000"), opts));
    CHECK(basics.at("error_bar").at("status") == "unavailable");
    const Json full = io::to_json(estimate_subset(fixtures::five_bg_with_extras(), m("11000"), opts));
    CHECK(full.at("error_bar").contains("interval"));
    CHECK(full.at("target") == "11000");
}

TEST_CASE("files") {
    const auto dir = std::filesystem::temp_directory_path() / "reach_venn_io_test";
    std::filesystem::create_directories(dir);
    io::write_json(dir / "ds.json", io::to_json(fixtures::worked_example()));
    CHECK(io::read_dataset(dir / "ds.json").size() == 5);
    std::ofstream(dir / "broken.json") << "{not json";
    CHECK_THROWS_AS(io::read_json(dir / "broken.json"), ReachError);
    CHECK_THROWS_AS(io::read_json(dir / "missing.json"), ReachError);
    std::filesystem::remove_all(dir);
}
