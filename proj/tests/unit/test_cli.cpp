#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "reach_venn/io.hpp"

using namespace reach_venn;
using fixtures::m;
using io::Json;

namespace {

namespace fs = std::filesystem;

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(REACH_VENN_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("reach_venn_cli_" + std::to_string(::getpid()))) { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
    [[nodiscard]] std::string write(const std::string& name, const ReachDataset& ds) const {
        io::write_json(path / name, io::to_json(ds));
        return (path / name).string();
    }
    [[nodiscard]] std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("check") {
    TempDir tmp;
    const std::string bad = tmp.write("bad.json", fixtures::worked_example().with({m("101"), 3500}));
    const Run r = run("check " + bad);
    CHECK(r.code == 2);
    CHECK(Json::parse(r.out).at("status") == "inconsistent");

    CHECK(run("check " + tmp.write("good.json", fixtures::worked_example())).code == 0);

    const Run fix = run("check " + bad + " --repair " + tmp.file("fixed.json"));
    CHECK(fix.code == 2);
    CHECK(run("check " + tmp.file("fixed.json")).code == 0);

    CHECK(run("check " + tmp.file("missing.json")).code == 64);
    CHECK(run("check").code == 64);
    CHECK(run("frobnicate").code == 64);
}

TEST_CASE("bounds") {
    TempDir tmp;
    const std::string ex = tmp.write("ex.json", fixtures::worked_example());
    const Run r = run("bounds " + ex + " --target 101");
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j.at("lower").get<double>() == doctest::Approx(5000));
    CHECK(j.at("upper").get<double>() == doctest::Approx(6000));

    const std::string basics = tmp.write("basics.json", ReachDataset(3, std::nullopt,
        {{m("100"), 3000}, {m("010"), 3000}, {m("001"), 3000}, {m("111"), 7000}}));
    const Run all = run("bounds " + basics + " --all");
    REQUIRE(all.code == 0);
    const Json list = Json::parse(all.out);
    CHECK(list.size() == 7);
    for (const auto& item : list) {
        if (item.at("observed").get<bool>()) CHECK(item.at("lower").get<double>() == doctest::Approx(item.at("upper").get<double>()));
    }

    CHECK(run("bounds " + ex).code == 64);
    CHECK(run("bounds " + ex + " --target 101 --all").code == 64);
    CHECK(run("bounds " + ex + " --target 10").code != 0);
    CHECK(run("bounds " + tmp.write("inc.json", fixtures::worked_example().with({m("101"), 3500})) + " --target 110").code == 2);
}

TEST_CASE("curve") {
    TempDir tmp;
    const Run extras = run("curve " + tmp.write("x.json", fixtures::five_bg_with_extras()) + " --order 1,2,3,4,5 --mode free");
    REQUIRE(extras.code == 0);
    std::istringstream lines(extras.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "prefix_length,prefix,lower,upper,traced");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    REQUIRE(rows.size() == 3);
    CHECK(rows[2][1] == "11110");
    CHECK(std::stod(rows[2][2]) >= 244000 - 1e-4 * 500000);
    CHECK(std::stod(rows[2][3]) <= 336160 + 1e-6);

    const Run basics = run("curve " + tmp.write("b.json", fixtures::five_bg_basics()) + " --mode free");
    REQUIRE(basics.code == 0);
    std::istringstream bl(basics.out);
    std::getline(bl, line);
    int count = 0;
    while (std::getline(bl, line)) {
        ++count;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        REQUIRE(cells.size() >= 4);
        const double lower = std::stod(cells[2]), upper = std::stod(cells[3]);
        CHECK(lower >= 100000 - 1e-6);
        CHECK(upper <= 336160 + 1e-6);
        if (count == 1) CHECK(lower == doctest::Approx(100000));
        if (count == 3) CHECK(upper == doctest::Approx(336160));
    }
    CHECK(count == 3);

    const Run upper = run("curve " + tmp.file("b.json") + " --order 5,4,3,2,1 --mode upper");
    CHECK(upper.code == 0);
    CHECK(run("curve " + tmp.file("b.json") + " --order 1,1,2,3,4").code != 0);
    CHECK(run("curve " + tmp.file("b.json") + " --mode sideways").code == 64);
}

TEST_CASE("fit and predict") {
    TempDir tmp;
    const std::string u = tmp.write("u.json", fixtures::five_bg_with_extras().with_universe(500000.0));
    const Run p = run("predict " + u + " --target 10001 --d inf");
    REQUIRE(p.code == 0);
    const Json pj = Json::parse(p.out);
    CHECK(std::abs(pj.at("point").get<double>() - 180000) <= 1e-6 * 500000);
    CHECK(pj.at("d") == "inf");

    const Run f = run("fit " + u + " --d auto --out " + tmp.file("model.json"));
    REQUIRE(f.code == 0);
    const Json fj = Json::parse(f.out);
    CHECK(fj.at("d_source") == "cross_validation");
    const double d = fj.at("model").at("d").get<double>();
    const auto grid = DGrid{}.values();
    CHECK(std::any_of(grid.begin(), grid.end(), [&](double g) { return effective_d(g) == d; }));
    const CiModel model = io::model_from_json(io::read_json(tmp.file("model.json")));
    CHECK(model.d == d);

    const Run a = run("predict " + tmp.write("basics.json", fixtures::five_bg_basics()) + " --target 11000 --alpha 90");
    CHECK(a.code == 3);
    CHECK(Json::parse(a.out).at("error_bar").at("status") == "unavailable");

    const Run bar = run("predict " + u + " --target 11000 --alpha 90");
    REQUIRE(bar.code == 0);
    CHECK(Json::parse(bar.out).at("error_bar").contains("interval"));

    CHECK(run("predict " + u + " --target 11000 --d 0.5").code != 0);
    CHECK(run("predict " + u).code == 64);
}

TEST_CASE("select") {
    TempDir tmp;
    const std::string basics = tmp.write("b.json", fixtures::five_bg_basics(500000.0));
    CHECK(run("generate --generator independent:0.2 --p 5 --universe 500000 --out " + tmp.file("truth.json")).code == 0);
    const Run one = run("select " + basics + " --budget 1 --truth " + tmp.file("truth.json"));
    REQUIRE(one.code == 0);
    const Json j = Json::parse(one.out);
    REQUIRE(j.at("rounds").size() == 1);
    const Json& round = j.at("rounds").front();
    double widest = 0.0;
    for (const auto& c : round.at("candidates")) widest = std::max(widest, c.at("upper").get<double>() - c.at("lower").get<double>());
    CHECK(round.at("gap").get<double>() == doctest::Approx(widest));
    CHECK(round.at("selected") == "11100");
    CHECK(round.at("measured").get<double>() == doctest::Approx(244000));

    const std::string small = tmp.write("s.json", fixtures::worked_example().without(m("011")));
    const std::string all = tmp.write("all.json", fixtures::worked_example().with({m("110"), 5000}).with({m("101"), 5000}));
    const Run many = run("select " + small + " --budget 10 --truth " + all);
    CHECK(many.code == 0);
    CHECK(Json::parse(many.out).at("rounds").size() == 3);

    const Run excl = run("select " + small + " --budget 10 --truth " + all + " --exclude 110 101");
    REQUIRE(excl.code == 0);
    const Json ej = Json::parse(excl.out);
    CHECK(ej.at("rounds").size() == 1);
    CHECK(ej.at("final_bounds_excluded").size() == 2);
}

TEST_CASE("experiment and generate") {
    TempDir tmp;
    const std::string args = "experiment --generator dirichlet:2 --p 4 --replicates 3 --seed 9 --threads 2";
    const Run a = run(args + " --out " + tmp.file("rep.json"));
    REQUIRE(a.code == 0);
    const Json summary = Json::parse(a.out);
    CHECK(summary.at("replicates") == 3);
    CHECK(summary.at("error_count") == 3 * 6);
    CHECK_FALSE(summary.contains("per_replicate"));
    const Json full = io::read_json(tmp.file("rep.json"));
    CHECK(full.at("per_replicate").size() == 3);

    const Run b = run(args);
    CHECK(Json::parse(b.out).at("q90") == summary.at("q90"));

    const Run one = run("experiment --generator dirichlet:2 --p 4 --replicates 1 --seed 9 --out " + tmp.file("one.json"));
    REQUIRE(one.code == 0);
    const Json oj = io::read_json(tmp.file("one.json"));
    CHECK(oj.at("per_replicate").at(0).at("relative_errors") == full.at("per_replicate").at(0).at("relative_errors"));

    CHECK(run("experiment --generator bogus --p 4 --replicates 1").code != 0);
    CHECK(run("experiment --p 2").code == 64);

    REQUIRE(run("generate --generator ci --p 4 --seed 3 --out " + tmp.file("t.json")).code == 0);
    const GroundTruth t = io::truth_from_json(io::read_json(tmp.file("t.json")));
    CHECK(t.allocation.values.size() == 16);
    REQUIRE(run("generate --generator ci --p 4 --seed 3 --out " + tmp.file("t2.json")).code == 0);
    CHECK(io::read_json(tmp.file("t.json")) == io::read_json(tmp.file("t2.json")));
}
