#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "reach_venn/lp.hpp"

using namespace reach_venn::lp;

namespace {

LinearProgram one_var_max() {
    LinearProgram lp;
    lp.sense = Sense::maximize;
    lp.objective = {1.0};
    lp.lower = {-kInf};
    lp.upper = {kInf};
    return lp;
}

// Best objective over all vertices of {A x <= b, 0 <= x <= box} in two variables.
std::optional<double> vertex_oracle(const std::vector<std::array<double, 3>>& rows, double c0, double c1, double box) {
    std::vector<std::array<double, 3>> all = rows;  // a0 x + a1 y <= r
    all.push_back({-1, 0, 0});
    all.push_back({0, -1, 0});
    all.push_back({1, 0, box});
    all.push_back({0, 1, box});
    std::optional<double> best;
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const double det = all[i][0] * all[j][1] - all[i][1] * all[j][0];
            if (std::abs(det) < 1e-12) continue;
            const double x = (all[i][2] * all[j][1] - all[i][1] * all[j][2]) / det;
            const double y = (all[i][0] * all[j][2] - all[i][2] * all[j][0]) / det;
            bool ok = true;
            for (const auto& r : all) ok = ok && r[0] * x + r[1] * y <= r[2] + 1e-9;
            if (ok) {
                const double v = c0 * x + c1 * y;
                if (!best || v > *best) best = v;
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("max t with two upper limits") {
    LinearProgram lp = one_var_max();
    lp.add({1.0}, Relation::less_equal, 3.0);
    lp.add({1.0}, Relation::less_equal, 5.0);
    const Solution s = solve(lp);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.value == doctest::Approx(3.0));
}

TEST_CASE("negative optimum is not infeasibility") {
    LinearProgram lp;
    lp.sense = Sense::maximize;
    lp.objective = {0.0, 1.0};  // x1, t
    lp.lower = {-kInf, -kInf};
    lp.upper = {kInf, kInf};
    lp.add({1.0, 0.0}, Relation::equal, -1.0);
    lp.add({-1.0, 1.0}, Relation::less_equal, 0.0);
    const Solution s = solve(lp);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.value == doctest::Approx(-1.0));
    CHECK(s.x[0] == doctest::Approx(-1.0));
}

TEST_CASE("min with an equality") {
    LinearProgram lp;
    lp.objective = {1.0, 0.0};
    lp.add({1.0, 1.0}, Relation::equal, 10.0);
    const Solution s = solve(lp);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.value == doctest::Approx(0.0));
    CHECK(s.x[1] == doctest::Approx(10.0));
}

TEST_CASE("textbook maximisation") {
    LinearProgram lp;
    lp.sense = Sense::maximize;
    lp.objective = {3.0, 5.0};
    lp.add({1.0, 0.0}, Relation::less_equal, 4.0);
    lp.add({0.0, 2.0}, Relation::less_equal, 12.0);
    lp.add({3.0, 2.0}, Relation::less_equal, 18.0);
    const Solution s = solve(lp);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.value == doctest::Approx(36.0));
    CHECK(s.x[0] == doctest::Approx(2.0));
    CHECK(s.x[1] == doctest::Approx(6.0));
    CHECK(max_violation(lp, s.x) < 1e-9);
}

TEST_CASE("infeasible and unbounded are reported, not thrown") {
    LinearProgram inf;
    inf.objective = {1.0};
    inf.add({1.0}, Relation::greater_equal, 5.0);
    inf.add({1.0}, Relation::less_equal, 4.0);
    CHECK(solve(inf).status == Status::infeasible);

    LinearProgram neg;
    neg.objective = {1.0, 1.0};
    neg.add({1.0, 1.0}, Relation::equal, -1.0);
    CHECK(solve(neg).status == Status::infeasible);

    LinearProgram unb;
    unb.sense = Sense::maximize;
    unb.objective = {1.0, 1.0};
    unb.add({1.0, -1.0}, Relation::less_equal, 1.0);
    CHECK(solve(unb).status == Status::unbounded);

    LinearProgram bad;
    bad.objective = {1.0};
    bad.add({1.0, 2.0}, Relation::less_equal, 1.0);
    CHECK_THROWS_AS(solve(bad), std::invalid_argument);
}

TEST_CASE("variable bounds and free variables") {
    LinearProgram lp;
    lp.objective = {1.0, -1.0};
    lp.lower = {-3.0, -kInf};
    lp.upper = {kInf, 2.0};
    const Solution s = solve(lp);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.value == doctest::Approx(-5.0));
    CHECK(s.x[0] == doctest::Approx(-3.0));
    CHECK(s.x[1] == doctest::Approx(2.0));

    LinearProgram box;
    box.sense = Sense::maximize;
    box.objective = {1.0};
    box.lower = {1.0};
    box.upper = {4.0};
    CHECK(solve(box).value == doctest::Approx(4.0));
}

TEST_CASE("degenerate program that cycles under naive pricing") {
    LinearProgram lp;
    lp.objective = {-0.75, 150.0, -0.02, 6.0};
    lp.add({0.25, -60.0, -0.04, 9.0}, Relation::less_equal, 0.0);
    lp.add({0.5, -90.0, -0.02, 3.0}, Relation::less_equal, 0.0);
    lp.add({0.0, 0.0, 1.0, 0.0}, Relation::less_equal, 1.0);
    const Solution s = solve(lp);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.value == doctest::Approx(-0.05));
}

TEST_CASE("redundant equalities") {
    LinearProgram lp;
    lp.sense = Sense::maximize;
    lp.objective = {1.0, 2.0, 0.0};
    lp.add({1.0, 1.0, 1.0}, Relation::equal, 4.0);
    lp.add({2.0, 2.0, 2.0}, Relation::equal, 8.0);
    lp.add({0.0, 1.0, 0.0}, Relation::less_equal, 3.0);
    const Solution s = solve(lp);
    REQUIRE(s.status == Status::optimal);
    CHECK(s.value == doctest::Approx(7.0));
}

TEST_CASE("random two-variable programs agree with vertex enumeration") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_real_distribution<double> rhs(-2.0, 6.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::array<double, 3>> rows;
        LinearProgram lp;
        lp.sense = Sense::maximize;
        const double c0 = coef(rng), c1 = coef(rng);
        lp.objective = {c0, c1};
        lp.upper = {10.0, 10.0};
        lp.lower = {0.0, 0.0};
        const int count = 1 + trial % 5;
        for (int k = 0; k < count; ++k) {
            rows.push_back({coef(rng), coef(rng), rhs(rng)});
            lp.add({rows.back()[0], rows.back()[1]}, Relation::less_equal, rows.back()[2]);
        }
        const auto oracle = vertex_oracle(rows, c0, c1, 10.0);
        const Solution s = solve(lp);
        if (!oracle) {
            CHECK(s.status == Status::infeasible);
        } else {
            REQUIRE(s.status == Status::optimal);
            CHECK(s.value == doctest::Approx(*oracle).epsilon(1e-9).scale(1.0));
            CHECK(max_violation(lp, s.x) < 1e-7);
        }
    }
}

TEST_CASE("solutions are reproducible") {
    LinearProgram lp;
    lp.sense = Sense::maximize;
    lp.objective = {1.0, 1.0, 1.0};
    lp.add({1.0, 1.0, 1.0}, Relation::less_equal, 1.0);
    const Solution a = solve(lp), b = solve(lp);
    CHECK(a.x == b.x);
    CHECK(a.iterations == b.iterations);
}
