#pragma once

#include <limits>
#include <vector>

namespace reach_venn::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Feasibility tolerance on scaled rows.
inline constexpr double kFeasTol = 1e-7;

enum class Sense { minimize, maximize };
enum class Relation { less_equal, equal, greater_equal };

struct Constraint {
    std::vector<double> coefficients;
    Relation relation = Relation::equal;
    double rhs = 0.0;
};

/// Dense linear program. Variables default to x >= 0 unless `lower` / `upper`
/// are supplied; use -kInf / kInf for free directions.
struct LinearProgram {
    Sense sense = Sense::minimize;
    std::vector<double> objective;
    std::vector<Constraint> constraints;
    std::vector<double> lower;
    std::vector<double> upper;

    [[nodiscard]] std::size_t num_vars() const { return objective.size(); }
    void add(std::vector<double> coefficients, Relation relation, double rhs) {
        constraints.push_back({std::move(coefficients), relation, rhs});
    }
};

enum class Status { optimal, infeasible, unbounded };

struct Solution {
    Status status = Status::infeasible;
    double value = 0.0;
    std::vector<double> x;
    int iterations = 0;
};

/// Two-phase dense simplex. Pivoting is deterministic (Dantzig pricing with
/// lowest-index ties, falling back to Bland's rule on degenerate stalls).
/// Throws std::invalid_argument on malformed programs; infeasible and
/// unbounded programs are reported through Solution::status.
Solution solve(const LinearProgram& program);

/// Largest constraint or bound violation of `x` (0 when feasible).
double max_violation(const LinearProgram& program, const std::vector<double>& x);

}  // namespace reach_venn::lp
