#include "reach_venn/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace reach_venn::lp {
namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-10;
constexpr double kZeroClean = 1e-14;
constexpr int kDegenerateStall = 50;

// One structural column of the standard-form program: x_var += sign * column.
struct ColumnMap {
    std::size_t var;
    double sign;
};

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

    double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, cols_); }
    double& cost(std::size_t c) { return at(rows_, c); }
    double objective_value() const { return -at(rows_, cols_); }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void set_costs(const std::vector<double>& costs) {
        for (std::size_t c = 0; c <= cols_; ++c) at(rows_, c) = c < cols_ ? costs[c] : 0.0;
        for (std::size_t r = 0; r < rows_; ++r) {
            const double cb = costs[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t c = 0; c <= cols_; ++c) at(rows_, c) -= cb * at(r, c);
        }
    }

    void pivot(std::size_t pr, std::size_t pc) {
        const double inv = 1.0 / at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) *= inv;
        at(pr, pc) = 1.0;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            double* row = &data_[r * (cols_ + 1)];
            const double* prow = &data_[pr * (cols_ + 1)];
            for (std::size_t c = 0; c <= cols_; ++c) {
                row[c] -= f * prow[c];
                if (std::abs(row[c]) < kZeroClean) row[c] = 0.0;
            }
            row[pc] = 0.0;
        }
        basis_[pr] = pc;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
};

enum class RunResult { optimal, unbounded };

// Minimizes the cost row over columns with allowed[c] == true.
RunResult run_simplex(Tableau& t, const std::vector<bool>& allowed, int& iterations, int max_iterations) {
    double cost_scale = 1.0;
    for (std::size_t c = 0; c < t.cols(); ++c) cost_scale = std::max(cost_scale, std::abs(t.cost(c)));
    const double cost_tol = kCostTol * cost_scale;
    int stall = 0;
    while (true) {
        if (iterations++ > max_iterations) throw std::runtime_error("simplex iteration limit exceeded");
        const bool bland = stall >= kDegenerateStall;
        std::size_t enter = t.cols();
        double best = -cost_tol;
        for (std::size_t c = 0; c < t.cols(); ++c) {
            if (!allowed[c]) continue;
            const double rc = t.cost(c);
            if (rc < best) {
                enter = c;
                if (bland) break;
                best = rc;
            }
        }
        if (enter == t.cols()) return RunResult::optimal;

        std::size_t leave = t.rows();
        double best_ratio = kInf;
        double best_pivot = 0.0;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const double a = t.at(r, enter);
            if (a <= kPivotTol) continue;
            const double ratio = std::max(0.0, t.rhs(r)) / a;
            const double slack = 1e-12 * std::max(1.0, best_ratio == kInf ? 0.0 : best_ratio);
            if (leave == t.rows() || ratio < best_ratio - slack) {
                leave = r;
                best_ratio = ratio;
                best_pivot = a;
            } else if (ratio <= best_ratio + slack) {
                const bool take = bland ? t.basis()[r] < t.basis()[leave] : a > best_pivot;
                if (take) {
                    leave = r;
                    best_ratio = std::min(best_ratio, ratio);
                    best_pivot = a;
                }
            }
        }
        if (leave == t.rows()) return RunResult::unbounded;
        stall = best_ratio * std::abs(t.cost(enter)) <= 1e-15 ? stall + 1 : 0;
        t.pivot(leave, enter);
    }
}

void validate(const LinearProgram& lp) {
    const std::size_t n = lp.num_vars();
    if (!lp.lower.empty() && lp.lower.size() != n) throw std::invalid_argument("lower bound size mismatch");
    if (!lp.upper.empty() && lp.upper.size() != n) throw std::invalid_argument("upper bound size mismatch");
    for (double c : lp.objective) {
        if (!std::isfinite(c)) throw std::invalid_argument("objective coefficient is not finite");
    }
    for (const auto& row : lp.constraints) {
        if (row.coefficients.size() != n) throw std::invalid_argument("constraint width mismatch");
        if (!std::isfinite(row.rhs)) throw std::invalid_argument("constraint rhs is not finite");
        for (double a : row.coefficients) {
            if (!std::isfinite(a)) throw std::invalid_argument("constraint coefficient is not finite");
        }
    }
    for (std::size_t i = 0; i < lp.lower.size(); ++i) {
        if (std::isnan(lp.lower[i]) || lp.lower[i] == kInf) throw std::invalid_argument("invalid lower bound");
    }
    for (std::size_t i = 0; i < lp.upper.size(); ++i) {
        if (std::isnan(lp.upper[i]) || lp.upper[i] == -kInf) throw std::invalid_argument("invalid upper bound");
    }
}

}  // namespace

Solution solve(const LinearProgram& lp) {
    validate(lp);
    const std::size_t n = lp.num_vars();
    auto lower_of = [&](std::size_t i) { return lp.lower.empty() ? 0.0 : lp.lower[i]; };
    auto upper_of = [&](std::size_t i) { return lp.upper.empty() ? kInf : lp.upper[i]; };

    // Substitute every variable by offset + sum of non-negative columns.
    std::vector<ColumnMap> columns;
    std::vector<double> offset(n, 0.0);
    struct BoundRow {
        std::size_t column;
        double rhs;
    };
    std::vector<BoundRow> bound_rows;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = lower_of(i);
        const double hi = upper_of(i);
        if (std::isfinite(lo)) {
            offset[i] = lo;
            columns.push_back({i, 1.0});
            if (std::isfinite(hi)) bound_rows.push_back({columns.size() - 1, hi - lo});
        } else if (std::isfinite(hi)) {
            offset[i] = hi;
            columns.push_back({i, -1.0});
        } else {
            columns.push_back({i, 1.0});
            columns.push_back({i, -1.0});
        }
    }
    const std::size_t structural = columns.size();

    struct Row {
        std::vector<double> a;  // over structural columns
        Relation relation;
        double rhs;
    };
    std::vector<Row> rows;
    rows.reserve(lp.constraints.size() + bound_rows.size());
    for (const auto& con : lp.constraints) {
        Row row{std::vector<double>(structural, 0.0), con.relation, con.rhs};
        for (std::size_t c = 0; c < structural; ++c) row.a[c] = con.coefficients[columns[c].var] * columns[c].sign;
        for (std::size_t i = 0; i < n; ++i) row.rhs -= con.coefficients[i] * offset[i];
        double scale = 0.0;
        for (double v : row.a) scale = std::max(scale, std::abs(v));
        if (scale > 0.0) {
            for (double& v : row.a) v /= scale;
            row.rhs /= scale;
        }
        rows.push_back(std::move(row));
    }
    for (const auto& br : bound_rows) {
        Row row{std::vector<double>(structural, 0.0), Relation::less_equal, br.rhs};
        row.a[br.column] = 1.0;
        rows.push_back(std::move(row));
    }

    // Empty rows are checked directly and dropped.
    std::vector<Row> kept;
    for (auto& row : rows) {
        const bool empty = std::all_of(row.a.begin(), row.a.end(), [](double v) { return v == 0.0; });
        if (!empty) {
            kept.push_back(std::move(row));
            continue;
        }
        const bool ok = (row.relation == Relation::equal && std::abs(row.rhs) <= kFeasTol) ||
                        (row.relation == Relation::less_equal && row.rhs >= -kFeasTol) ||
                        (row.relation == Relation::greater_equal && row.rhs <= kFeasTol);
        if (!ok) return Solution{Status::infeasible, 0.0, {}, 0};
    }
    rows = std::move(kept);

    const std::size_t m = rows.size();
    std::size_t slack_count = 0;
    for (const auto& row : rows) slack_count += row.relation != Relation::equal ? 1 : 0;

    // Artificials are needed where no +1 slack can start in the basis.
    std::vector<bool> needs_artificial(m, false);
    std::size_t artificial_count = 0;
    for (std::size_t r = 0; r < m; ++r) {
        const auto& row = rows[r];
        double slack_sign = row.relation == Relation::less_equal ? 1.0 : row.relation == Relation::greater_equal ? -1.0 : 0.0;
        if (row.rhs < 0.0) slack_sign = -slack_sign;
        if (slack_sign <= 0.0) {
            needs_artificial[r] = true;
            ++artificial_count;
        }
    }

    const std::size_t total_cols = structural + slack_count + artificial_count;
    Tableau t(m, total_cols);
    std::size_t next_slack = structural;
    std::size_t next_art = structural + slack_count;
    for (std::size_t r = 0; r < m; ++r) {
        const auto& row = rows[r];
        const double flip = row.rhs < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < structural; ++c) t.at(r, c) = flip * row.a[c];
        t.rhs(r) = flip * row.rhs;
        std::size_t slack_col = total_cols;
        if (row.relation != Relation::equal) {
            slack_col = next_slack++;
            t.at(r, slack_col) = flip * (row.relation == Relation::less_equal ? 1.0 : -1.0);
        }
        if (needs_artificial[r]) {
            const std::size_t a = next_art++;
            t.at(r, a) = 1.0;
            t.basis()[r] = a;
        } else {
            t.basis()[r] = slack_col;
        }
    }

    int iterations = 0;
    const int max_iterations = 100000 + 50 * static_cast<int>(m + total_cols);
    const std::size_t first_art = structural + slack_count;

    if (artificial_count > 0) {
        std::vector<double> phase1(total_cols, 0.0);
        for (std::size_t c = first_art; c < total_cols; ++c) phase1[c] = 1.0;
        t.set_costs(phase1);
        std::vector<bool> allowed(total_cols, true);
        run_simplex(t, allowed, iterations, max_iterations);
        if (t.objective_value() > kFeasTol) return Solution{Status::infeasible, 0.0, {}, iterations};
        // Drive zero-valued artificials out of the basis where possible.
        for (std::size_t r = 0; r < m; ++r) {
            if (t.basis()[r] < first_art) continue;
            std::size_t best = total_cols;
            double best_abs = kPivotTol;
            for (std::size_t c = 0; c < first_art; ++c) {
                if (std::abs(t.at(r, c)) > best_abs) {
                    best_abs = std::abs(t.at(r, c));
                    best = c;
                }
            }
            if (best != total_cols) {
                t.pivot(r, best);
            } else {
                // Redundant row.
                for (std::size_t c = 0; c <= total_cols; ++c) t.at(r, c) = 0.0;
                t.at(r, t.basis()[r]) = 1.0;
            }
        }
    }

    const double sense = lp.sense == Sense::maximize ? -1.0 : 1.0;
    std::vector<double> costs(total_cols, 0.0);
    for (std::size_t c = 0; c < structural; ++c) costs[c] = sense * lp.objective[columns[c].var] * columns[c].sign;
    t.set_costs(costs);
    std::vector<bool> allowed(total_cols, true);
    for (std::size_t c = first_art; c < total_cols; ++c) allowed[c] = false;
    const RunResult result = run_simplex(t, allowed, iterations, max_iterations);
    if (result == RunResult::unbounded) return Solution{Status::unbounded, 0.0, {}, iterations};

    std::vector<double> col_value(total_cols, 0.0);
    for (std::size_t r = 0; r < m; ++r) col_value[t.basis()[r]] = std::max(0.0, t.rhs(r));
    std::vector<double> x = offset;
    for (std::size_t c = 0; c < structural; ++c) x[columns[c].var] += columns[c].sign * col_value[c];
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) value += lp.objective[i] * x[i];
    return Solution{Status::optimal, value, std::move(x), iterations};
}

double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lo = lp.lower.empty() ? 0.0 : lp.lower[i];
        const double hi = lp.upper.empty() ? kInf : lp.upper[i];
        worst = std::max({worst, lo - x[i], x[i] - hi});
    }
    for (const auto& con : lp.constraints) {
        double lhs = 0.0;
        double scale = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            lhs += con.coefficients[i] * x[i];
            scale = std::max(scale, std::abs(con.coefficients[i]));
        }
        if (scale == 0.0) scale = 1.0;
        const double diff = (lhs - con.rhs) / scale;
        switch (con.relation) {
            case Relation::equal: worst = std::max(worst, std::abs(diff)); break;
            case Relation::less_equal: worst = std::max(worst, diff); break;
            case Relation::greater_equal: worst = std::max(worst, -diff); break;
        }
    }
    return worst;
}

}  // namespace reach_venn::lp
