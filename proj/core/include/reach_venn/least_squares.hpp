#pragma once

#include <Eigen/Dense>

namespace reach_venn {

struct LeastSquaresResult {
    Eigen::VectorXd x;
    /// ||A x - b||^2
    double objective = 0.0;
    int iterations = 0;
};

/// Lawson-Hanson active-set NNLS: min ||A x - b||^2 subject to x >= 0.
LeastSquaresResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = 0);

/// Least squares over the capped simplex:
///   min ||b - A w||^2  subject to  w >= 0, sum(w) <= 1.
/// With a slack weight s = 1 - sum(w) the residual is sum_j w_j (b - a_j) + s b,
/// so the problem is the minimum-norm point of the convex hull of
/// {b - a_j} united with {b}. Solved exactly with Wolfe's algorithm.
LeastSquaresResult capped_simplex_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// Wolfe's minimum-norm-point algorithm. Columns of `points` are the
/// vertices; returns convex weights (summing to 1) of the nearest point to
/// the origin. `objective` is the squared norm of that point.
LeastSquaresResult min_norm_point(const Eigen::MatrixXd& points);

}  // namespace reach_venn
