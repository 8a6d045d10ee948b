#include "reach_venn/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace reach_venn {
namespace {

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& a, const std::vector<Eigen::Index>& cols) {
    Eigen::MatrixXd out(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
    return out;
}

}  // namespace

LeastSquaresResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (b.size() != m) throw std::invalid_argument("nnls: dimension mismatch");
    if (max_iterations <= 0) max_iterations = static_cast<int>(30 * std::max<Eigen::Index>(n, 1)) + 100;

    const double tol = 10.0 * std::numeric_limits<double>::epsilon() * a.cwiseAbs().colwise().sum().maxCoeff() *
                       static_cast<double>(std::max(m, n));

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    int iterations = 0;

    while (iterations < max_iterations) {
        const Eigen::VectorXd w = a.transpose() * (b - a * x);
        Eigen::Index enter = -1;
        double best = tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && w(j) > best) {
                best = w(j);
                enter = j;
            }
        }
        if (enter < 0) break;
        passive[static_cast<std::size_t>(enter)] = true;

        while (iterations++ < max_iterations) {
            std::vector<Eigen::Index> cols;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
            }
            const Eigen::MatrixXd ap = gather_columns(a, cols);
            const Eigen::VectorXd sp = ap.colPivHouseholderQr().solve(b);

            bool all_positive = true;
            for (Eigen::Index k = 0; k < sp.size(); ++k) {
                if (sp(k) <= tol) all_positive = false;
            }
            if (all_positive) {
                x.setZero();
                for (std::size_t k = 0; k < cols.size(); ++k) x(cols[k]) = sp(static_cast<Eigen::Index>(k));
                break;
            }

            double alpha = 1.0;
            for (std::size_t k = 0; k < cols.size(); ++k) {
                const double s = sp(static_cast<Eigen::Index>(k));
                const double xv = x(cols[k]);
                if (s <= tol && xv - s > 0.0) alpha = std::min(alpha, xv / (xv - s));
            }
            for (std::size_t k = 0; k < cols.size(); ++k) {
                const Eigen::Index j = cols[k];
                x(j) += alpha * (sp(static_cast<Eigen::Index>(k)) - x(j));
                if (x(j) <= tol) {
                    x(j) = 0.0;
                    passive[static_cast<std::size_t>(j)] = false;
                }
            }
        }
    }

    x = x.cwiseMax(0.0);
    return {x, (a * x - b).squaredNorm(), iterations};
}

LeastSquaresResult min_norm_point(const Eigen::MatrixXd& points) {
    const Eigen::Index dim = points.rows();
    const Eigen::Index count = points.cols();
    if (count == 0) throw std::invalid_argument("min_norm_point: no points");

    double max_norm2 = 0.0;
    Eigen::Index start = 0;
    double start_norm2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < count; ++j) {
        const double nn = points.col(j).squaredNorm();
        max_norm2 = std::max(max_norm2, nn);
        if (nn < start_norm2) {
            start_norm2 = nn;
            start = j;
        }
    }
    const double gap_tol = 1e-14 * std::max(1.0, max_norm2);
    constexpr double weight_tol = 1e-12;

    std::vector<Eigen::Index> corral{start};
    std::vector<double> lambda{1.0};
    Eigen::VectorXd x = points.col(start);
    int iterations = 0;
    const int max_iterations = 50 * static_cast<int>(count + dim) + 1000;

    while (iterations++ < max_iterations) {
        const double xx = x.squaredNorm();
        if (xx <= 1e-30) break;
        const Eigen::VectorXd proj = points.transpose() * x;
        Eigen::Index enter = 0;
        proj.minCoeff(&enter);
        if (xx - proj(enter) <= gap_tol) break;
        if (std::find(corral.begin(), corral.end(), enter) != corral.end()) break;
        corral.push_back(enter);
        lambda.push_back(0.0);

        while (iterations++ < max_iterations) {
            // Affine minimizer of the corral: p0 + D mu with D = [p_i - p0].
            const std::size_t k = corral.size();
            Eigen::VectorXd v(static_cast<Eigen::Index>(k));
            if (k == 1) {
                v(0) = 1.0;
            } else {
                Eigen::MatrixXd diffs(dim, static_cast<Eigen::Index>(k - 1));
                const Eigen::VectorXd p0 = points.col(corral[0]);
                for (std::size_t i = 1; i < k; ++i) diffs.col(static_cast<Eigen::Index>(i - 1)) = points.col(corral[i]) - p0;
                const Eigen::VectorXd mu = diffs.completeOrthogonalDecomposition().solve(-p0);
                v(0) = 1.0 - mu.sum();
                v.tail(static_cast<Eigen::Index>(k - 1)) = mu;
            }

            if ((v.array() > weight_tol).all()) {
                for (std::size_t i = 0; i < k; ++i) lambda[i] = v(static_cast<Eigen::Index>(i));
                break;
            }
            double theta = 1.0;
            for (std::size_t i = 0; i < k; ++i) {
                const double vi = v(static_cast<Eigen::Index>(i));
                if (vi <= weight_tol && lambda[i] - vi > 0.0) theta = std::min(theta, lambda[i] / (lambda[i] - vi));
            }
            for (std::size_t i = 0; i < k; ++i) {
                lambda[i] = theta * v(static_cast<Eigen::Index>(i)) + (1.0 - theta) * lambda[i];
            }
            std::vector<Eigen::Index> kept;
            std::vector<double> kept_lambda;
            for (std::size_t i = 0; i < k; ++i) {
                if (lambda[i] > weight_tol) {
                    kept.push_back(corral[i]);
                    kept_lambda.push_back(lambda[i]);
                }
            }
            if (kept.empty()) {
                // Numerical corner: keep the best remaining vertex.
                kept.push_back(corral.back());
                kept_lambda.push_back(1.0);
            }
            corral = std::move(kept);
            lambda = std::move(kept_lambda);
        }
        double total = 0.0;
        for (double l : lambda) total += l;
        x.setZero();
        for (std::size_t i = 0; i < corral.size(); ++i) {
            lambda[i] /= total;
            x += lambda[i] * points.col(corral[i]);
        }
    }

    Eigen::VectorXd weights = Eigen::VectorXd::Zero(count);
    for (std::size_t i = 0; i < corral.size(); ++i) weights(corral[i]) += lambda[i];
    return {weights, x.squaredNorm(), iterations};
}

LeastSquaresResult capped_simplex_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    if (b.size() != a.rows()) throw std::invalid_argument("capped_simplex_least_squares: dimension mismatch");
    const Eigen::Index n = a.cols();
    Eigen::MatrixXd points(a.rows(), n + 1);
    points.leftCols(n) = (-a).colwise() + b;
    points.col(n) = b;
    auto hull = min_norm_point(points);
    Eigen::VectorXd w = hull.x.head(n).cwiseMax(0.0);
    const double sum = w.sum();
    if (sum > 1.0) w /= sum;
    return {w, (b - a * w).squaredNorm(), hull.iterations};
}

}  // namespace reach_venn
