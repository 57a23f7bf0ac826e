#pragma once

// Independent reference computations used by the unit and acceptance
// suites. None of these call into the code paths they check.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

/// IoU of two integer boxes by counting covered unit pixels on a grid.
inline double pixel_iou(int ax, int ay, int aw, int ah, int bx, int by, int bw, int bh) {
    const int x0 = std::min(ax, bx), y0 = std::min(ay, by);
    const int x1 = std::max(ax + aw, bx + bw), y1 = std::max(ay + ah, by + bh);
    long inter = 0, uni = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const bool in_a = x >= ax && x < ax + aw && y >= ay && y < ay + ah;
            const bool in_b = x >= bx && x < bx + bw && y >= by && y < by + bh;
            inter += in_a && in_b;
            uni += in_a || in_b;
        }
    }
    return double(inter) / double(uni);
}

/// Minimum total cost over all injective row->column (or column->row)
/// matchings of a rectangular matrix, by enumerating permutations.
inline double brute_force_min_cost(const Eigen::MatrixXd& c) {
    const bool transpose = c.rows() > c.cols();
    const Eigen::MatrixXd m = transpose ? Eigen::MatrixXd(c.transpose()) : c;
    const int rows = int(m.rows()), cols = int(m.cols());
    if (rows == 0) return 0.0;
    std::vector<int> perm(static_cast<std::size_t>(cols));
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        // rows take the first `rows` entries of every permutation
        double sum = 0.0;
        for (int i = 0; i < rows; ++i) sum += m(i, perm[std::size_t(i)]);
        best = std::min(best, sum);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

/// P(X > threshold) for X ~ Binomial(n, p).
inline double binomial_upper_tail(int n, double p, int threshold) {
    double total = 0.0;
    for (int k = threshold + 1; k <= n; ++k) {
        const double log_choose = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        total += std::exp(log_choose + k * std::log(p) + (n - k) * std::log1p(-p));
    }
    return total;
}

}  // namespace oracle
