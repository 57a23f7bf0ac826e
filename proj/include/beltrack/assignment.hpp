#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "beltrack/box.hpp"

namespace beltrack {

/// Rows are tracks, columns are detections. IoU-derived matrices hold
/// 1 - IoU and so lie in [0, 1]; the solver itself accepts any finite costs.
template <typename Scalar>
using CostMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using CostMatrix = CostMatrixT<double>;

struct AssignmentResult {
    std::vector<std::pair<int, int>> matches;  // (row, col), ascending by row
    std::vector<int> unmatched_rows;
    std::vector<int> unmatched_cols;
};

template <typename Scalar = double>
CostMatrixT<Scalar> build_cost_matrix(std::span<const BoundingBox> track_boxes,
                                      std::span<const BoundingBox> det_boxes) {
    CostMatrixT<Scalar> costs(Eigen::Index(track_boxes.size()), Eigen::Index(det_boxes.size()));
    for (std::size_t i = 0; i < track_boxes.size(); ++i) {
        for (std::size_t j = 0; j < det_boxes.size(); ++j) {
            costs(Eigen::Index(i), Eigen::Index(j)) = Scalar(1) - Scalar(iou(track_boxes[i], det_boxes[j]));
        }
    }
    return costs;
}

namespace detail {

/// Kuhn-Munkres with row/column potentials on a square matrix, O(n^3).
/// Returns col_of_row. Rows are inserted in ascending order and column scans
/// run left to right with strict improvement, so equal-cost alternatives
/// resolve identically on every run.
template <typename Derived>
std::vector<int> hungarian_square(const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    const int n = int(a.rows());
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    // 1-based potentials; index 0 is the virtual root column.
    std::vector<Scalar> u(n + 1, Scalar(0)), v(n + 1, Scalar(0));
    std::vector<int> row_of_col(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        row_of_col[0] = i;
        int j0 = 0;
        std::vector<Scalar> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = row_of_col[j0];
            Scalar delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const Scalar cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of_col[j0] != 0);
        do {
            const int j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> col_of_row(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (row_of_col[j] > 0) col_of_row[row_of_col[j] - 1] = j - 1;
    }
    return col_of_row;
}

}  // namespace detail

/// Minimum-total-cost one-to-one matching. Rectangular inputs are padded to
/// square with a cost above every real entry; padded pairs come back as
/// unmatched. Pairs whose cost exceeds max_cost are rejected after solving.
template <typename Derived>
AssignmentResult solve_assignment(const Eigen::MatrixBase<Derived>& costs,
                                  double max_cost = std::numeric_limits<double>::infinity()) {
    using Scalar = typename Derived::Scalar;
    const int rows = int(costs.rows());
    const int cols = int(costs.cols());
    AssignmentResult result;
    if (rows == 0 || cols == 0) {
        for (int i = 0; i < rows; ++i) result.unmatched_rows.push_back(i);
        for (int j = 0; j < cols; ++j) result.unmatched_cols.push_back(j);
        return result;
    }

    const int n = std::max(rows, cols);
    const Scalar hi = costs.maxCoeff();
    const Scalar lo = costs.minCoeff();
    const Scalar pad = hi + (hi - lo) + Scalar(1);
    CostMatrixT<Scalar> square = CostMatrixT<Scalar>::Constant(n, n, pad);
    square.topLeftCorner(rows, cols) = costs;

    const std::vector<int> col_of_row = detail::hungarian_square(square);
    std::vector<char> col_taken(cols, 0);
    for (int i = 0; i < rows; ++i) {
        const int j = col_of_row[i];
        if (j >= 0 && j < cols && double(costs(i, j)) <= max_cost) {
            result.matches.emplace_back(i, j);
            col_taken[j] = 1;
        } else {
            result.unmatched_rows.push_back(i);
        }
    }
    for (int j = 0; j < cols; ++j) {
        if (!col_taken[j]) result.unmatched_cols.push_back(j);
    }
    return result;
}

}  // namespace beltrack
