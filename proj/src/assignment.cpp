#include "ct/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ct {

namespace {

constexpr double kSentinel = 1e9;

// Classic O(n^3) Hungarian algorithm with row/column potentials on a square
// matrix. Returns the matched column of every row.
std::vector<int> hungarian_square(const std::vector<double>& a, int n) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);  // match[j]: 1-based row on column j
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = a[static_cast<size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
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
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    }
    return row_to_col;
}

}  // namespace

Assignment solve_assignment(const CostMatrix& c, double gate) {
    Assignment out;
    if (c.empty()) {
        for (int r = 0; r < c.rows; ++r) out.unmatched_rows.push_back(r);
        for (int j = 0; j < c.cols; ++j) out.unmatched_cols.push_back(j);
        return out;
    }
    for (double v : c.cost) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("solve_assignment: costs must be finite and >= 0");
        }
    }

    // Pad to square; dummy entries are free, over-gate entries pay the
    // sentinel so the solver maximizes in-gate matches first.
    const int n = std::max(c.rows, c.cols);
    std::vector<double> padded(static_cast<size_t>(n) * n, 0.0);
    for (int r = 0; r < c.rows; ++r) {
        for (int j = 0; j < c.cols; ++j) {
            const double v = c.at(r, j);
            padded[static_cast<size_t>(r) * n + j] = (v <= gate) ? v : kSentinel;
        }
    }
    const std::vector<int> row_to_col = hungarian_square(padded, n);

    std::vector<char> col_matched(c.cols, 0);
    for (int r = 0; r < c.rows; ++r) {
        const int j = row_to_col[r];
        if (j >= 0 && j < c.cols && c.at(r, j) <= gate) {
            out.matches.emplace_back(r, j);
            col_matched[j] = 1;
        } else {
            out.unmatched_rows.push_back(r);
        }
    }
    for (int j = 0; j < c.cols; ++j) {
        if (!col_matched[j]) out.unmatched_cols.push_back(j);
    }
    return out;
}

}  // namespace ct
