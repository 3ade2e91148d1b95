#pragma once

#include <utility>
#include <vector>

namespace ct {

// Row-major rectangular cost matrix. All entries must be finite and >= 0.
struct CostMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> cost;

    CostMatrix() = default;
    CostMatrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), cost(static_cast<size_t>(r) * c, fill) {}

    double& at(int r, int c) { return cost[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return cost[static_cast<size_t>(r) * cols + c]; }
    bool empty() const { return rows == 0 || cols == 0; }
};

struct Assignment {
    std::vector<std::pair<int, int>> matches;  // (row, col), ascending by row
    std::vector<int> unmatched_rows;
    std::vector<int> unmatched_cols;
};

// Minimum-cost bipartite matching restricted to pairs with cost <= gate.
// Maximizes the number of matches first, then minimizes their total cost.
// Over-gate entries are clamped to a large sentinel and sentinel matches are
// dropped after the solve, so the kernel stays a plain rectangular assignment.
// Deterministic: ties resolve toward lower (row, col) indices.
Assignment solve_assignment(const CostMatrix& c, double gate);

}  // namespace ct
