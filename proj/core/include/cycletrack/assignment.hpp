#pragma once

#include <utility>
#include <vector>

namespace cycletrack {

/// Dense cost table for assignment problems (row-major).
class CostGrid {
public:
  CostGrid() = default;
  CostGrid(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Exact minimum-cost bipartite assignment (Hungarian, O(n^3)). Assigns
/// min(rows, cols) pairs; infeasible edges should carry a large finite cost
/// and be filtered by the caller afterwards.
std::vector<std::pair<int, int>> solve_min_cost(const CostGrid& cost);

}  // namespace cycletrack
