#include "cycletrack/assignment.hpp"

#include <limits>

namespace cycletrack {
namespace {

// Potential-based Hungarian on an n x m grid with n <= m, 1-indexed
// internally. Returns for each column the assigned row (0 = none).
std::vector<int> hungarian(const CostGrid& a) {
  const int n = a.rows();
  const int m = a.cols();
  const double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  return p;
}

}  // namespace

std::vector<std::pair<int, int>> solve_min_cost(const CostGrid& cost) {
  if (cost.rows() == 0 || cost.cols() == 0) return {};

  const bool transpose = cost.rows() > cost.cols();
  CostGrid grid = cost;
  if (transpose) {
    grid = CostGrid(cost.cols(), cost.rows());
    for (int r = 0; r < cost.rows(); ++r)
      for (int c = 0; c < cost.cols(); ++c) grid(c, r) = cost(r, c);
  }

  const auto p = hungarian(grid);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(grid.rows());
  for (int j = 1; j <= grid.cols(); ++j) {
    if (p[j] == 0) continue;
    const int row = p[j] - 1;
    const int col = j - 1;
    pairs.emplace_back(transpose ? col : row, transpose ? row : col);
  }
  return pairs;
}

}  // namespace cycletrack
