#include "d2d/hungarian.hpp"

#include <cmath>
#include <stdexcept>

namespace d2d {

namespace {
constexpr double kBlocked = 1e30;  // internal stand-in for a missing edge
}

AssignmentMatrix hungarian_matching(const BipartiteGraph& graph,
                                    MatchSense sense) {
  const int n = graph.left_size;
  const int m = graph.right_size;
  if (n == 0) return {0, m, {}, 0.0};
  if (n > m) {
    throw std::invalid_argument("left side larger than right side");
  }

  // Minimization costs, 1-indexed; maximization negates finite weights.
  std::vector<double> cost(static_cast<std::size_t>(n + 1) * (m + 1), 0.0);
  for (int i = 0; i < n; ++i) {
    bool any = false;
    for (int j = 0; j < m; ++j) {
      double w = graph.weight(i, j);
      double c = kBlocked;
      if (w == w) {
        c = sense == MatchSense::kMax ? -w : w;
        any = true;
      }
      cost[static_cast<std::size_t>(i + 1) * (m + 1) + (j + 1)] = c;
    }
    if (!any) throw std::invalid_argument("no feasible complete matching");
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur =
            cost[static_cast<std::size_t>(i0) * (m + 1) + j] - u[i0] - v[j];
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
    } while (j0 != 0);
  }

  AssignmentMatrix result{n, m, std::vector<int>(n, -1), 0.0};
  for (int j = 1; j <= m; ++j) {
    if (match[j] != 0) result.right_of[match[j] - 1] = j - 1;
  }
  for (int i = 0; i < n; ++i) {
    const int j = result.right_of[i];
    if (j < 0 || !graph.has_edge(i, j)) {
      throw std::invalid_argument("no feasible complete matching");
    }
    result.total_weight += graph.weight(i, j);
  }
  return result;
}

}  // namespace d2d
