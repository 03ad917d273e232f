#pragma once

#include <limits>
#include <vector>

namespace d2d {

// Edge-weighted bipartite graph, dense row-major storage. Missing edges are
// marked with NaN and never enter a matching.
struct BipartiteGraph {
  int left_size = 0;
  int right_size = 0;
  std::vector<double> weights;

  BipartiteGraph() = default;
  BipartiteGraph(int left, int right)
      : left_size(left),
        right_size(right),
        weights(static_cast<std::size_t>(left) * right,
                std::numeric_limits<double>::quiet_NaN()) {}

  double weight(int l, int r) const {
    return weights[static_cast<std::size_t>(l) * right_size + r];
  }
  void set_weight(int l, int r, double w) {
    weights[static_cast<std::size_t>(l) * right_size + r] = w;
  }
  bool has_edge(int l, int r) const { return weight(l, r) == weight(l, r); }
};

enum class MatchSense { kMax, kMin };

// Complete matching of the left side: right_of[l] is the matched right
// vertex, all distinct. total_weight is the sum over matched edges.
struct AssignmentMatrix {
  int left_size = 0;
  int right_size = 0;
  std::vector<int> right_of;
  double total_weight = 0.0;

  bool assigned(int l, int r) const { return right_of[l] == r; }
};

// Optimal assignment via shortest augmenting paths with vertex potentials,
// O(n^2 m). Requires left_size <= right_size (extra right vertices simply
// stay unmatched, which is the zero-weight dummy construction). Throws if
// no complete matching over present edges exists.
AssignmentMatrix hungarian_matching(const BipartiteGraph& graph,
                                    MatchSense sense);

}  // namespace d2d
