#include "d2d/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace d2d {

BipartiteGraph build_cellular_graph(const Scenario& s) {
  BipartiteGraph g(s.cellular_count(), s.channel_count());
  for (int l = 0; l < s.cellular_count(); ++l) {
    for (int q = 0; q < s.channel_count(); ++q) {
      g.set_weight(l, q,
                   std::log(s.config.cellular_power * s.h_bs_cellular(l, q)));
    }
  }
  return g;
}

EstimatedNetworkGraph build_estimated_graph(const Scenario& s) {
  const int K = s.d2d_count();
  const int L = s.cellular_count();
  EstimatedNetworkGraph g;
  g.d2d_count = K;
  g.cellular_count = L;
  g.w.assign(static_cast<std::size_t>(K) * L, 0.0);
  const double pmax = s.max_power();
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      g.set_weight(k, l, pmax * s.pathloss_d2d_to_cellular(k, l));
    }
  }
  g.cellular_penalty = K * pmax + 1.0;
  return g;
}

void ClusterAssignment::validate() const {
  if (static_cast<int>(cellular_cluster.size()) != cellular_count ||
      static_cast<int>(d2d_cluster.size()) != d2d_count) {
    throw std::invalid_argument("cluster assignment size mismatch");
  }
  for (int c : cellular_cluster) {
    if (c < 0 || c >= cluster_count) {
      throw std::invalid_argument("cellular cluster id out of range");
    }
  }
  for (int c : d2d_cluster) {
    if (c < 0 || c >= cluster_count) {
      throw std::invalid_argument("D2D cluster id out of range");
    }
  }
}

bool ClusterAssignment::one_cellular_per_cluster() const {
  std::vector<int> count(cluster_count, 0);
  for (int c : cellular_cluster) ++count[c];
  return std::all_of(count.begin(), count.end(),
                     [](int n) { return n == 1; });
}

std::vector<int> ClusterAssignment::d2d_in(int cluster) const {
  std::vector<int> members;
  for (int k = 0; k < d2d_count; ++k) {
    if (d2d_cluster[k] == cluster) members.push_back(k);
  }
  return members;
}

double allocation_cost(const ClusterAssignment& clusters,
                       const EstimatedNetworkGraph& graph) {
  clusters.validate();
  const int L = graph.cellular_count;
  const int K = graph.d2d_count;
  if (clusters.cellular_count != L || clusters.d2d_count != K) {
    throw std::invalid_argument("cluster assignment does not match graph");
  }
  const int n = L + K;

  // Full symmetric weight matrix over users (cellular first), zero diagonal.
  std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
  for (int a = 0; a < L; ++a) {
    for (int b = 0; b < L; ++b) {
      if (a != b) w[static_cast<std::size_t>(a) * n + b] = graph.cellular_penalty;
    }
  }
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      w[static_cast<std::size_t>(L + k) * n + l] = graph.weight(k, l);
      w[static_cast<std::size_t>(l) * n + (L + k)] = graph.weight(k, l);
    }
  }
  auto cluster_of = [&](int user) {
    return user < L ? clusters.cellular_cluster[user]
                    : clusters.d2d_cluster[user - L];
  };

  double quad = 0.0;
  for (int q = 0; q < clusters.cluster_count; ++q) {
    for (int a = 0; a < n; ++a) {
      if (cluster_of(a) != q) continue;
      for (int b = 0; b < n; ++b) {
        if (cluster_of(b) == q) quad += w[static_cast<std::size_t>(a) * n + b];
      }
    }
  }
  quad *= 0.5;

  if (clusters.one_cellular_per_cluster()) {
    double direct = 0.0;
    for (int k = 0; k < K; ++k) {
      const int q = clusters.d2d_cluster[k];
      for (int l = 0; l < L; ++l) {
        if (clusters.cellular_cluster[l] == q) direct += graph.weight(k, l);
      }
    }
    if (std::abs(direct - quad) > 1e-12 * std::max(1.0, std::abs(quad))) {
      throw std::logic_error("cluster cost identities disagree");
    }
  }
  return quad;
}

ClusterAssignment cluster_by_replicated_matching(
    const EstimatedNetworkGraph& graph) {
  const int K = graph.d2d_count;
  const int L = graph.cellular_count;
  if (L < 1) throw std::invalid_argument("graph has no cellular users");

  ClusterAssignment result;
  result.cellular_count = L;
  result.d2d_count = K;
  result.cluster_count = L;
  result.cellular_cluster.resize(L);
  std::iota(result.cellular_cluster.begin(), result.cellular_cluster.end(), 0);
  result.d2d_cluster.assign(K, 0);
  if (K == 0) return result;

  // K copies of every cellular user, grouped so column / K recovers the
  // user; ascending order keeps ties on the smallest cellular index.
  BipartiteGraph replicated(K, K * L);
  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      for (int copy = 0; copy < K; ++copy) {
        replicated.set_weight(k, l * K + copy, graph.weight(k, l));
      }
    }
  }
  const AssignmentMatrix match =
      hungarian_matching(replicated, MatchSense::kMin);
  for (int k = 0; k < K; ++k) {
    result.d2d_cluster[k] = match.right_of[k] / K;
  }
  return result;
}

PartitionResult qway_partition_bruteforce(const EstimatedNetworkGraph& graph) {
  const int L = graph.cellular_count;
  const int K = graph.d2d_count;
  const int n = L + K;
  const int Q = L;
  double states = 1.0;
  for (int i = 0; i < n; ++i) {
    states *= Q;
    if (states > 1e7) throw std::invalid_argument("oracle scale exceeded");
  }

  auto make_assignment = [&](const std::vector<int>& labels) {
    ClusterAssignment a;
    a.cellular_count = L;
    a.d2d_count = K;
    a.cluster_count = Q;
    a.cellular_cluster.assign(labels.begin(), labels.begin() + L);
    a.d2d_cluster.assign(labels.begin() + L, labels.end());
    return a;
  };

  std::vector<int> labels(n, 0);
  std::vector<int> best_labels;
  double best = std::numeric_limits<double>::infinity();
  bool done = false;
  while (!done) {
    const ClusterAssignment a = make_assignment(labels);
    const double cost = allocation_cost(a, graph);
    if (cost < best) {
      best = cost;
      best_labels = labels;
    }
    done = true;
    for (int i = n - 1; i >= 0; --i) {
      if (++labels[i] < Q) {
        done = false;
        break;
      }
      labels[i] = 0;
    }
  }

  // Every global optimum must split the cellular users one per cluster;
  // the penalty weight is sized to force this.
  std::fill(labels.begin(), labels.end(), 0);
  done = false;
  while (!done) {
    const ClusterAssignment a = make_assignment(labels);
    if (allocation_cost(a, graph) <= best + 1e-12 &&
        !a.one_cellular_per_cluster()) {
      throw std::logic_error("optimum with unbalanced cellular users");
    }
    done = true;
    for (int i = n - 1; i >= 0; --i) {
      if (++labels[i] < Q) {
        done = false;
        break;
      }
      labels[i] = 0;
    }
  }

  // Relabel so cluster q is the one hosting cellular user q.
  ClusterAssignment raw = make_assignment(best_labels);
  ClusterAssignment canon = raw;
  std::vector<int> cluster_of_cellular(Q, -1);
  for (int l = 0; l < L; ++l) cluster_of_cellular[raw.cellular_cluster[l]] = l;
  for (int l = 0; l < L; ++l) canon.cellular_cluster[l] = l;
  for (int k = 0; k < K; ++k) {
    canon.d2d_cluster[k] = cluster_of_cellular[raw.d2d_cluster[k]];
  }
  return {canon, best};
}

double max_tolerable_interference(const Scenario& s, int l, int q,
                                  double min_rate) {
  const double budget =
      s.config.cellular_power * s.h_bs_cellular(l, q) / std::exp(min_rate) -
      1.0;
  if (budget < 0.0) {
    throw InfeasibleError("rate floor unreachable even without D2D interference");
  }
  return budget;
}

namespace {

void check_budgets(const EstimatedNetworkGraph& graph,
                   const std::vector<double>& budgets) {
  if (static_cast<int>(budgets.size()) != graph.cellular_count) {
    throw std::invalid_argument("budget count must equal cellular count");
  }
  for (double b : budgets) {
    if (b < 0.0) {
      throw InfeasibleError("rate floor unreachable even without D2D interference");
    }
  }
}

}  // namespace

QosAssignment qos_assignment(const EstimatedNetworkGraph& graph,
                             const std::vector<double>& budgets) {
  check_budgets(graph, budgets);
  const int K = graph.d2d_count;
  const int L = graph.cellular_count;

  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> cheapest(K, 0.0);
  for (int k = 0; k < K; ++k) {
    double m = std::numeric_limits<double>::infinity();
    for (int l = 0; l < L; ++l) m = std::min(m, graph.weight(k, l));
    cheapest[k] = m;
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return cheapest[a] < cheapest[b];
  });

  QosAssignment result;
  result.cellular_of.assign(K, -1);
  std::vector<double> slack = budgets;
  auto place = [&](int k) {
    int pick = -1;
    for (int l = 0; l < L; ++l) {
      if (graph.weight(k, l) <= slack[l] &&
          (pick < 0 || slack[l] > slack[pick])) {
        pick = l;
      }
    }
    if (pick >= 0) {
      result.cellular_of[k] = pick;
      slack[pick] -= graph.weight(k, pick);
      ++result.assigned_count;
    }
    return pick >= 0;
  };
  for (int k : order) place(k);

  // Single repair pass: relocate one admitted user if that makes room for a
  // rejected one.
  for (int u = 0; u < K; ++u) {
    if (result.cellular_of[u] >= 0) continue;
    if (place(u)) continue;
    bool fixed = false;
    for (int a = 0; a < K && !fixed; ++a) {
      const int la = result.cellular_of[a];
      if (la < 0) continue;
      for (int l2 = 0; l2 < L && !fixed; ++l2) {
        if (l2 == la || graph.weight(a, l2) > slack[l2]) continue;
        if (graph.weight(u, la) <= slack[la] + graph.weight(a, la)) {
          slack[la] += graph.weight(a, la);
          slack[l2] -= graph.weight(a, l2);
          result.cellular_of[a] = l2;
          result.cellular_of[u] = la;
          slack[la] -= graph.weight(u, la);
          ++result.assigned_count;
          fixed = true;
        }
      }
    }
  }
  return result;
}

QosAssignment qos_assignment_bruteforce(const EstimatedNetworkGraph& graph,
                                        const std::vector<double>& budgets) {
  check_budgets(graph, budgets);
  const int K = graph.d2d_count;
  const int L = graph.cellular_count;
  if (K * L > 30) throw std::invalid_argument("oracle scale exceeded");

  QosAssignment best;
  best.cellular_of.assign(K, -1);
  std::vector<int> current(K, -1);
  std::vector<double> slack = budgets;
  int assigned = 0;

  auto dfs = [&](auto&& self, int k) -> void {
    if (assigned + (K - k) <= best.assigned_count) return;  // cannot improve
    if (k == K) {
      if (assigned > best.assigned_count) {
        best.cellular_of = current;
        best.assigned_count = assigned;
      }
      return;
    }
    for (int l = 0; l < L; ++l) {
      if (graph.weight(k, l) <= slack[l]) {
        slack[l] -= graph.weight(k, l);
        current[k] = l;
        ++assigned;
        self(self, k + 1);
        --assigned;
        current[k] = -1;
        slack[l] += graph.weight(k, l);
      }
    }
    self(self, k + 1);
  };
  dfs(dfs, 0);
  return best;
}

namespace {

double max_load(const std::vector<double>& loads) {
  return *std::max_element(loads.begin(), loads.end());
}

std::vector<double> loads_of(const EstimatedNetworkGraph& graph,
                             const std::vector<int>& d2d_cluster) {
  std::vector<double> loads(graph.cellular_count, 0.0);
  for (int k = 0; k < graph.d2d_count; ++k) {
    loads[d2d_cluster[k]] += graph.weight(k, d2d_cluster[k]);
  }
  return loads;
}

// Repeated first-improvement moves and pairwise swaps until the heaviest
// cluster cannot be lightened.
void balance_local_search(const EstimatedNetworkGraph& graph,
                          std::vector<int>& d2d_cluster) {
  const int K = graph.d2d_count;
  const int L = graph.cellular_count;
  std::vector<double> loads = loads_of(graph, d2d_cluster);
  bool improved = true;
  while (improved) {
    improved = false;
    const double current = max_load(loads);
    for (int k = 0; k < K && !improved; ++k) {
      const int from = d2d_cluster[k];
      for (int to = 0; to < L && !improved; ++to) {
        if (to == from) continue;
        loads[from] -= graph.weight(k, from);
        loads[to] += graph.weight(k, to);
        if (max_load(loads) < current - 1e-15) {
          d2d_cluster[k] = to;
          improved = true;
        } else {
          loads[from] += graph.weight(k, from);
          loads[to] -= graph.weight(k, to);
        }
      }
    }
    for (int a = 0; a < K && !improved; ++a) {
      for (int b = a + 1; b < K && !improved; ++b) {
        const int ca = d2d_cluster[a];
        const int cb = d2d_cluster[b];
        if (ca == cb) continue;
        loads[ca] += graph.weight(b, ca) - graph.weight(a, ca);
        loads[cb] += graph.weight(a, cb) - graph.weight(b, cb);
        if (max_load(loads) < current - 1e-15) {
          d2d_cluster[a] = cb;
          d2d_cluster[b] = ca;
          improved = true;
        } else {
          loads[ca] -= graph.weight(b, ca) - graph.weight(a, ca);
          loads[cb] -= graph.weight(a, cb) - graph.weight(b, cb);
        }
      }
    }
  }
}

}  // namespace

FairnessResult fairness_partition(const EstimatedNetworkGraph& graph) {
  const int K = graph.d2d_count;
  const int L = graph.cellular_count;
  if (L < 1) throw std::invalid_argument("graph has no cellular users");

  std::vector<std::vector<int>> starts;

  // Heaviest user first, each to the cluster that stays lightest.
  {
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> cheapest(K, 0.0);
    for (int k = 0; k < K; ++k) {
      double m = std::numeric_limits<double>::infinity();
      for (int l = 0; l < L; ++l) m = std::min(m, graph.weight(k, l));
      cheapest[k] = m;
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return cheapest[a] > cheapest[b];
    });
    std::vector<int> assign(K, 0);
    std::vector<double> loads(L, 0.0);
    for (int k : order) {
      int pick = 0;
      for (int l = 1; l < L; ++l) {
        if (loads[l] + graph.weight(k, l) <
            loads[pick] + graph.weight(k, pick)) {
          pick = l;
        }
      }
      assign[k] = pick;
      loads[pick] += graph.weight(k, pick);
    }
    starts.push_back(std::move(assign));
  }
  if (K > 0) {
    starts.push_back(cluster_by_replicated_matching(graph).d2d_cluster);
  }
  {
    std::vector<int> rr(K);
    for (int k = 0; k < K; ++k) rr[k] = k % L;
    starts.push_back(std::move(rr));
  }

  std::vector<int> best;
  double best_load = std::numeric_limits<double>::infinity();
  for (std::vector<int>& cand : starts) {
    balance_local_search(graph, cand);
    const double load = K > 0 ? max_load(loads_of(graph, cand)) : 0.0;
    if (load < best_load - 1e-15 ||
        (std::abs(load - best_load) <= 1e-15 && cand < best)) {
      best_load = load;
      best = cand;
    }
  }

  FairnessResult result;
  result.clusters.cellular_count = L;
  result.clusters.d2d_count = K;
  result.clusters.cluster_count = L;
  result.clusters.cellular_cluster.resize(L);
  std::iota(result.clusters.cellular_cluster.begin(),
            result.clusters.cellular_cluster.end(), 0);
  result.clusters.d2d_cluster = best;
  result.loads = loads_of(graph, best);
  return result;
}

}  // namespace d2d
