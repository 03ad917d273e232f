#pragma once

#include <stdexcept>
#include <vector>

#include "d2d/hungarian.hpp"
#include "d2d/network.hpp"

namespace d2d {

// Raised when a request is well formed but has no feasible answer, e.g. a
// rate target no admission can meet. Callers map this to a dedicated exit
// status.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Left = cellular users, right = channels, weight = log of the received
// cellular power on that channel.
BipartiteGraph build_cellular_graph(const Scenario& s);

// Interference estimate available at the base station: distance gains only,
// every D2D user assumed at maximum power. cellular_penalty is the
// same-cluster weight between two cellular users, chosen just above the
// largest possible total D2D weight so splitting cellular users is always
// cheaper.
struct EstimatedNetworkGraph {
  int d2d_count = 0;       // K
  int cellular_count = 0;  // L
  std::vector<double> w;   // K x L, row-major
  double cellular_penalty = 0.0;

  double weight(int k, int l) const {
    return w[static_cast<std::size_t>(k) * cellular_count + l];
  }
  void set_weight(int k, int l, double value) {
    w[static_cast<std::size_t>(k) * cellular_count + l] = value;
  }
};

EstimatedNetworkGraph build_estimated_graph(const Scenario& s);

// Grouping of all users into clusters, one cluster per channel. Producers
// in this module label clusters canonically: cluster q hosts cellular user
// q.
struct ClusterAssignment {
  int cellular_count = 0;
  int d2d_count = 0;
  int cluster_count = 0;
  std::vector<int> cellular_cluster;
  std::vector<int> d2d_cluster;

  void validate() const;
  bool one_cellular_per_cluster() const;
  std::vector<int> d2d_in(int cluster) const;
};

// Total same-cluster weight, computed as the quadratic form over the full
// symmetric weight matrix (cellular pairs carry the penalty, D2D pairs
// nothing).
double allocation_cost(const ClusterAssignment& clusters,
                       const EstimatedNetworkGraph& graph);

// Groups every D2D user with the cellular user of least estimated
// interference, phrased as a minimum matching against per-cellular copies
// so each copy absorbs at most one D2D user.
ClusterAssignment cluster_by_replicated_matching(
    const EstimatedNetworkGraph& graph);

struct PartitionResult {
  ClusterAssignment clusters;
  double cost = 0.0;
};

// Exhaustive reference: tries every assignment of all users to Q = L
// clusters, keeps a global minimum of allocation_cost, and checks that
// every optimum it sees hosts exactly one cellular user per cluster.
// Guarded to Q^(L+K) <= 1e7 states.
PartitionResult qway_partition_bruteforce(const EstimatedNetworkGraph& graph);

// Interference budget of cellular user l on channel q for a rate floor:
// received power divided by exp(rate floor), minus one. Negative means the
// floor is unreachable even with no D2D interference.
double max_tolerable_interference(const Scenario& s, int l, int q,
                                  double min_rate);

struct QosAssignment {
  std::vector<int> cellular_of;  // per D2D user, -1 = not admitted
  int assigned_count = 0;
};

// Admits as many D2D users as the per-cellular interference budgets allow.
// Heuristic: users in ascending order of their cheapest weight, each placed
// with the cellular user of most remaining slack, then one repair pass that
// relocates an admitted user when that opens room for a rejected one.
// Throws InfeasibleError if any budget is negative.
QosAssignment qos_assignment(const EstimatedNetworkGraph& graph,
                             const std::vector<double>& budgets);

// Exact maximum admission count by branch and bound, for K*L <= 30.
QosAssignment qos_assignment_bruteforce(const EstimatedNetworkGraph& graph,
                                        const std::vector<double>& budgets);

struct FairnessResult {
  ClusterAssignment clusters;
  std::vector<double> loads;  // summed weight per cluster
};

// Balances per-cluster interference load: one cellular user per cluster,
// D2D users placed to keep the heaviest cluster light. Greedy seeds plus
// move/swap local search; never worse on max load than the sum-minimizing
// clustering.
FairnessResult fairness_partition(const EstimatedNetworkGraph& graph);

}  // namespace d2d
