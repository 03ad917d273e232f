#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "d2d/allocation.hpp"
#include "d2d/learning.hpp"
#include "d2d/network.hpp"

namespace d2d {

enum class AllocationCriterion { kSum, kQos, kFairness };

AllocationCriterion parse_criterion(const std::string& name);
std::string criterion_name(AllocationCriterion criterion);

// Stage one only: cellular users matched to channels, then D2D users placed
// by the chosen criterion. QoS may leave users unadmitted.
struct StageOneResult {
  ChannelAllocation alloc;
  double matching_weight = 0.0;     // stage-one matching objective
  double cluster_cost = 0.0;        // summed estimated interference weight
  std::vector<double> loads;        // per-channel estimated load
  int admitted_d2d = 0;
};

StageOneResult allocate_channels(const Scenario& s,
                                 AllocationCriterion criterion,
                                 double min_rate = 0.0);

struct PipelineConfig {
  AllocationCriterion criterion = AllocationCriterion::kSum;
  double min_rate = 0.0;  // only read under the QoS criterion
  LearnerParams learner;
  NoiseModel noise;
  std::uint64_t seed = 1;
  int window = 500;  // trailing trials that vote on the final power profile
};

struct ClusterRun {
  int channel = 0;
  std::vector<int> members;
  LearningTrace trace;
  std::vector<int> modal_actions;
};

struct PipelineResult {
  ChannelAllocation alloc;
  PowerProfile powers;  // admitted users get their learned level
  std::vector<ClusterRun> cluster_runs;
  double cellular_sum = 0.0;
  double d2d_sum = 0.0;  // over admitted users
  double total = 0.0;
  int admitted_d2d = 0;
};

// Full two-stage scheme: centralized channel allocation, then independent
// per-cluster learning runs whose final-window modal profiles fix the
// powers. Expected (noise-free) utilities are reported.
PipelineResult run_pipeline(const Scenario& s, const PipelineConfig& config);

struct SearchResult {
  ChannelAllocation alloc;
  PowerProfile powers;
  double cellular_sum = 0.0;
  double d2d_sum = 0.0;
  double total = 0.0;
};

// Reference searches over every channel permutation, D2D channel choice and
// power profile; guarded to 1e7 candidate allocations. The priority variant
// maximizes the cellular sum and breaks ties toward the higher D2D sum; the
// sum variant maximizes the aggregate.
SearchResult exhaustive_priority_search(const Scenario& s);
SearchResult exhaustive_sum_search(const Scenario& s);

// Uniform random channel permutation, D2D channels and powers.
SearchResult random_allocation(const Scenario& s, std::uint64_t seed);

struct ComparisonRecord {
  int replication = 0;
  std::uint64_t seed = 0;
  std::string strategy;
  double cellular_sum = 0.0;
  double d2d_sum = 0.0;
  double total = 0.0;
  double wall_seconds = 0.0;
};

struct CompareConfig {
  int replications = 10;
  std::uint64_t seed = 1;  // replication r resamples with seed + r
  PipelineConfig pipeline;
  bool with_exhaustive = true;
};

// Repeated head-to-head runs on freshly sampled scenarios, merged in
// replication order.
std::vector<ComparisonRecord> run_comparison(const ScenarioConfig& config,
                                             const CompareConfig& compare);

void write_allocation_csv(const Scenario& s, const ChannelAllocation& alloc,
                          std::ostream& out);
nlohmann::json stage_one_summary(const Scenario& s,
                                 AllocationCriterion criterion,
                                 const StageOneResult& stage);
void write_comparison_csv(const std::vector<ComparisonRecord>& records,
                          std::ostream& out);
nlohmann::json comparison_plot_data(const std::vector<ComparisonRecord>& records);

}  // namespace d2d
