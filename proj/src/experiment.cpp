#include "d2d/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "d2d/game.hpp"
#include "d2d/hungarian.hpp"
#include "d2d/random.hpp"

namespace d2d {

AllocationCriterion parse_criterion(const std::string& name) {
  if (name == "sum") return AllocationCriterion::kSum;
  if (name == "qos") return AllocationCriterion::kQos;
  if (name == "fairness") return AllocationCriterion::kFairness;
  throw std::invalid_argument("criterion must be sum, qos or fairness");
}

std::string criterion_name(AllocationCriterion criterion) {
  switch (criterion) {
    case AllocationCriterion::kSum: return "sum";
    case AllocationCriterion::kQos: return "qos";
    case AllocationCriterion::kFairness: return "fairness";
  }
  throw std::logic_error("unreachable");
}

StageOneResult allocate_channels(const Scenario& s,
                                 AllocationCriterion criterion,
                                 double min_rate) {
  StageOneResult result;
  const AssignmentMatrix match =
      hungarian_matching(build_cellular_graph(s), MatchSense::kMax);
  result.alloc.cellular_channel = match.right_of;
  result.matching_weight = match.total_weight;
  result.alloc.d2d_channel.assign(s.d2d_count(),
                                  ChannelAllocation::kUnassigned);
  result.loads.assign(s.channel_count(), 0.0);

  const EstimatedNetworkGraph graph = build_estimated_graph(s);
  auto channel_of_cellular = [&](int l) {
    return result.alloc.cellular_channel[l];
  };

  switch (criterion) {
    case AllocationCriterion::kSum: {
      const ClusterAssignment clusters = cluster_by_replicated_matching(graph);
      for (int k = 0; k < s.d2d_count(); ++k) {
        result.alloc.d2d_channel[k] =
            channel_of_cellular(clusters.d2d_cluster[k]);
      }
      result.cluster_cost = s.d2d_count() > 0
                                ? allocation_cost(clusters, graph)
                                : 0.0;
      result.admitted_d2d = s.d2d_count();
      for (int k = 0; k < s.d2d_count(); ++k) {
        result.loads[result.alloc.d2d_channel[k]] +=
            graph.weight(k, clusters.d2d_cluster[k]);
      }
      break;
    }
    case AllocationCriterion::kQos: {
      std::vector<double> budgets(s.cellular_count());
      for (int l = 0; l < s.cellular_count(); ++l) {
        budgets[l] =
            max_tolerable_interference(s, l, channel_of_cellular(l), min_rate);
      }
      const QosAssignment admitted = qos_assignment(graph, budgets);
      for (int k = 0; k < s.d2d_count(); ++k) {
        const int l = admitted.cellular_of[k];
        if (l >= 0) {
          result.alloc.d2d_channel[k] = channel_of_cellular(l);
          result.loads[channel_of_cellular(l)] += graph.weight(k, l);
          result.cluster_cost += graph.weight(k, l);
        }
      }
      result.admitted_d2d = admitted.assigned_count;
      break;
    }
    case AllocationCriterion::kFairness: {
      const FairnessResult fair = fairness_partition(graph);
      for (int k = 0; k < s.d2d_count(); ++k) {
        result.alloc.d2d_channel[k] =
            channel_of_cellular(fair.clusters.d2d_cluster[k]);
        result.cluster_cost += graph.weight(k, fair.clusters.d2d_cluster[k]);
      }
      for (int l = 0; l < s.cellular_count(); ++l) {
        result.loads[channel_of_cellular(l)] = fair.loads[l];
      }
      result.admitted_d2d = s.d2d_count();
      break;
    }
  }
  return result;
}

namespace {

double evaluate_d2d_sum_assigned(const Scenario& s,
                                 const ChannelAllocation& alloc,
                                 const PowerProfile& powers) {
  double sum = 0.0;
  for (int k = 0; k < s.d2d_count(); ++k) {
    if (alloc.d2d_channel[k] != ChannelAllocation::kUnassigned) {
      sum += d2d_utility(s, alloc, powers, k);
    }
  }
  return sum;
}

std::uint64_t cluster_seed(std::uint64_t base, int channel) {
  return base ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(channel + 1));
}

}  // namespace

PipelineResult run_pipeline(const Scenario& s, const PipelineConfig& config) {
  PipelineResult result;
  const StageOneResult stage =
      allocate_channels(s, config.criterion, config.min_rate);
  result.alloc = stage.alloc;
  result.admitted_d2d = stage.admitted_d2d;
  result.powers.assign(s.d2d_count(), s.min_power());

  for (int q = 0; q < s.channel_count(); ++q) {
    bool occupied = false;
    for (int k = 0; k < s.d2d_count(); ++k) {
      occupied = occupied || result.alloc.d2d_channel[k] == q;
    }
    if (!occupied) continue;

    ClusterRun run;
    run.channel = q;
    const ClusterGame cluster = build_cluster_game(s, result.alloc, q);
    run.members = cluster.members;
    LearnerParams params = config.learner;
    run.trace = run_learning(cluster.game, params, config.noise,
                             cluster_seed(config.seed, q));
    const ConvergenceReport report =
        convergence_stats(cluster.game, run.trace, {}, config.window);
    run.modal_actions = report.modal_actions;
    for (std::size_t i = 0; i < cluster.members.size(); ++i) {
      result.powers[cluster.members[i]] =
          cluster.game.action_value(static_cast<int>(i),
                                    report.modal_actions[i]);
    }
    result.cluster_runs.push_back(std::move(run));
  }

  result.cellular_sum = cellular_utility_sum(s, result.alloc, result.powers);
  result.d2d_sum = evaluate_d2d_sum_assigned(s, result.alloc, result.powers);
  result.total = result.cellular_sum + result.d2d_sum;
  return result;
}

namespace {

enum class SearchObjective { kPriority, kSum };

SearchResult exhaustive_search(const Scenario& s, SearchObjective objective) {
  const int L = s.cellular_count();
  const int K = s.d2d_count();
  const int Q = s.channel_count();
  const int M = static_cast<int>(s.config.power_levels.size());

  double states = 1.0;
  for (int i = 0; i < L + K; ++i) states *= Q;
  for (int i = 0; i < K; ++i) states *= M;
  if (states > 1e7) throw std::invalid_argument("exhaustive scale exceeded");

  SearchResult best;
  bool have_best = false;
  double best_primary = 0.0, best_secondary = 0.0;

  ChannelAllocation alloc;
  alloc.cellular_channel.resize(L);
  std::iota(alloc.cellular_channel.begin(), alloc.cellular_channel.end(), 0);
  alloc.d2d_channel.assign(K, 0);
  PowerProfile powers(K, s.min_power());

  do {
    std::vector<int> d2d(K, 0);
    bool more_d2d = true;
    while (more_d2d) {
      alloc.d2d_channel = d2d;
      std::vector<int> level(K, 0);
      bool more_levels = true;
      while (more_levels) {
        for (int k = 0; k < K; ++k) {
          powers[k] = s.config.power_levels[level[k]];
        }
        const double cell = cellular_utility_sum(s, alloc, powers);
        const double d2d_sum = K > 0
                                   ? d2d_utility_sum(s, alloc, powers)
                                   : 0.0;
        double primary, secondary;
        if (objective == SearchObjective::kPriority) {
          primary = cell;
          secondary = d2d_sum;
        } else {
          primary = cell + d2d_sum;
          secondary = 0.0;
        }
        if (!have_best || primary > best_primary ||
            (primary == best_primary && secondary > best_secondary)) {
          have_best = true;
          best_primary = primary;
          best_secondary = secondary;
          best.alloc = alloc;
          best.powers = powers;
          best.cellular_sum = cell;
          best.d2d_sum = d2d_sum;
          best.total = cell + d2d_sum;
        }
        more_levels = false;
        for (int i = K - 1; i >= 0; --i) {
          if (++level[i] < M) {
            more_levels = true;
            break;
          }
          level[i] = 0;
        }
      }
      more_d2d = false;
      for (int i = K - 1; i >= 0; --i) {
        if (++d2d[i] < Q) {
          more_d2d = true;
          break;
        }
        d2d[i] = 0;
      }
    }
  } while (std::next_permutation(alloc.cellular_channel.begin(),
                                 alloc.cellular_channel.end()));
  return best;
}

}  // namespace

SearchResult exhaustive_priority_search(const Scenario& s) {
  return exhaustive_search(s, SearchObjective::kPriority);
}

SearchResult exhaustive_sum_search(const Scenario& s) {
  return exhaustive_search(s, SearchObjective::kSum);
}

SearchResult random_allocation(const Scenario& s, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const int L = s.cellular_count();
  const int K = s.d2d_count();

  SearchResult result;
  result.alloc.cellular_channel.resize(L);
  std::iota(result.alloc.cellular_channel.begin(),
            result.alloc.cellular_channel.end(), 0);
  for (int l = L - 1; l > 0; --l) {
    std::swap(result.alloc.cellular_channel[l],
              result.alloc.cellular_channel[uniform_index(gen, l + 1)]);
  }
  result.alloc.d2d_channel.resize(K);
  result.powers.resize(K);
  for (int k = 0; k < K; ++k) {
    result.alloc.d2d_channel[k] = uniform_index(gen, s.channel_count());
    result.powers[k] = s.config.power_levels[uniform_index(
        gen, static_cast<int>(s.config.power_levels.size()))];
  }
  result.cellular_sum = cellular_utility_sum(s, result.alloc, result.powers);
  result.d2d_sum =
      K > 0 ? d2d_utility_sum(s, result.alloc, result.powers) : 0.0;
  result.total = result.cellular_sum + result.d2d_sum;
  return result;
}

std::vector<ComparisonRecord> run_comparison(const ScenarioConfig& config,
                                             const CompareConfig& compare) {
  if (compare.replications < 1) {
    throw std::invalid_argument("need at least one replication");
  }
  std::vector<ComparisonRecord> records;
  for (int r = 0; r < compare.replications; ++r) {
    const std::uint64_t seed = compare.seed + static_cast<std::uint64_t>(r);
    const Scenario s = build_scenario(config, seed);

    auto timed = [&](const std::string& strategy, auto&& fn) {
      const auto start = std::chrono::steady_clock::now();
      const auto run = fn();
      const std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - start;
      records.push_back({r, seed, strategy, run.cellular_sum, run.d2d_sum,
                         run.total, elapsed.count()});
    };

    timed("pipeline", [&] {
      PipelineConfig pipeline = compare.pipeline;
      pipeline.seed = seed;
      return run_pipeline(s, pipeline);
    });
    if (compare.with_exhaustive) {
      timed("priority_exhaustive", [&] { return exhaustive_priority_search(s); });
      timed("sum_exhaustive", [&] { return exhaustive_sum_search(s); });
    }
    timed("random", [&] { return random_allocation(s, seed); });
  }
  return records;
}

namespace {

std::string number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

}  // namespace

void write_allocation_csv(const Scenario& s, const ChannelAllocation& alloc,
                          std::ostream& out) {
  out << "user_id,user_kind,channel\n";
  for (int l = 0; l < s.cellular_count(); ++l) {
    out << l << ",cellular," << alloc.cellular_channel[l] << "\n";
  }
  for (int k = 0; k < s.d2d_count(); ++k) {
    out << k << ",d2d," << alloc.d2d_channel[k] << "\n";
  }
}

nlohmann::json stage_one_summary(const Scenario& s,
                                 AllocationCriterion criterion,
                                 const StageOneResult& stage) {
  nlohmann::json j;
  j["criterion"] = criterion_name(criterion);
  j["cellular_count"] = s.cellular_count();
  j["d2d_count"] = s.d2d_count();
  j["channel_count"] = s.channel_count();
  j["matching_weight"] = stage.matching_weight;
  j["cluster_cost"] = stage.cluster_cost;
  j["admitted_d2d"] = stage.admitted_d2d;
  j["channel_loads"] = stage.loads;
  j["cellular_lower_bound"] =
      stage.admitted_d2d == s.d2d_count()
          ? nlohmann::json(cellular_lower_bound(s, stage.alloc))
          : nlohmann::json();
  return j;
}

// Wall time stays out of the CSV so repeated runs with one seed are
// byte-identical; timing is summarized in the plot manifest instead.
void write_comparison_csv(const std::vector<ComparisonRecord>& records,
                          std::ostream& out) {
  out << "replication,seed,strategy,cellular_sum,d2d_sum,total\n";
  for (const ComparisonRecord& rec : records) {
    out << rec.replication << "," << rec.seed << "," << rec.strategy << ","
        << number(rec.cellular_sum) << "," << number(rec.d2d_sum) << ","
        << number(rec.total) << "\n";
  }
}

nlohmann::json comparison_plot_data(
    const std::vector<ComparisonRecord>& records) {
  std::vector<std::string> strategies;
  for (const ComparisonRecord& rec : records) {
    if (std::find(strategies.begin(), strategies.end(), rec.strategy) ==
        strategies.end()) {
      strategies.push_back(rec.strategy);
    }
  }
  nlohmann::json series = nlohmann::json::array();
  for (const std::string& strategy : strategies) {
    nlohmann::json points = nlohmann::json::array();
    double mean = 0.0, wall = 0.0;
    int n = 0;
    for (const ComparisonRecord& rec : records) {
      if (rec.strategy == strategy) {
        points.push_back({rec.replication, rec.total});
        mean += rec.total;
        wall += rec.wall_seconds;
        ++n;
      }
    }
    series.push_back({{"label", strategy},
                      {"points", points},
                      {"mean_total", n > 0 ? mean / n : 0.0},
                      {"mean_wall_seconds", n > 0 ? wall / n : 0.0}});
  }
  return {{"x_label", "replication"},
          {"y_label", "aggregate_utility"},
          {"series", series}};
}

}  // namespace d2d
