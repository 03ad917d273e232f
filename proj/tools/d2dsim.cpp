#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "d2d/experiment.hpp"
#include "d2d/game.hpp"
#include "d2d/payoff_io.hpp"
#include "d2d/scenario_io.hpp"

namespace {

using nlohmann::json;

struct LearnerFlags {
  d2d::LearnerParams params;
  double noise = 0.1;
  std::uint64_t seed = 1;
  int window = 500;
};

void add_learner_flags(CLI::App* cmd, LearnerFlags& flags) {
  cmd->add_option("--c-lambda", flags.params.c_lambda, "learning-rate offset");
  cmd->add_option("--c-epsilon", flags.params.c_epsilon, "exploration scale");
  cmd->add_option("--rho-lambda", flags.params.rho_lambda,
                  "learning-rate decay in [0.5, 1]");
  cmd->add_option("--zeta", flags.params.zeta, "inertia probability");
  cmd->add_option("--memory", flags.params.memory, "profile memory length");
  cmd->add_option("--horizon", flags.params.horizon, "trials per run");
  cmd->add_option("--noise", flags.noise, "reward noise half-width");
  cmd->add_option("--window", flags.window, "final window length");
}

std::filesystem::path prepare_out_dir(const std::string& out) {
  std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << body;
}

json report_to_json(const d2d::StrategicGame& game,
                    const d2d::ConvergenceReport& report,
                    const std::vector<long long>& reference) {
  json j;
  j["window"] = report.window;
  j["modal_frequency"] = report.modal_frequency;
  if (report.modal_profile >= 0) {
    j["modal_actions"] = game.values_of(report.modal_profile);
  }
  j["window_mean_rewards"] = report.window_mean_rewards;
  json freq = json::array();
  for (int k = 0; k < game.players(); ++k) {
    json per_action = json::object();
    for (int a = 0; a < game.action_count(k); ++a) {
      std::ostringstream key;
      key << game.action_value(k, a);
      per_action[key.str()] = report.action_frequency[k][a];
    }
    freq.push_back(per_action);
  }
  j["action_frequency"] = freq;
  json refs = json::array();
  for (std::size_t i = 0; i < reference.size(); ++i) {
    refs.push_back({{"actions", game.values_of(reference[i])},
                    {"window_fraction", report.reference_fraction[i]}});
  }
  j["equilibria"] = refs;
  return j;
}

d2d::LearningTrace parse_trace_csv(const std::string& path,
                                   std::vector<std::vector<double>>& actions_seen) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty trace file");

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  int players = 0;
  while (1 + players < static_cast<int>(header.size()) &&
         header[1 + players] == "a" + std::to_string(players + 1)) {
    ++players;
  }
  if (players == 0 || header.size() != 2 + 2 * static_cast<std::size_t>(players) ||
      header[0] != "t" || header.back() != "epsilon") {
    throw std::invalid_argument("trace header must be t,a1..aN,r1..rN,epsilon");
  }

  std::vector<std::vector<double>> value_rows;
  d2d::LearningTrace trace;
  trace.players = players;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> fields;
    while (std::getline(ss, field, ',')) fields.push_back(std::stod(field));
    if (fields.size() != 2 + 2 * static_cast<std::size_t>(players)) {
      throw std::invalid_argument("trace row has wrong field count");
    }
    d2d::TrialRecord rec;
    rec.t = static_cast<int>(fields[0]);
    rec.rewards.assign(fields.begin() + 1 + players,
                       fields.begin() + 1 + 2 * players);
    rec.epsilon = fields.back();
    value_rows.emplace_back(fields.begin() + 1, fields.begin() + 1 + players);
    trace.trials.push_back(std::move(rec));
  }
  if (trace.trials.empty()) throw std::invalid_argument("trace has no rows");

  actions_seen.assign(players, {});
  for (int k = 0; k < players; ++k) {
    for (const auto& row : value_rows) {
      if (std::find(actions_seen[k].begin(), actions_seen[k].end(), row[k]) ==
          actions_seen[k].end()) {
        actions_seen[k].push_back(row[k]);
      }
    }
    std::sort(actions_seen[k].begin(), actions_seen[k].end());
  }
  for (std::size_t i = 0; i < value_rows.size(); ++i) {
    std::vector<int> idx(players);
    for (int k = 0; k < players; ++k) {
      idx[k] = static_cast<int>(
          std::find(actions_seen[k].begin(), actions_seen[k].end(),
                    value_rows[i][k]) -
          actions_seen[k].begin());
    }
    trace.trials[i].actions = std::move(idx);
  }
  return trace;
}

int run_allocate(const std::string& scenario_path, const std::string& criterion,
                 double min_rate, std::optional<std::uint64_t> seed,
                 const std::string& out) {
  d2d::ScenarioConfig config = d2d::load_scenario_config(scenario_path);
  if (seed) config.seed = *seed;
  const d2d::Scenario s = d2d::build_scenario(config);
  const d2d::AllocationCriterion crit = d2d::parse_criterion(criterion);
  const d2d::StageOneResult stage = d2d::allocate_channels(s, crit, min_rate);

  const auto dir = prepare_out_dir(out);
  std::ostringstream csv;
  d2d::write_allocation_csv(s, stage.alloc, csv);
  write_file(dir / "allocation.csv", csv.str());
  write_file(dir / "summary.json",
             d2d::stage_one_summary(s, crit, stage).dump(2) + "\n");
  std::cout << "allocated " << stage.admitted_d2d << "/" << s.d2d_count()
            << " D2D users across " << s.channel_count() << " channels\n";
  return 0;
}

int run_learn_table(const std::string& payoffs_path, const LearnerFlags& flags,
                    const std::string& out) {
  const d2d::StrategicGame game = d2d::load_payoff_table(payoffs_path);
  const d2d::LearningTrace trace = d2d::run_learning(
      game, flags.params, d2d::NoiseModel{flags.noise}, flags.seed);
  const std::vector<long long> nash = d2d::enumerate_nash(game);
  const d2d::ConvergenceReport report =
      d2d::convergence_stats(game, trace, nash, flags.window);

  const auto dir = prepare_out_dir(out);
  std::ostringstream csv;
  d2d::write_trace_csv(game, trace, csv);
  write_file(dir / "trace.csv", csv.str());
  write_file(dir / "report.json",
             report_to_json(game, report, nash).dump(2) + "\n");
  std::cout << "learned for " << flags.params.horizon << " trials; modal profile ";
  if (report.modal_profile >= 0) {
    for (double v : game.values_of(report.modal_profile)) std::cout << v << " ";
  }
  std::cout << "at frequency " << report.modal_frequency << "\n";
  return 0;
}

int run_learn_scenario(const std::string& scenario_path,
                       const std::string& criterion, double min_rate,
                       int channel, const LearnerFlags& flags,
                       const std::string& out) {
  const d2d::ScenarioConfig config = d2d::load_scenario_config(scenario_path);
  const d2d::Scenario s = d2d::build_scenario(config);
  d2d::PipelineConfig pipeline;
  pipeline.criterion = d2d::parse_criterion(criterion);
  pipeline.min_rate = min_rate;
  pipeline.learner = flags.params;
  pipeline.noise = d2d::NoiseModel{flags.noise};
  pipeline.seed = flags.seed;
  pipeline.window = flags.window;
  const d2d::PipelineResult result = d2d::run_pipeline(s, pipeline);

  const auto dir = prepare_out_dir(out);
  json summary;
  summary["cellular_sum"] = result.cellular_sum;
  summary["d2d_sum"] = result.d2d_sum;
  summary["total"] = result.total;
  summary["admitted_d2d"] = result.admitted_d2d;
  json clusters = json::array();
  for (const d2d::ClusterRun& run : result.cluster_runs) {
    if (channel >= 0 && run.channel != channel) continue;
    const d2d::ClusterGame cluster =
        d2d::build_cluster_game(s, result.alloc, run.channel);
    std::ostringstream csv;
    d2d::write_trace_csv(cluster.game, run.trace, csv);
    write_file(dir / ("trace_ch" + std::to_string(run.channel) + ".csv"),
               csv.str());
    const std::vector<long long> nash = d2d::enumerate_nash(cluster.game);
    const d2d::ConvergenceReport report =
        d2d::convergence_stats(cluster.game, run.trace, nash, flags.window);
    json entry = report_to_json(cluster.game, report, nash);
    entry["channel"] = run.channel;
    entry["members"] = run.members;
    clusters.push_back(entry);
  }
  summary["clusters"] = clusters;
  write_file(dir / "report.json", summary.dump(2) + "\n");
  std::cout << "ran " << result.cluster_runs.size()
            << " cluster learning runs; total utility " << result.total << "\n";
  return 0;
}

int run_compare(const std::string& scenario_path, int replications,
                std::optional<std::uint64_t> seed, const std::string& criterion,
                double min_rate, bool no_exhaustive, const LearnerFlags& flags,
                const std::string& out) {
  const d2d::ScenarioConfig config = d2d::load_scenario_config(scenario_path);
  d2d::CompareConfig compare;
  compare.replications = replications;
  compare.seed = seed.value_or(config.seed);
  compare.pipeline.criterion = d2d::parse_criterion(criterion);
  compare.pipeline.min_rate = min_rate;
  compare.pipeline.learner = flags.params;
  compare.pipeline.noise = d2d::NoiseModel{flags.noise};
  compare.pipeline.window = flags.window;
  compare.with_exhaustive = !no_exhaustive;
  const std::vector<d2d::ComparisonRecord> records =
      d2d::run_comparison(config, compare);

  const auto dir = prepare_out_dir(out);
  std::ostringstream csv;
  d2d::write_comparison_csv(records, csv);
  write_file(dir / "comparison.csv", csv.str());
  write_file(dir / "plot.json",
             d2d::comparison_plot_data(records).dump(2) + "\n");
  std::cout << "compared " << replications << " replications, "
            << records.size() << " records\n";
  return 0;
}

int run_analyze(const std::string& trace_path, const std::string& payoffs_path,
                int window, const std::string& out) {
  std::vector<std::vector<double>> actions_seen;
  const d2d::LearningTrace raw = parse_trace_csv(trace_path, actions_seen);

  std::optional<d2d::StrategicGame> table;
  if (!payoffs_path.empty()) table = d2d::load_payoff_table(payoffs_path);

  // Index the trace against the table's action sets when given, otherwise
  // against the values observed in the trace itself.
  const std::vector<std::vector<double>> sets =
      table ? [&] {
        std::vector<std::vector<double>> s;
        for (int k = 0; k < table->players(); ++k) {
          s.push_back(table->action_values(k));
        }
        return s;
      }()
            : actions_seen;
  d2d::StrategicGame indexing(sets);
  d2d::LearningTrace trace = raw;
  for (std::size_t i = 0; i < trace.trials.size(); ++i) {
    for (int k = 0; k < trace.players; ++k) {
      const double value = actions_seen[k][raw.trials[i].actions[k]];
      const auto& set = sets[k];
      const auto it = std::find(set.begin(), set.end(), value);
      if (it == set.end()) {
        throw std::invalid_argument("trace action not present in payoff table");
      }
      trace.trials[i].actions[k] = static_cast<int>(it - set.begin());
    }
  }

  std::vector<long long> nash;
  if (table) nash = d2d::enumerate_nash(*table);
  const d2d::ConvergenceReport report =
      d2d::convergence_stats(indexing, trace, nash, window);
  json j = report_to_json(indexing, report, nash);
  if (table && report.modal_profile >= 0) {
    j["modal_is_equilibrium"] =
        std::find(nash.begin(), nash.end(), report.modal_profile) != nash.end();
    json eq_rewards = json::array();
    for (long long p : nash) {
      json rewards = json::array();
      for (int k = 0; k < table->players(); ++k) rewards.push_back(table->payoff(p, k));
      eq_rewards.push_back(rewards);
    }
    j["equilibrium_rewards"] = eq_rewards;
  }
  const std::string body = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << body;
  } else {
    const auto dir = prepare_out_dir(out);
    write_file(dir / "analysis.json", body);
    std::cout << "wrote " << (dir / "analysis.json").string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-stage channel allocation and power-control simulator"};
  app.require_subcommand(1);

  std::string scenario_path, payoffs_path, trace_path, out_dir = "out";
  std::string criterion = "sum";
  double min_rate = 0.0;
  int channel = -1;
  int replications = 10;
  bool no_exhaustive = false;
  std::optional<std::uint64_t> seed_override;
  LearnerFlags flags;
  int exit_code = 0;

  CLI::App* allocate =
      app.add_subcommand("allocate", "stage-one channel allocation");
  allocate->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  allocate->add_option("--criterion", criterion, "sum, qos or fairness");
  allocate->add_option("--min-rate", min_rate, "cellular rate floor (qos)");
  allocate->add_option("--seed", seed_override, "override scenario seed");
  allocate->add_option("--out", out_dir, "output directory");
  allocate->callback([&] {
    exit_code = run_allocate(scenario_path, criterion, min_rate, seed_override,
                             out_dir);
  });

  CLI::App* learn =
      app.add_subcommand("learn", "per-cluster power-control learning");
  learn->add_option("--scenario", scenario_path, "scenario JSON file");
  learn->add_option("--payoffs", payoffs_path, "payoff table CSV");
  learn->add_option("--criterion", criterion, "sum, qos or fairness");
  learn->add_option("--min-rate", min_rate, "cellular rate floor (qos)");
  learn->add_option("--channel", channel, "restrict reports to one channel");
  learn->add_option("--seed", flags.seed, "random seed");
  add_learner_flags(learn, flags);
  learn->add_option("--out", out_dir, "output directory");
  learn->callback([&] {
    if (payoffs_path.empty() == scenario_path.empty()) {
      throw CLI::ValidationError("learn",
                                 "exactly one of --scenario or --payoffs");
    }
    exit_code = payoffs_path.empty()
                    ? run_learn_scenario(scenario_path, criterion, min_rate,
                                         channel, flags, out_dir)
                    : run_learn_table(payoffs_path, flags, out_dir);
  });

  CLI::App* compare =
      app.add_subcommand("compare", "pipeline against reference searches");
  compare->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();
  compare->add_option("--replications", replications, "number of replications");
  compare->add_option("--criterion", criterion, "sum, qos or fairness");
  compare->add_option("--min-rate", min_rate, "cellular rate floor (qos)");
  compare->add_flag("--no-exhaustive", no_exhaustive,
                    "skip the exhaustive reference searches");
  compare->add_option("--seed", seed_override, "base seed for replications");
  add_learner_flags(compare, flags);
  compare->add_option("--out", out_dir, "output directory");
  compare->callback([&] {
    exit_code = run_compare(scenario_path, replications, seed_override,
                            criterion, min_rate, no_exhaustive, flags, out_dir);
  });

  CLI::App* analyze = app.add_subcommand("analyze", "summarize a learning trace");
  analyze->add_option("--trace", trace_path, "trace CSV file")->required();
  analyze->add_option("--payoffs", payoffs_path, "payoff table CSV");
  analyze->add_option("--window", flags.window, "final window length");
  analyze->add_option("--out", out_dir, "output directory (default: stdout)");
  analyze->callback([&] {
    const bool has_out = analyze->count("--out") > 0;
    exit_code = run_analyze(trace_path, payoffs_path, flags.window,
                            has_out ? out_dir : "");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const d2d::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
