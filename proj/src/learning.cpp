#include "d2d/learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "d2d/random.hpp"

namespace d2d {

void LearnerParams::validate() const {
  if (c_lambda <= 0.0) throw std::invalid_argument("c_lambda must be positive");
  if (c_epsilon < 0.0) throw std::invalid_argument("c_epsilon must be nonnegative");
  if (rho_lambda < 0.5 || rho_lambda > 1.0) {
    throw std::invalid_argument("rho_lambda must lie in [1/2, 1]");
  }
  if (zeta < 0.0 || zeta > 1.0) throw std::invalid_argument("zeta must lie in [0, 1]");
  if (memory < 1) throw std::invalid_argument("memory must be at least 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
}

double epsilon_schedule(int t, double c_epsilon, int players) {
  if (t < 1) throw std::invalid_argument("trials start at 1");
  if (players < 1) throw std::invalid_argument("players must be positive");
  const double eps =
      c_epsilon * std::pow(static_cast<double>(t), -1.0 / players);
  return std::clamp(eps, 0.0, 1.0);
}

double learning_rate(double c_lambda, long long visits, double rho) {
  if (c_lambda <= 0.0 || visits < 0) {
    throw std::invalid_argument("bad learning-rate arguments");
  }
  return std::pow(c_lambda + static_cast<double>(visits), -rho);
}

std::vector<double> better_reply_distribution(
    const StrategicGame& game, int player, const std::vector<double>& q_table,
    const std::deque<long long>& memory, int last_action, double zeta) {
  if (memory.empty()) throw std::invalid_argument("empty memory");
  const int actions = game.action_count(player);
  if (last_action < 0 || last_action >= actions) {
    throw std::invalid_argument("last action out of range");
  }

  std::vector<double> mean_q(actions, 0.0);
  for (int a = 0; a < actions; ++a) {
    for (long long profile : memory) {
      mean_q[a] += q_table[game.with_action(profile, player, a)];
    }
    mean_q[a] /= static_cast<double>(memory.size());
  }

  std::vector<int> better;
  for (int a = 0; a < actions; ++a) {
    if (mean_q[a] > mean_q[last_action]) better.push_back(a);
  }

  std::vector<double> dist(actions, 0.0);
  dist[last_action] += zeta;
  if (better.empty()) {
    dist[last_action] += 1.0 - zeta;
  } else {
    for (int a : better) dist[a] += (1.0 - zeta) / better.size();
  }
  return dist;
}

BetterReplyLearner::BetterReplyLearner(const StrategicGame& game,
                                       const LearnerParams& params,
                                       const NoiseModel& noise,
                                       std::uint64_t seed)
    : game_(game), params_(params), noise_(noise), gen_(seed) {
  params_.validate();
  if (noise_.half_width < 0.0) {
    throw std::invalid_argument("noise half-width must be nonnegative");
  }
  q_.assign(game.players(),
            std::vector<double>(game.profile_count(), 0.0));
  visits_.assign(game.profile_count(), 0);
  last_actions_.assign(game.players(), 0);
  trace_.players = game.players();
}

void BetterReplyLearner::preload_q(int player, std::vector<double> q_values) {
  if (static_cast<long long>(q_values.size()) != game_.profile_count()) {
    throw std::invalid_argument("Q table size mismatch");
  }
  q_[player] = std::move(q_values);
}

void BetterReplyLearner::seed_state(const std::vector<int>& actions) {
  const long long profile = game_.index_of(actions);
  last_actions_ = actions;
  memory_.clear();
  memory_.push_back(profile);
  t_ = 1;
}

void BetterReplyLearner::step() {
  ++t_;
  const int players = game_.players();
  const double eps =
      t_ == 1 ? 1.0 : epsilon_schedule(t_, params_.c_epsilon, players);

  std::vector<int> actions(players);
  for (int k = 0; k < players; ++k) {
    if (t_ == 1 || uniform01(gen_) < eps) {
      actions[k] = uniform_index(gen_, game_.action_count(k));
    } else if (uniform01(gen_) < params_.zeta) {
      actions[k] = last_actions_[k];
    } else {
      std::vector<int> better;
      const int count = game_.action_count(k);
      std::vector<double> mean_q(count, 0.0);
      for (int a = 0; a < count; ++a) {
        for (long long profile : memory_) {
          mean_q[a] += q_[k][game_.with_action(profile, k, a)];
        }
      }
      for (int a = 0; a < count; ++a) {
        if (mean_q[a] > mean_q[last_actions_[k]]) better.push_back(a);
      }
      actions[k] = better.empty()
                       ? last_actions_[k]
                       : better[uniform_index(
                             gen_, static_cast<int>(better.size()))];
    }
  }

  const long long profile = game_.index_of(actions);
  std::vector<double> rewards(players);
  for (int k = 0; k < players; ++k) {
    const double noise =
        noise_.half_width * uniform_range(gen_, -1.0, 1.0);
    rewards[k] = game_.payoff(profile, k) + noise;
  }

  const double lambda =
      learning_rate(params_.c_lambda, visits_[profile], params_.rho_lambda);
  for (int k = 0; k < players; ++k) {
    q_[k][profile] += lambda * (rewards[k] - q_[k][profile]);
  }
  ++visits_[profile];

  memory_.push_back(profile);
  while (static_cast<int>(memory_.size()) > params_.memory) {
    memory_.pop_front();
  }
  last_actions_ = actions;
  trace_.trials.push_back({t_, actions, rewards, eps, lambda});
}

LearningTrace BetterReplyLearner::run() {
  while (t_ < params_.horizon) step();
  return trace_;
}

LearningTrace run_learning(const StrategicGame& game,
                           const LearnerParams& params,
                           const NoiseModel& noise, std::uint64_t seed) {
  BetterReplyLearner learner(game, params, noise, seed);
  return learner.run();
}

ConvergenceReport convergence_stats(
    const StrategicGame& game, const LearningTrace& trace,
    const std::vector<long long>& reference_profiles, int window) {
  const int total = static_cast<int>(trace.trials.size());
  if (total == 0) throw std::invalid_argument("empty trace");
  if (window < 1) throw std::invalid_argument("window must be positive");
  window = std::min(window, total);

  ConvergenceReport report;
  report.window = window;
  report.window_mean_rewards.assign(trace.players, 0.0);
  report.action_frequency.resize(trace.players);
  for (int k = 0; k < trace.players; ++k) {
    report.action_frequency[k].assign(game.action_count(k), 0.0);
  }

  std::vector<int> counts(game.profile_count(), 0);
  for (int i = 0; i < total; ++i) {
    const TrialRecord& rec = trace.trials[i];
    for (int k = 0; k < trace.players; ++k) {
      report.action_frequency[k][rec.actions[k]] += 1.0 / total;
    }
    if (i >= total - window) {
      ++counts[game.index_of(rec.actions)];
      for (int k = 0; k < trace.players; ++k) {
        report.window_mean_rewards[k] += rec.rewards[k] / window;
      }
    }
  }

  int best = 0;
  long long best_profile = -1;
  for (long long p = 0; p < game.profile_count(); ++p) {
    if (counts[p] > best) {
      best = counts[p];
      best_profile = p;
    }
  }
  report.modal_profile = best_profile;
  report.modal_frequency = static_cast<double>(best) / window;
  if (best_profile >= 0) report.modal_actions = game.actions_of(best_profile);

  report.reference_fraction.reserve(reference_profiles.size());
  for (long long p : reference_profiles) {
    report.reference_fraction.push_back(static_cast<double>(counts[p]) /
                                        window);
  }
  return report;
}

void write_trace_csv(const StrategicGame& game, const LearningTrace& trace,
                     std::ostream& out) {
  out << "t";
  for (int k = 0; k < trace.players; ++k) out << ",a" << k + 1;
  for (int k = 0; k < trace.players; ++k) out << ",r" << k + 1;
  out << ",epsilon\n";
  char buf[32];
  for (const TrialRecord& rec : trace.trials) {
    out << rec.t;
    for (int k = 0; k < trace.players; ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g",
                    game.action_value(k, rec.actions[k]));
      out << "," << buf;
    }
    for (int k = 0; k < trace.players; ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", rec.rewards[k]);
      out << "," << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", rec.epsilon);
    out << "," << buf << "\n";
  }
}

}  // namespace d2d
