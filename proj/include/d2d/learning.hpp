#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <random>
#include <vector>

#include "d2d/game.hpp"

namespace d2d {

struct LearnerParams {
  double c_lambda = 1.0;    // learning-rate offset
  double c_epsilon = 0.25;  // exploration scale; 0 disables exploration
  double rho_lambda = 0.5;  // learning-rate decay, in [1/2, 1]
  double zeta = 0.5;        // inertia probability
  int memory = 12;          // remembered joint profiles
  int horizon = 2000;       // trials per run

  void validate() const;
};

struct NoiseModel {
  double half_width = 0.1;  // rewards get uniform zero-mean noise on [-b, b]
};

// Exploration probability at trial t: c_epsilon * t^(-1/players), clamped
// into [0, 1].
double epsilon_schedule(int t, double c_epsilon, int players);

// Step size after `visits` previous plays of a profile:
// (c_lambda + visits)^(-rho).
double learning_rate(double c_lambda, long long visits, double rho);

// Mixed strategy of one player under inertia + better-reply: probability
// zeta on the previous action; the rest spread uniformly over actions whose
// mean Q against the remembered opponent profiles strictly beats the
// previous action's, or back on the previous action when none do.
std::vector<double> better_reply_distribution(
    const StrategicGame& game, int player, const std::vector<double>& q_table,
    const std::deque<long long>& memory, int last_action, double zeta);

struct TrialRecord {
  int t = 0;
  std::vector<int> actions;     // action index per player
  std::vector<double> rewards;  // observed noisy rewards
  double epsilon = 0.0;         // exploration probability in effect
  double lambda = 0.0;          // step size used for the update
};

struct LearningTrace {
  int players = 0;
  std::vector<TrialRecord> trials;
};

// Synchronous multi-agent driver with full monitoring: all players observe
// the played joint profile, keep their own Q-table over joint profiles, and
// update only the entry just played.
class BetterReplyLearner {
 public:
  BetterReplyLearner(const StrategicGame& game, const LearnerParams& params,
                     const NoiseModel& noise, std::uint64_t seed);

  void step();
  LearningTrace run();  // steps until the horizon, returns the trace

  // Test hooks: install Q-values, or start from a known joint profile as if
  // it had just been played.
  void preload_q(int player, std::vector<double> q_values);
  void seed_state(const std::vector<int>& actions);

  int trial() const { return t_; }
  const std::vector<double>& q_table(int player) const { return q_[player]; }
  const std::deque<long long>& memory() const { return memory_; }
  const std::vector<int>& last_actions() const { return last_actions_; }
  const LearningTrace& trace() const { return trace_; }
  long long visits(long long profile) const { return visits_[profile]; }

 private:
  const StrategicGame& game_;
  LearnerParams params_;
  NoiseModel noise_;
  std::mt19937_64 gen_;
  int t_ = 0;
  std::vector<std::vector<double>> q_;  // per player, per joint profile
  std::vector<long long> visits_;       // shared: all players see all plays
  std::deque<long long> memory_;
  std::vector<int> last_actions_;
  LearningTrace trace_;
};

LearningTrace run_learning(const StrategicGame& game,
                           const LearnerParams& params,
                           const NoiseModel& noise, std::uint64_t seed);

struct ConvergenceReport {
  int window = 0;
  long long modal_profile = -1;
  std::vector<int> modal_actions;
  double modal_frequency = 0.0;
  std::vector<double> window_mean_rewards;          // per player
  std::vector<std::vector<double>> action_frequency;  // per player, whole run
  std::vector<double> reference_fraction;  // per reference profile, in window
};

// Final-window statistics of a trace; reference_profiles are typically the
// equilibria the run is expected to settle on.
ConvergenceReport convergence_stats(
    const StrategicGame& game, const LearningTrace& trace,
    const std::vector<long long>& reference_profiles, int window);

// CSV rows t,a1,..,aN,r1,..,rN,epsilon with actions as their real values.
void write_trace_csv(const StrategicGame& game, const LearningTrace& trace,
                     std::ostream& out);

}  // namespace d2d
