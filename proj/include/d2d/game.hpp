#pragma once

#include <cstdint>
#include <vector>

#include "d2d/network.hpp"

namespace d2d {

// Finite strategic-form game with dense payoff storage. Profiles are
// indexed mixed-radix with player 0 most significant, so profile 0 is the
// all-first-action tuple and enumeration order is lexicographic.
class StrategicGame {
 public:
  explicit StrategicGame(std::vector<std::vector<double>> action_values);

  int players() const { return static_cast<int>(actions_.size()); }
  int action_count(int player) const {
    return static_cast<int>(actions_[player].size());
  }
  double action_value(int player, int index) const {
    return actions_[player][index];
  }
  const std::vector<double>& action_values(int player) const {
    return actions_[player];
  }
  long long profile_count() const { return profile_count_; }

  long long index_of(const std::vector<int>& actions) const;
  std::vector<int> actions_of(long long profile) const;
  // Replace player's action inside an existing profile index.
  long long with_action(long long profile, int player, int action) const;
  int action_of(long long profile, int player) const;
  std::vector<double> values_of(long long profile) const;

  double payoff(long long profile, int player) const {
    return payoffs_[static_cast<std::size_t>(profile) * players() + player];
  }
  void set_payoff(long long profile, int player, double value) {
    payoffs_[static_cast<std::size_t>(profile) * players() + player] = value;
  }

 private:
  std::vector<std::vector<double>> actions_;
  std::vector<long long> stride_;
  long long profile_count_ = 1;
  std::vector<double> payoffs_;
};

// The per-cluster power game: players are the D2D users sharing channel q,
// actions are the configured power levels, rewards are their expected
// utilities under the fixed channel allocation.
struct ClusterGame {
  StrategicGame game;
  std::vector<int> members;    // D2D user ids, ascending
  int channel = 0;
  int cellular_user = 0;       // the cellular user sharing the channel
  std::vector<double> prices;  // per-member price coefficient
};

ClusterGame build_cluster_game(const Scenario& s,
                               const ChannelAllocation& alloc, int channel);

// Sum of log power minus priced power; the closed-form potential of the
// cluster power game.
double power_potential(const std::vector<double>& powers,
                       const std::vector<double>& prices);
double power_potential(const std::vector<double>& powers, double price);

// Potential evaluated at every profile of a game, from its action values.
std::vector<double> potential_table(const StrategicGame& game,
                                    const std::vector<double>& prices);

// True when every unilateral payoff difference equals the corresponding
// potential difference within tol. An optional admissibility mask restricts
// the check to pairs of admissible profiles.
bool is_exact_potential(const StrategicGame& game,
                        const std::vector<double>& potential, double tol,
                        const std::vector<char>* admissible = nullptr);

// All pure equilibria by full enumeration, ascending profile index.
// Guarded to 1e6 profiles. With a mask, deviations leading outside the
// admissible set do not count.
std::vector<long long> enumerate_nash(const StrategicGame& game,
                                      const std::vector<char>* admissible = nullptr);

std::vector<long long> potential_maximizers(
    const std::vector<double>& potential,
    const std::vector<char>* admissible = nullptr, double tol = 1e-12);

// Midpoint concavity of per-player components on consecutive integer grids.
bool is_separable_concave(const std::vector<std::vector<double>>& components,
                          double tol = 1e-12);

// Larger-midpoint check over a full integer box; values are flattened with
// the same player-0-major order used by StrategicGame. For every pair at
// l1 distance 2, either some convex combination on a fixed t grid is
// dominated by the best midpoint, or the exact comparison branch holds.
bool satisfies_lmp(const std::vector<int>& shape,
                   const std::vector<double>& values);

std::vector<double> welfare_table(const StrategicGame& game);

// Best social welfare over all profiles divided by best welfare over the
// equilibria. Throws InfeasibleError when there is no pure equilibrium.
double price_of_stability(const StrategicGame& game);

struct StabilityBound {
  double gamma_min = 0.0;
  double value = 0.0;   // log max power over log gamma_min
  bool vacuous = false; // gamma_min <= 1: no finite guarantee
};

// Worst-member SIR floor (own link at minimum power, everything else at
// maximum interference) and the resulting efficiency bound.
StabilityBound pos_upper_bound(const Scenario& s,
                               const ChannelAllocation& alloc, int channel);

// Power game with SIR floors: payoff is negative transmit power and a
// profile is admissible only when every member meets its floor.
struct QosPowerGame {
  StrategicGame game;
  std::vector<int> members;
  std::vector<char> admissible;  // per profile
  std::vector<long long> admissible_profiles;
};

QosPowerGame build_qos_power_game(const Scenario& s,
                                  const ChannelAllocation& alloc, int channel,
                                  const std::vector<double>& sir_floors);

}  // namespace d2d
