#include "d2d/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "d2d/allocation.hpp"

namespace d2d {

StrategicGame::StrategicGame(std::vector<std::vector<double>> action_values)
    : actions_(std::move(action_values)) {
  if (actions_.empty()) throw std::invalid_argument("game needs players");
  stride_.assign(actions_.size(), 1);
  for (int k = static_cast<int>(actions_.size()) - 1; k >= 0; --k) {
    if (actions_[k].empty()) {
      throw std::invalid_argument("player with empty action set");
    }
    if (k + 1 < static_cast<int>(actions_.size())) {
      stride_[k] = stride_[k + 1] *
                   static_cast<long long>(actions_[k + 1].size());
    }
    profile_count_ *= static_cast<long long>(actions_[k].size());
    if (profile_count_ * static_cast<long long>(actions_.size()) > 20'000'000) {
      throw std::invalid_argument("game too large to tabulate");
    }
  }
  payoffs_.assign(static_cast<std::size_t>(profile_count_) * actions_.size(),
                  0.0);
}

long long StrategicGame::index_of(const std::vector<int>& actions) const {
  if (static_cast<int>(actions.size()) != players()) {
    throw std::invalid_argument("profile size mismatch");
  }
  long long index = 0;
  for (int k = 0; k < players(); ++k) {
    if (actions[k] < 0 || actions[k] >= action_count(k)) {
      throw std::invalid_argument("action index out of range");
    }
    index += stride_[k] * actions[k];
  }
  return index;
}

std::vector<int> StrategicGame::actions_of(long long profile) const {
  std::vector<int> actions(players());
  for (int k = 0; k < players(); ++k) {
    actions[k] = static_cast<int>(profile / stride_[k] % action_count(k));
  }
  return actions;
}

long long StrategicGame::with_action(long long profile, int player,
                                     int action) const {
  const int current = action_of(profile, player);
  return profile + stride_[player] * (action - current);
}

int StrategicGame::action_of(long long profile, int player) const {
  return static_cast<int>(profile / stride_[player] % action_count(player));
}

std::vector<double> StrategicGame::values_of(long long profile) const {
  std::vector<double> values(players());
  for (int k = 0; k < players(); ++k) {
    values[k] = actions_[k][action_of(profile, k)];
  }
  return values;
}

ClusterGame build_cluster_game(const Scenario& s,
                               const ChannelAllocation& alloc, int channel) {
  std::vector<int> members;
  for (int k = 0; k < s.d2d_count(); ++k) {
    if (alloc.d2d_channel[k] == channel) members.push_back(k);
  }
  if (members.empty()) throw std::invalid_argument("empty cluster");
  const int cellular = alloc.cellular_on_channel(channel);

  const int n = static_cast<int>(members.size());
  StrategicGame game(
      std::vector<std::vector<double>>(n, s.config.power_levels));
  std::vector<double> prices(n);
  for (int i = 0; i < n; ++i) prices[i] = price_of(s, members[i], cellular);

  PowerProfile powers(s.d2d_count(), s.min_power());
  for (long long profile = 0; profile < game.profile_count(); ++profile) {
    const std::vector<double> values = game.values_of(profile);
    for (int i = 0; i < n; ++i) powers[members[i]] = values[i];
    for (int i = 0; i < n; ++i) {
      game.set_payoff(profile, i, d2d_utility(s, alloc, powers, members[i]));
    }
  }
  return {std::move(game), std::move(members), channel, cellular,
          std::move(prices)};
}

double power_potential(const std::vector<double>& powers,
                       const std::vector<double>& prices) {
  if (powers.size() != prices.size()) {
    throw std::invalid_argument("power and price sizes differ");
  }
  double v = 0.0;
  for (std::size_t i = 0; i < powers.size(); ++i) {
    v += std::log(powers[i]) - prices[i] * powers[i];
  }
  return v;
}

double power_potential(const std::vector<double>& powers, double price) {
  return power_potential(powers,
                         std::vector<double>(powers.size(), price));
}

std::vector<double> potential_table(const StrategicGame& game,
                                    const std::vector<double>& prices) {
  if (static_cast<int>(prices.size()) != game.players()) {
    throw std::invalid_argument("price count must equal player count");
  }
  std::vector<double> table(game.profile_count());
  for (long long profile = 0; profile < game.profile_count(); ++profile) {
    table[profile] = power_potential(game.values_of(profile), prices);
  }
  return table;
}

bool is_exact_potential(const StrategicGame& game,
                        const std::vector<double>& potential, double tol,
                        const std::vector<char>* admissible) {
  if (static_cast<long long>(potential.size()) != game.profile_count()) {
    throw std::invalid_argument("potential table size mismatch");
  }
  for (long long i = 0; i < game.profile_count(); ++i) {
    if (admissible && !(*admissible)[i]) continue;
    for (int k = 0; k < game.players(); ++k) {
      for (int a = 0; a < game.action_count(k); ++a) {
        const long long j = game.with_action(i, k, a);
        if (j == i) continue;
        if (admissible && !(*admissible)[j]) continue;
        const double payoff_diff = game.payoff(i, k) - game.payoff(j, k);
        const double potential_diff = potential[i] - potential[j];
        if (std::abs(payoff_diff - potential_diff) > tol) return false;
      }
    }
  }
  return true;
}

std::vector<long long> enumerate_nash(const StrategicGame& game,
                                      const std::vector<char>* admissible) {
  if (game.profile_count() > 1'000'000) {
    throw std::invalid_argument("enumeration scale exceeded");
  }
  if (admissible &&
      static_cast<long long>(admissible->size()) != game.profile_count()) {
    throw std::invalid_argument("admissibility mask size mismatch");
  }
  std::vector<long long> equilibria;
  for (long long i = 0; i < game.profile_count(); ++i) {
    if (admissible && !(*admissible)[i]) continue;
    bool stable = true;
    for (int k = 0; k < game.players() && stable; ++k) {
      for (int a = 0; a < game.action_count(k); ++a) {
        const long long j = game.with_action(i, k, a);
        if (j == i) continue;
        if (admissible && !(*admissible)[j]) continue;
        if (game.payoff(j, k) > game.payoff(i, k)) {
          stable = false;
          break;
        }
      }
    }
    if (stable) equilibria.push_back(i);
  }
  return equilibria;
}

std::vector<long long> potential_maximizers(
    const std::vector<double>& potential, const std::vector<char>* admissible,
    double tol) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < potential.size(); ++i) {
    if (admissible && !(*admissible)[i]) continue;
    best = std::max(best, potential[i]);
  }
  std::vector<long long> argmax;
  for (std::size_t i = 0; i < potential.size(); ++i) {
    if (admissible && !(*admissible)[i]) continue;
    if (potential[i] >= best - tol) argmax.push_back(static_cast<long long>(i));
  }
  return argmax;
}

bool is_separable_concave(const std::vector<std::vector<double>>& components,
                          double tol) {
  for (const std::vector<double>& v : components) {
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      if (v[i] + tol < (v[i - 1] + v[i + 1]) / 2.0) return false;
    }
  }
  return true;
}

namespace {

long long box_index(const std::vector<int>& shape, const std::vector<int>& x) {
  long long index = 0;
  for (std::size_t i = 0; i < shape.size(); ++i) index = index * shape[i] + x[i];
  return index;
}

bool in_box(const std::vector<int>& shape, const std::vector<int>& x) {
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (x[i] < 0 || x[i] >= shape[i]) return false;
  }
  return true;
}

bool lmp_pair(const std::vector<int>& shape, const std::vector<double>& values,
              const std::vector<int>& x, const std::vector<int>& y,
              const std::vector<std::vector<int>>& midpoints) {
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const std::vector<int>& z : midpoints) {
    if (!in_box(shape, z)) continue;
    any = true;
    best = std::max(best, values[box_index(shape, z)]);
  }
  if (!any) return false;
  const double fx = values[box_index(shape, x)];
  const double fy = values[box_index(shape, y)];
  for (int i = 1; i <= 99; ++i) {  // existential t on a fixed grid
    const double t = i / 100.0;
    if (best >= t * fx + (1.0 - t) * fy) return true;
  }
  if (fx != fy) return best > std::min(fx, fy);
  return best >= fx;
}

}  // namespace

bool satisfies_lmp(const std::vector<int>& shape,
                   const std::vector<double>& values) {
  const int dims = static_cast<int>(shape.size());
  long long total = 1;
  for (int s : shape) {
    if (s < 1) throw std::invalid_argument("empty lattice dimension");
    total *= s;
  }
  if (static_cast<long long>(values.size()) != total) {
    throw std::invalid_argument("value table size mismatch");
  }

  std::vector<int> x(dims, 0);
  bool done = dims == 0;
  while (!done) {
    // Partners at l1 distance exactly 2, each unordered pair visited once.
    for (int i = 0; i < dims; ++i) {
      std::vector<int> y = x;
      y[i] += 2;
      if (in_box(shape, y)) {
        std::vector<int> z = x;
        z[i] += 1;
        if (!lmp_pair(shape, values, x, y, {z})) return false;
      }
      for (int j = i + 1; j < dims; ++j) {
        for (int dj : {+1, -1}) {
          std::vector<int> y2 = x;
          y2[i] += 1;
          y2[j] += dj;
          if (!in_box(shape, y2)) continue;
          std::vector<int> z1 = x, z2 = x;
          z1[i] += 1;
          z2[j] += dj;
          if (!lmp_pair(shape, values, x, y2, {z1, z2})) return false;
        }
      }
    }
    done = true;
    for (int i = dims - 1; i >= 0; --i) {
      if (++x[i] < shape[i]) {
        done = false;
        break;
      }
      x[i] = 0;
    }
  }
  return true;
}

std::vector<double> welfare_table(const StrategicGame& game) {
  std::vector<double> welfare(game.profile_count(), 0.0);
  for (long long i = 0; i < game.profile_count(); ++i) {
    for (int k = 0; k < game.players(); ++k) welfare[i] += game.payoff(i, k);
  }
  return welfare;
}

double price_of_stability(const StrategicGame& game) {
  const std::vector<long long> equilibria = enumerate_nash(game);
  if (equilibria.empty()) {
    throw InfeasibleError("no pure equilibrium");
  }
  const std::vector<double> welfare = welfare_table(game);
  const double best = *std::max_element(welfare.begin(), welfare.end());
  double best_stable = -std::numeric_limits<double>::infinity();
  for (long long i : equilibria) best_stable = std::max(best_stable, welfare[i]);
  return best / best_stable;
}

StabilityBound pos_upper_bound(const Scenario& s,
                               const ChannelAllocation& alloc, int channel) {
  std::vector<int> members;
  for (int k = 0; k < s.d2d_count(); ++k) {
    if (alloc.d2d_channel[k] == channel) members.push_back(k);
  }
  if (members.empty()) throw std::invalid_argument("empty cluster");

  const double pmin = s.min_power();
  const double pmax = s.max_power();
  StabilityBound bound;
  bound.gamma_min = std::numeric_limits<double>::infinity();
  for (int k : members) {
    double interference =
        s.config.cellular_power * s.h_bs_to_d2d(k, channel);
    for (int j : members) {
      if (j != k) interference += pmax * s.h_d2d_cross(j, k, channel);
    }
    const double gamma =
        pmin * s.h_d2d_pair(k, channel) / (1.0 + interference);
    bound.gamma_min = std::min(bound.gamma_min, gamma);
  }
  if (bound.gamma_min <= 1.0) {
    bound.vacuous = true;
    bound.value = std::numeric_limits<double>::quiet_NaN();
  } else {
    bound.value = std::log(pmax) / std::log(bound.gamma_min);
  }
  return bound;
}

QosPowerGame build_qos_power_game(const Scenario& s,
                                  const ChannelAllocation& alloc, int channel,
                                  const std::vector<double>& sir_floors) {
  std::vector<int> members;
  for (int k = 0; k < s.d2d_count(); ++k) {
    if (alloc.d2d_channel[k] == channel) members.push_back(k);
  }
  if (members.empty()) throw std::invalid_argument("empty cluster");
  if (sir_floors.size() != members.size()) {
    throw std::invalid_argument("one SIR floor per cluster member required");
  }

  const int n = static_cast<int>(members.size());
  StrategicGame game(
      std::vector<std::vector<double>>(n, s.config.power_levels));
  QosPowerGame result{std::move(game), members, {}, {}};
  result.admissible.assign(result.game.profile_count(), 1);

  for (long long profile = 0; profile < result.game.profile_count();
       ++profile) {
    const std::vector<double> values = result.game.values_of(profile);
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      result.game.set_payoff(profile, i, -values[i]);
      double interference =
          s.config.cellular_power * s.h_bs_to_d2d(members[i], channel);
      for (int j = 0; j < n; ++j) {
        if (j != i) {
          interference +=
              values[j] * s.h_d2d_cross(members[j], members[i], channel);
        }
      }
      const double sir =
          values[i] * s.h_d2d_pair(members[i], channel) / (1.0 + interference);
      if (sir < sir_floors[i]) ok = false;
    }
    result.admissible[profile] = ok ? 1 : 0;
    if (ok) result.admissible_profiles.push_back(profile);
  }
  return result;
}

}  // namespace d2d
