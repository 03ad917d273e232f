#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace d2d {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Position& a, const Position& b);

// Distance-based average gain: min(1, (d/d0)^-alpha). Distances below
// d0/1000 are treated as degenerate colocation and rejected.
struct PathLossModel {
  double alpha = 3.0;
  double d0 = 1.0;

  double gain(double dist) const;
  double gain(const Position& a, const Position& b) const;
};

struct FadingModel {
  double fmin = 0.05;  // draws are uniform on (fmin, 1]
};

enum class PriceMode { kScalar, kProportional };

struct PriceConfig {
  PriceMode mode = PriceMode::kScalar;
  double value = 0.1;
};

struct AutoPositions {
  double cell_radius = 3.0;
  double d2d_max_separation = 1.5;
};

struct D2dPair {
  Position tx;
  Position rx;
};

struct ExplicitPositions {
  std::vector<Position> cellular;
  std::vector<D2dPair> d2d;
};

// Declarative description of an instance, as read from a scenario file.
// build_scenario turns it into a sampled Scenario.
struct ScenarioConfig {
  std::uint64_t seed = 1;
  int cellular_count = 1;   // L
  int d2d_count = 0;        // K
  int channel_count = 1;    // Q, must equal L
  double cellular_power = 7.0;  // p_c
  std::vector<double> power_levels;  // ascending, all > 1, max < p_c
  PriceConfig price;
  PathLossModel pathloss;
  FadingModel fading;
  std::optional<AutoPositions> auto_positions;
  std::optional<ExplicitPositions> explicit_positions;
  // Optional measured BS-to-cellular average gains, rows = cellular users,
  // cols = channels. When present these replace the sampled values.
  std::optional<std::vector<std::vector<double>>> bs_cellular_gains;

  void validate() const;
};

// Per-channel link gains h = f * g over all node pairs. Node ids: 0 is the
// base station, then cellular users, then D2D transmitters, then D2D
// receivers. Both factors are stored symmetrically, so h(u,v,q) == h(v,u,q).
class ChannelGainTensor {
 public:
  ChannelGainTensor(int nodes, int channels);

  int nodes() const { return nodes_; }
  int channels() const { return channels_; }

  double pathloss(int u, int v) const { return pl_[pair_index(u, v)]; }
  double fading(int u, int v, int q) const {
    return fade_[static_cast<std::size_t>(q) * pair_count_ + pair_index(u, v)];
  }
  double gain(int u, int v, int q) const {
    return fading(u, v, q) * pathloss(u, v);
  }

  void set_pathloss(int u, int v, double g);
  void set_fading(int u, int v, int q, double f);

 private:
  std::size_t pair_index(int u, int v) const;

  int nodes_;
  int channels_;
  std::size_t pair_count_;
  std::vector<double> pl_;
  std::vector<double> fade_;
};

struct Scenario {
  ScenarioConfig config;
  std::vector<Position> cellular_pos;
  std::vector<D2dPair> d2d_pos;
  ChannelGainTensor gains;

  int cellular_count() const { return config.cellular_count; }
  int d2d_count() const { return config.d2d_count; }
  int channel_count() const { return config.channel_count; }
  double max_power() const { return config.power_levels.back(); }
  double min_power() const { return config.power_levels.front(); }

  // Node ids inside the gain tensor.
  int bs_node() const { return 0; }
  int cellular_node(int l) const { return 1 + l; }
  int d2d_tx_node(int k) const { return 1 + config.cellular_count + k; }
  int d2d_rx_node(int k) const {
    return 1 + config.cellular_count + config.d2d_count + k;
  }

  // Common link views.
  double h_bs_cellular(int l, int q) const {
    return gains.gain(bs_node(), cellular_node(l), q);
  }
  double h_d2d_to_cellular(int k, int l, int q) const {
    return gains.gain(d2d_tx_node(k), cellular_node(l), q);
  }
  double h_d2d_pair(int k, int q) const {
    return gains.gain(d2d_tx_node(k), d2d_rx_node(k), q);
  }
  double h_d2d_cross(int j, int k, int q) const {  // tx of j into rx of k
    return gains.gain(d2d_tx_node(j), d2d_rx_node(k), q);
  }
  double h_bs_to_d2d(int k, int q) const {
    return gains.gain(bs_node(), d2d_rx_node(k), q);
  }
  double pathloss_d2d_to_cellular(int k, int l) const {
    return gains.pathloss(d2d_tx_node(k), cellular_node(l));
  }
};

// Samples positions (when auto) and the full gain tensor from config.seed.
// Same config gives an identical scenario every time.
Scenario build_scenario(const ScenarioConfig& config);
Scenario build_scenario(ScenarioConfig config, std::uint64_t seed_override);

// Channel choice for every user. Cellular entries are channel ids in
// [0, Q). D2D entries may be kUnassigned for users left out by an
// admission-limited allocation.
struct ChannelAllocation {
  static constexpr int kUnassigned = -1;

  std::vector<int> cellular_channel;  // size L, a permutation of 0..Q-1
  std::vector<int> d2d_channel;       // size K

  int cellular_on_channel(int q) const;  // the unique l with channel q
};

using PowerProfile = std::vector<double>;  // transmit power per D2D user

void validate_allocation(const Scenario& s, const ChannelAllocation& alloc,
                         bool require_all_d2d);
void validate_powers(const Scenario& s, const PowerProfile& powers);

// Price per unit power charged to D2D user k when sharing with cellular
// user l: either the flat value or value * pathloss(tx_k, l).
double price_of(const Scenario& s, int k, int l);

// Rate of cellular user l under its assigned channel: natural log of
// received power over (1 + D2D interference on that channel).
double cellular_utility(const Scenario& s, const ChannelAllocation& alloc,
                        const PowerProfile& powers, int l);

// Rate minus price for D2D user k; the interference term includes the
// cellular transmission on the shared channel.
double d2d_utility(const Scenario& s, const ChannelAllocation& alloc,
                   const PowerProfile& powers, int k);

// Sum of the two previous over all users. Every D2D user must be assigned.
double aggregate_utility(const Scenario& s, const ChannelAllocation& alloc,
                         const PowerProfile& powers);

// Interference-pessimistic lower bound on the cellular sum: every D2D user
// transmits at maximum power and fading on interfering links is taken at
// its upper limit. Depends only on channel membership, not on powers.
double cellular_lower_bound(const Scenario& s, const ChannelAllocation& alloc);

double cellular_utility_sum(const Scenario& s, const ChannelAllocation& alloc,
                            const PowerProfile& powers);
double d2d_utility_sum(const Scenario& s, const ChannelAllocation& alloc,
                       const PowerProfile& powers);

}  // namespace d2d
