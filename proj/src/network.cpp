#include "d2d/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "d2d/random.hpp"

namespace d2d {

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double PathLossModel::gain(double dist) const {
  if (dist < d0 / 1000.0) {
    throw std::invalid_argument("degenerate colocation");
  }
  return std::min(1.0, std::pow(dist / d0, -alpha));
}

double PathLossModel::gain(const Position& a, const Position& b) const {
  return gain(distance(a, b));
}

void ScenarioConfig::validate() const {
  if (cellular_count < 1) throw std::invalid_argument("need at least one cellular user");
  if (d2d_count < 0) throw std::invalid_argument("negative D2D count");
  if (channel_count != cellular_count) {
    throw std::invalid_argument("channel count must equal cellular count");
  }
  if (cellular_power <= 0.0) throw std::invalid_argument("cellular power must be positive");
  if (power_levels.empty()) throw std::invalid_argument("empty power level set");
  for (std::size_t i = 0; i < power_levels.size(); ++i) {
    if (power_levels[i] <= 1.0) {
      throw std::invalid_argument("power levels must exceed 1");
    }
    if (i > 0 && power_levels[i] <= power_levels[i - 1]) {
      throw std::invalid_argument("power levels must be strictly increasing");
    }
  }
  if (power_levels.back() >= cellular_power) {
    throw std::invalid_argument("max D2D power must stay below cellular power");
  }
  if (price.value < 0.0) throw std::invalid_argument("negative price");
  if (pathloss.alpha <= 0.0) throw std::invalid_argument("pathloss exponent must be positive");
  if (pathloss.d0 <= 0.0) throw std::invalid_argument("reference distance must be positive");
  if (fading.fmin <= 0.0 || fading.fmin >= 1.0) {
    throw std::invalid_argument("fading floor must lie in (0, 1)");
  }
  const bool has_auto = auto_positions.has_value();
  const bool has_explicit = explicit_positions.has_value();
  if (has_auto == has_explicit) {
    throw std::invalid_argument("exactly one of auto or explicit positions required");
  }
  if (has_auto) {
    if (auto_positions->cell_radius <= 0.0 ||
        auto_positions->d2d_max_separation <= 0.0) {
      throw std::invalid_argument("auto position radii must be positive");
    }
  } else {
    if (static_cast<int>(explicit_positions->cellular.size()) != cellular_count ||
        static_cast<int>(explicit_positions->d2d.size()) != d2d_count) {
      throw std::invalid_argument("explicit position counts do not match user counts");
    }
  }
  if (bs_cellular_gains) {
    if (static_cast<int>(bs_cellular_gains->size()) != cellular_count) {
      throw std::invalid_argument("gain override row count must equal cellular count");
    }
    for (const auto& row : *bs_cellular_gains) {
      if (static_cast<int>(row.size()) != channel_count) {
        throw std::invalid_argument("gain override column count must equal channel count");
      }
      for (double h : row) {
        if (h <= 0.0 || h > 1.0) {
          throw std::invalid_argument("gain override values must lie in (0, 1]");
        }
      }
    }
  }
}

ChannelGainTensor::ChannelGainTensor(int nodes, int channels)
    : nodes_(nodes),
      channels_(channels),
      pair_count_(static_cast<std::size_t>(nodes) * nodes),
      pl_(pair_count_, 0.0),
      fade_(pair_count_ * channels, 0.0) {}

std::size_t ChannelGainTensor::pair_index(int u, int v) const {
  return static_cast<std::size_t>(u) * nodes_ + v;
}

void ChannelGainTensor::set_pathloss(int u, int v, double g) {
  pl_[pair_index(u, v)] = g;
  pl_[pair_index(v, u)] = g;
}

void ChannelGainTensor::set_fading(int u, int v, int q, double f) {
  fade_[static_cast<std::size_t>(q) * pair_count_ + pair_index(u, v)] = f;
  fade_[static_cast<std::size_t>(q) * pair_count_ + pair_index(v, u)] = f;
}

namespace {

Position sample_in_disc(std::mt19937_64& gen, const Position& center,
                        double radius, double min_radius) {
  const double r = std::max(radius * std::sqrt(uniform01(gen)), min_radius);
  const double theta = 2.0 * M_PI * uniform01(gen);
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& config) {
  config.validate();
  const int L = config.cellular_count;
  const int K = config.d2d_count;
  const int Q = config.channel_count;
  const int nodes = 1 + L + 2 * K;

  std::mt19937_64 gen(config.seed);
  const double min_sep = config.pathloss.d0 / 100.0;

  std::vector<Position> cellular(L);
  std::vector<D2dPair> d2d(K);
  if (config.auto_positions) {
    const Position bs{0.0, 0.0};
    for (int l = 0; l < L; ++l) {
      cellular[l] = sample_in_disc(gen, bs, config.auto_positions->cell_radius,
                                   min_sep);
    }
    for (int k = 0; k < K; ++k) {
      d2d[k].tx = sample_in_disc(gen, bs, config.auto_positions->cell_radius,
                                 min_sep);
      d2d[k].rx = sample_in_disc(gen, d2d[k].tx,
                                 config.auto_positions->d2d_max_separation,
                                 min_sep);
    }
  } else {
    cellular = config.explicit_positions->cellular;
    d2d = config.explicit_positions->d2d;
  }

  Scenario s{config, std::move(cellular), std::move(d2d),
             ChannelGainTensor(nodes, Q)};

  std::vector<Position> pos(nodes);
  pos[s.bs_node()] = {0.0, 0.0};
  for (int l = 0; l < L; ++l) pos[s.cellular_node(l)] = s.cellular_pos[l];
  for (int k = 0; k < K; ++k) {
    pos[s.d2d_tx_node(k)] = s.d2d_pos[k].tx;
    pos[s.d2d_rx_node(k)] = s.d2d_pos[k].rx;
  }

  for (int u = 0; u < nodes; ++u) {
    for (int v = u + 1; v < nodes; ++v) {
      s.gains.set_pathloss(u, v, config.pathloss.gain(pos[u], pos[v]));
    }
  }
  const double fmin = config.fading.fmin;
  for (int q = 0; q < Q; ++q) {
    for (int u = 0; u < nodes; ++u) {
      for (int v = u + 1; v < nodes; ++v) {
        s.gains.set_fading(u, v, q, 1.0 - (1.0 - fmin) * uniform01(gen));
      }
    }
  }

  if (config.bs_cellular_gains) {
    for (int l = 0; l < L; ++l) {
      s.gains.set_pathloss(s.bs_node(), s.cellular_node(l), 1.0);
      for (int q = 0; q < Q; ++q) {
        s.gains.set_fading(s.bs_node(), s.cellular_node(l), q,
                           (*config.bs_cellular_gains)[l][q]);
      }
    }
  }
  return s;
}

Scenario build_scenario(ScenarioConfig config, std::uint64_t seed_override) {
  config.seed = seed_override;
  return build_scenario(config);
}

int ChannelAllocation::cellular_on_channel(int q) const {
  int found = -1;
  for (std::size_t l = 0; l < cellular_channel.size(); ++l) {
    if (cellular_channel[l] == q) {
      if (found >= 0) throw std::invalid_argument("channel hosts two cellular users");
      found = static_cast<int>(l);
    }
  }
  if (found < 0) throw std::invalid_argument("channel hosts no cellular user");
  return found;
}

void validate_allocation(const Scenario& s, const ChannelAllocation& alloc,
                         bool require_all_d2d) {
  const int L = s.cellular_count();
  const int K = s.d2d_count();
  const int Q = s.channel_count();
  if (static_cast<int>(alloc.cellular_channel.size()) != L ||
      static_cast<int>(alloc.d2d_channel.size()) != K) {
    throw std::invalid_argument("allocation size mismatch");
  }
  std::vector<int> seen(Q, 0);
  for (int q : alloc.cellular_channel) {
    if (q < 0 || q >= Q) throw std::invalid_argument("cellular channel out of range");
    if (seen[q]++) throw std::invalid_argument("duplicate cellular channel");
  }
  for (int q : alloc.d2d_channel) {
    if (q == ChannelAllocation::kUnassigned) {
      if (require_all_d2d) throw std::invalid_argument("incomplete allocation");
      continue;
    }
    if (q < 0 || q >= Q) throw std::invalid_argument("D2D channel out of range");
  }
}

void validate_powers(const Scenario& s, const PowerProfile& powers) {
  if (static_cast<int>(powers.size()) != s.d2d_count()) {
    throw std::invalid_argument("power profile size mismatch");
  }
  for (double p : powers) {
    if (std::find(s.config.power_levels.begin(), s.config.power_levels.end(),
                  p) == s.config.power_levels.end()) {
      throw std::invalid_argument("power outside configured level set");
    }
  }
}

double price_of(const Scenario& s, int k, int l) {
  if (s.config.price.mode == PriceMode::kScalar) return s.config.price.value;
  return s.config.price.value * s.pathloss_d2d_to_cellular(k, l);
}

double cellular_utility(const Scenario& s, const ChannelAllocation& alloc,
                        const PowerProfile& powers, int l) {
  const int q = alloc.cellular_channel.at(l);
  double interference = 0.0;
  for (int k = 0; k < s.d2d_count(); ++k) {
    if (alloc.d2d_channel[k] == q) {
      interference += powers[k] * s.h_d2d_to_cellular(k, l, q);
    }
  }
  return std::log(s.config.cellular_power * s.h_bs_cellular(l, q) /
                  (1.0 + interference));
}

double d2d_utility(const Scenario& s, const ChannelAllocation& alloc,
                   const PowerProfile& powers, int k) {
  const int q = alloc.d2d_channel.at(k);
  if (q == ChannelAllocation::kUnassigned) {
    throw std::invalid_argument("utility of unassigned D2D user");
  }
  const double own = powers[k] * s.h_d2d_pair(k, q);
  double interference = s.config.cellular_power * s.h_bs_to_d2d(k, q);
  for (int j = 0; j < s.d2d_count(); ++j) {
    if (j != k && alloc.d2d_channel[j] == q) {
      interference += powers[j] * s.h_d2d_cross(j, k, q);
    }
  }
  const int l = alloc.cellular_on_channel(q);
  return std::log(own / (1.0 + interference)) - price_of(s, k, l) * powers[k];
}

double cellular_utility_sum(const Scenario& s, const ChannelAllocation& alloc,
                            const PowerProfile& powers) {
  double sum = 0.0;
  for (int l = 0; l < s.cellular_count(); ++l) {
    sum += cellular_utility(s, alloc, powers, l);
  }
  return sum;
}

double d2d_utility_sum(const Scenario& s, const ChannelAllocation& alloc,
                       const PowerProfile& powers) {
  double sum = 0.0;
  for (int k = 0; k < s.d2d_count(); ++k) {
    sum += d2d_utility(s, alloc, powers, k);
  }
  return sum;
}

double aggregate_utility(const Scenario& s, const ChannelAllocation& alloc,
                         const PowerProfile& powers) {
  validate_allocation(s, alloc, /*require_all_d2d=*/true);
  validate_powers(s, powers);
  return cellular_utility_sum(s, alloc, powers) +
         d2d_utility_sum(s, alloc, powers);
}

double cellular_lower_bound(const Scenario& s, const ChannelAllocation& alloc) {
  validate_allocation(s, alloc, /*require_all_d2d=*/true);
  const double pmax = s.max_power();
  double bound = 0.0;
  for (int l = 0; l < s.cellular_count(); ++l) {
    const int q = alloc.cellular_channel[l];
    bound += std::log(s.config.cellular_power * s.h_bs_cellular(l, q));
    for (int k = 0; k < s.d2d_count(); ++k) {
      if (alloc.d2d_channel[k] == q) {
        bound -= pmax * s.pathloss_d2d_to_cellular(k, l);
      }
    }
  }
  return bound;
}

}  // namespace d2d
