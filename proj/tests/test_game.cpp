#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "d2d/game.hpp"
#include "d2d/payoff_io.hpp"
#include "oracles.hpp"

using namespace d2d;

namespace {

// A two-channel scenario with a three-user cluster on channel 0 and a
// singleton on channel 1.
struct ClusterFixture {
  Scenario s;
  ChannelAllocation alloc;

  ClusterFixture() : s(build()) {
    alloc.cellular_channel = {0, 1};
    alloc.d2d_channel = {0, 0, 0, 1};
  }

  static Scenario build() {
    ScenarioConfig cfg;
    cfg.seed = 41;
    cfg.cellular_count = cfg.channel_count = 2;
    cfg.d2d_count = 4;
    cfg.cellular_power = 6.0;
    cfg.power_levels = {2.0, 4.0};
    cfg.price.value = 0.1;
    AutoPositions pos;
    pos.cell_radius = 3.0;
    pos.d2d_max_separation = 1.0;
    cfg.auto_positions = pos;
    return build_scenario(cfg);
  }
};

StrategicGame constant_game(int players, int actions, double value) {
  std::vector<std::vector<double>> sets(players);
  for (auto& s : sets) {
    for (int a = 0; a < actions; ++a) s.push_back(a + 2.0);
  }
  StrategicGame game(sets);
  for (long long p = 0; p < game.profile_count(); ++p) {
    for (int k = 0; k < players; ++k) game.set_payoff(p, k, value);
  }
  return game;
}

}  // namespace

TEST_CASE("profile indexing is lexicographic and invertible") {
  StrategicGame game({{2, 4}, {2, 3, 4}, {2, 4}});
  CHECK(game.profile_count() == 12);
  CHECK(game.index_of({0, 0, 0}) == 0);
  CHECK(game.index_of({0, 0, 1}) == 1);
  CHECK(game.index_of({0, 1, 0}) == 2);
  CHECK(game.index_of({1, 0, 0}) == 6);  // player 0 most significant
  for (long long p = 0; p < game.profile_count(); ++p) {
    CHECK(game.index_of(game.actions_of(p)) == p);
    for (int k = 0; k < 3; ++k) {
      CHECK(game.action_of(p, k) == game.actions_of(p)[k]);
    }
  }
  CHECK(game.with_action(game.index_of({0, 1, 0}), 2, 1) ==
        game.index_of({0, 1, 1}));
  CHECK(game.values_of(game.index_of({1, 2, 0})) ==
        std::vector<double>{4.0, 4.0, 2.0});
}

TEST_CASE("cluster game payoffs evaluate the utility model") {
  const ClusterFixture fx;
  const ClusterGame cluster = build_cluster_game(fx.s, fx.alloc, 0);
  CHECK(cluster.members == std::vector<int>{0, 1, 2});
  CHECK(cluster.cellular_user == 0);
  CHECK(cluster.game.players() == 3);
  CHECK(cluster.game.profile_count() == 8);

  // Every payoff entry must coincide with the network-level utility when
  // non-members idle at minimum power.
  for (long long p = 0; p < cluster.game.profile_count(); ++p) {
    PowerProfile powers(fx.s.d2d_count(), fx.s.min_power());
    const std::vector<double> values = cluster.game.values_of(p);
    for (std::size_t i = 0; i < cluster.members.size(); ++i) {
      powers[cluster.members[i]] = values[i];
    }
    for (std::size_t i = 0; i < cluster.members.size(); ++i) {
      CHECK(cluster.game.payoff(p, static_cast<int>(i)) ==
            doctest::Approx(d2d_utility(fx.s, fx.alloc, powers,
                                        cluster.members[i]))
                .epsilon(1e-12));
    }
  }

  SUBCASE("empty cluster is rejected") {
    ChannelAllocation alloc = fx.alloc;
    alloc.d2d_channel = {0, 0, 0, 0};
    CHECK_THROWS_WITH_AS(build_cluster_game(fx.s, alloc, 1), "empty cluster",
                         std::invalid_argument);
  }
}

TEST_CASE("near-clean single-player cluster matches the closed form") {
  // One D2D pair far from the base station: interference is ~1e-12, so the
  // payoffs are ln(p) - 0.1 p up to that slack; fading is pinned near 1.
  ScenarioConfig cfg;
  cfg.cellular_count = cfg.channel_count = 1;
  cfg.d2d_count = 1;
  cfg.cellular_power = 7.0;
  cfg.power_levels = {2.0, 4.0};
  cfg.price.value = 0.1;
  cfg.fading.fmin = 0.9999999;
  ExplicitPositions pos;
  pos.cellular = {{1.0, 0.0}};
  pos.d2d = {{{1e4, 0.0}, {1e4, 0.5}}};
  cfg.explicit_positions = pos;
  const Scenario s = build_scenario(cfg);

  ChannelAllocation alloc;
  alloc.cellular_channel = {0};
  alloc.d2d_channel = {0};
  const ClusterGame cluster = build_cluster_game(s, alloc, 0);
  REQUIRE(cluster.game.players() == 1);
  CHECK(cluster.game.payoff(0, 0) == doctest::Approx(0.49315).epsilon(1e-5));
  CHECK(cluster.game.payoff(1, 0) == doctest::Approx(0.98629).epsilon(1e-5));
}

TEST_CASE("potential evaluates sum of log power minus priced power") {
  CHECK(power_potential({4, 4, 4}, 0.1) ==
        doctest::Approx(2.95888).epsilon(1e-5));
  CHECK(power_potential({2, 2, 2}, 0.1) ==
        doctest::Approx(1.47944).epsilon(1e-5));
  CHECK(power_potential({2.0, 4.0}, {0.1, 0.2}) ==
        doctest::Approx(std::log(2.0) - 0.2 + std::log(4.0) - 0.8));
}

TEST_CASE("analytic cluster games admit the closed-form potential") {
  std::mt19937_64 gen(43);
  for (int rep = 0; rep < 40; ++rep) {
    const ScenarioConfig cfg = oracles::random_scenario_config(gen, 3, 5);
    const Scenario s = build_scenario(cfg);
    const ChannelAllocation alloc = oracles::random_alloc(s, gen);
    for (int q = 0; q < s.channel_count(); ++q) {
      bool occupied = false;
      for (int c : alloc.d2d_channel) {
        if (c == q) occupied = true;
      }
      if (!occupied) continue;
      const ClusterGame cluster = build_cluster_game(s, alloc, q);
      const std::vector<double> v =
          potential_table(cluster.game, cluster.prices);
      CHECK(is_exact_potential(cluster.game, v, 1e-9));

      // Equilibria coincide with the potential's argmax set.
      CHECK(enumerate_nash(cluster.game) == potential_maximizers(v));
    }
  }
}

TEST_CASE("published payoff table is not an exact potential game") {
  // The two-decimal table's own rows are inconsistent with the closed-form
  // potential: one deviation changes a payoff by 1.60 while the matching
  // potential difference is ~0.49; every tolerance below that gap fails.
  const StrategicGame table = oracles::example_power_table();
  const std::vector<double> v = potential_table(table, {0.1, 0.1, 0.1});
  CHECK_FALSE(is_exact_potential(table, v, 5e-3));
  CHECK_FALSE(is_exact_potential(table, v, 0.5));
  CHECK(is_exact_potential(table, v, 2.0));  // gap is finite

  SUBCASE("perturbing an analytic game breaks the identity") {
    const ClusterFixture fx;
    ClusterGame cluster = build_cluster_game(fx.s, fx.alloc, 0);
    const std::vector<double> vv =
        potential_table(cluster.game, cluster.prices);
    REQUIRE(is_exact_potential(cluster.game, vv, 1e-9));
    cluster.game.set_payoff(3, 1, cluster.game.payoff(3, 1) + 0.1);
    CHECK_FALSE(is_exact_potential(cluster.game, vv, 1e-9));
  }
}

TEST_CASE("equilibrium enumeration on the published table") {
  const StrategicGame table = oracles::example_power_table();
  const std::vector<long long> nash = enumerate_nash(table);
  REQUIRE(nash.size() == 1);
  CHECK(table.values_of(nash[0]) == std::vector<double>{4.0, 4.0, 4.0});

  // Cross-check every profile against the definition directly.
  for (long long p = 0; p < table.profile_count(); ++p) {
    const bool expected = oracles::is_nash_by_definition(table, p);
    const bool got = std::find(nash.begin(), nash.end(), p) != nash.end();
    CHECK(expected == got);
  }

  SUBCASE("single player game reduces to argmax") {
    StrategicGame solo({{2, 3, 4}});
    solo.set_payoff(0, 0, 1.0);
    solo.set_payoff(1, 0, 5.0);
    solo.set_payoff(2, 0, 3.0);
    CHECK(enumerate_nash(solo) == std::vector<long long>{1});
  }
  SUBCASE("constant game is all-Nash") {
    const StrategicGame flat = constant_game(2, 2, 1.0);
    CHECK(enumerate_nash(flat).size() == flat.profile_count());
  }
  SUBCASE("Nash set survives constant payoff shifts") {
    StrategicGame shifted = oracles::example_power_table();
    for (long long p = 0; p < shifted.profile_count(); ++p) {
      shifted.set_payoff(p, 1, shifted.payoff(p, 1) + 17.5);
    }
    CHECK(enumerate_nash(shifted) == nash);
  }
}

TEST_CASE("potential maximizers follow the price level") {
  StrategicGame game({{2, 4}, {2, 4}, {2, 4}});
  SUBCASE("cheap power pushes everyone high") {
    const std::vector<double> v = potential_table(game, {0.1, 0.1, 0.1});
    const std::vector<long long> vmax = potential_maximizers(v);
    REQUIRE(vmax.size() == 1);
    CHECK(game.values_of(vmax[0]) == std::vector<double>{4.0, 4.0, 4.0});
  }
  SUBCASE("expensive power pushes everyone low") {
    const std::vector<double> v = potential_table(game, {1.0, 1.0, 1.0});
    const std::vector<long long> vmax = potential_maximizers(v);
    REQUIRE(vmax.size() == 1);
    CHECK(game.values_of(vmax[0]) == std::vector<double>{2.0, 2.0, 2.0});
  }
  SUBCASE("flat potential keeps every profile") {
    const std::vector<double> v(game.profile_count(), 3.25);
    CHECK(potential_maximizers(v).size() == game.profile_count());
  }
}

TEST_CASE("separable concavity checks the midpoint inequality") {
  const auto log_minus = [](double c) {
    return std::vector<double>{std::log(2.0) - 2.0 * c,
                               std::log(3.0) - 3.0 * c,
                               std::log(4.0) - 4.0 * c};
  };
  CHECK(is_separable_concave({log_minus(0.0), log_minus(0.1), log_minus(1.0)}));
  CHECK(is_separable_concave({{1.0, 2.0, 3.0}}));   // linear: equality case
  CHECK_FALSE(is_separable_concave({{1.0, 4.0, 9.0}}));  // convex squares
  CHECK(is_separable_concave({{5.0}, {1.0, 2.0}}));  // too short to violate
}

TEST_CASE("larger-midpoint property") {
  SUBCASE("separable concave values always qualify") {
    std::mt19937_64 gen(47);
    for (int rep = 0; rep < 100; ++rep) {
      const int players = 1 + uniform_index(gen, 3);
      std::vector<int> shape(players);
      std::vector<std::vector<double>> comp(players);
      for (int k = 0; k < players; ++k) {
        shape[k] = 2 + uniform_index(gen, 3);
        double value = uniform_range(gen, -1.0, 1.0);
        double slope = uniform_range(gen, -0.5, 1.5);
        for (int a = 0; a < shape[k]; ++a) {
          comp[k].push_back(value);
          value += slope;
          slope -= uniform_range(gen, 0.0, 0.7);  // concave increments
        }
      }
      REQUIRE(is_separable_concave(comp));
      long long total = 1;
      for (int n : shape) total *= n;
      std::vector<double> values(total, 0.0);
      for (long long p = 0; p < total; ++p) {
        long long rest = p;
        for (int k = players - 1; k >= 0; --k) {
          values[p] += comp[k][rest % shape[k]];
          rest /= shape[k];
        }
      }
      CHECK(satisfies_lmp(shape, values));
    }
  }
  SUBCASE("diagonal-rewarding values fail") {
    CHECK_FALSE(satisfies_lmp({2, 2}, {1.0, 0.0, 0.0, 1.0}));
  }
  SUBCASE("constant values pass via the equality branch") {
    CHECK(satisfies_lmp({3, 3}, std::vector<double>(9, 0.75)));
  }
}

TEST_CASE("stability price of the published table") {
  const StrategicGame table = oracles::example_power_table();
  CHECK(price_of_stability(table) ==
        doctest::Approx(7.06 / 6.08).epsilon(1e-9));

  SUBCASE("equals one when an equilibrium attains max welfare") {
    const StrategicGame flat = constant_game(2, 2, 2.0);
    CHECK(price_of_stability(flat) == doctest::Approx(1.0));
  }
  SUBCASE("at least one on random potential games") {
    std::mt19937_64 gen(53);
    for (int rep = 0; rep < 30; ++rep) {
      StrategicGame game({{2, 4}, {2, 4}});
      std::vector<double> pot(4);
      for (double& x : pot) x = uniform_range(gen, -1.0, 1.0);
      for (long long p = 0; p < 4; ++p) {
        for (int k = 0; k < 2; ++k) {
          game.set_payoff(p, k, pot[p] + uniform_range(gen, 0.0, 0.0));
        }
      }
      CHECK(price_of_stability(game) >= 1.0 - 1e-12);
    }
  }
  SUBCASE("no pure equilibrium is infeasible") {
    StrategicGame pennies({{2, 4}, {2, 4}});
    const double payoff[4][2] = {{1, -1}, {-1, 1}, {-1, 1}, {1, -1}};
    for (long long p = 0; p < 4; ++p) {
      pennies.set_payoff(p, 0, payoff[p][0]);
      pennies.set_payoff(p, 1, payoff[p][1]);
    }
    CHECK_THROWS_AS(price_of_stability(pennies), InfeasibleError);
  }
}

TEST_CASE("efficiency bound recomputes from the gain model") {
  const ClusterFixture fx;
  const StabilityBound bound = pos_upper_bound(fx.s, fx.alloc, 0);

  // Hand recompute gamma_min: own link at minimum power against the
  // worst-case everything else.
  double gamma_min = std::numeric_limits<double>::infinity();
  for (int k : {0, 1, 2}) {
    double denom = 1.0 + fx.s.config.cellular_power * fx.s.h_bs_to_d2d(k, 0);
    for (int j : {0, 1, 2}) {
      if (j != k) denom += fx.s.max_power() * fx.s.h_d2d_cross(j, k, 0);
    }
    gamma_min =
        std::min(gamma_min, fx.s.min_power() * fx.s.h_d2d_pair(k, 0) / denom);
  }
  CHECK(bound.gamma_min == doctest::Approx(gamma_min).epsilon(1e-12));
  if (gamma_min > 1.0) {
    CHECK_FALSE(bound.vacuous);
    CHECK(bound.value ==
          doctest::Approx(std::log(4.0) / std::log(gamma_min)).epsilon(1e-12));
  } else {
    CHECK(bound.vacuous);
  }

  SUBCASE("a crowded noisy cluster is vacuous") {
    // Dense scenario: interference exceeds the weak direct links.
    ScenarioConfig cfg = fx.s.config;
    cfg.seed = 99;
    cfg.auto_positions->cell_radius = 1.0;
    cfg.auto_positions->d2d_max_separation = 2.5;
    const Scenario dense = build_scenario(cfg);
    const StabilityBound b = pos_upper_bound(dense, fx.alloc, 0);
    CHECK(b.gamma_min <= 1.0);
    CHECK(b.vacuous);
    CHECK(std::isnan(b.value));
  }
}

TEST_CASE("minimum-power game under SIR floors") {
  const ClusterFixture fx;

  SUBCASE("zero floors leave everything admissible") {
    const QosPowerGame qos =
        build_qos_power_game(fx.s, fx.alloc, 0, {0.0, 0.0, 0.0});
    CHECK(qos.admissible_profiles.size() ==
          static_cast<std::size_t>(qos.game.profile_count()));
    const std::vector<long long> nash =
        enumerate_nash(qos.game, &qos.admissible);
    REQUIRE(!nash.empty());
    // All-minimum-power is the unique equilibrium of -p payoffs.
    CHECK(nash == std::vector<long long>{0});
    CHECK(qos.game.values_of(0) == std::vector<double>{2.0, 2.0, 2.0});

    // The negative-total-power potential is exact on the feasible region.
    std::vector<double> v(qos.game.profile_count());
    for (long long p = 0; p < qos.game.profile_count(); ++p) {
      double sum = 0.0;
      for (double x : qos.game.values_of(p)) sum += x;
      v[p] = -sum;
    }
    CHECK(is_exact_potential(qos.game, v, 1e-12, &qos.admissible));
  }
  SUBCASE("unreachable floors yield an infeasible report") {
    const QosPowerGame qos =
        build_qos_power_game(fx.s, fx.alloc, 0, {1e9, 1e9, 1e9});
    CHECK(qos.admissible_profiles.empty());
    CHECK(enumerate_nash(qos.game, &qos.admissible).empty());
  }
  SUBCASE("equilibria are minimal feasible profiles") {
    std::mt19937_64 gen(59);
    for (int rep = 0; rep < 20; ++rep) {
      // Floors low enough that some profile usually qualifies.
      std::vector<double> floors(3);
      for (double& f : floors) f = uniform_range(gen, 0.0, 0.3);
      const QosPowerGame qos = build_qos_power_game(fx.s, fx.alloc, 0, floors);
      const std::vector<long long> nash =
          enumerate_nash(qos.game, &qos.admissible);
      for (const long long p : nash) {
        CHECK(qos.admissible[p]);
        // No member can cut its power and stay admissible.
        for (int k = 0; k < qos.game.players(); ++k) {
          const int a = qos.game.action_of(p, k);
          for (int lower = 0; lower < a; ++lower) {
            const long long alt = qos.game.with_action(p, k, lower);
            CHECK_FALSE(qos.admissible[alt]);
          }
        }
      }
    }
  }
}

TEST_CASE("payoff tables round-trip through CSV") {
  const StrategicGame table = oracles::example_power_table();
  std::ostringstream out;
  write_payoff_table(table, out);

  std::istringstream in(out.str());
  const StrategicGame back = read_payoff_table(in);
  REQUIRE(back.players() == 3);
  REQUIRE(back.profile_count() == 8);
  for (int k = 0; k < 3; ++k) {
    CHECK(back.action_values(k) == table.action_values(k));
  }
  for (long long p = 0; p < 8; ++p) {
    for (int k = 0; k < 3; ++k) {
      CHECK(back.payoff(p, k) == table.payoff(p, k));
    }
  }

  SUBCASE("header must declare actions then rewards") {
    std::istringstream bad("a1,r1,a2,r2\n2,1,2,1\n");
    CHECK_THROWS_AS(read_payoff_table(bad), std::invalid_argument);
  }
  SUBCASE("missing combinations are rejected") {
    std::istringstream bad("a1,a2,r1,r2\n2,2,0,0\n2,4,0,0\n4,2,0,0\n");
    CHECK_THROWS_AS(read_payoff_table(bad), std::invalid_argument);
  }
  SUBCASE("duplicate combinations are rejected") {
    std::istringstream bad("a1,r1\n2,0\n4,1\n4,2\n");
    CHECK_THROWS_AS(read_payoff_table(bad), std::invalid_argument);
  }
  SUBCASE("non-numeric cells are rejected") {
    std::istringstream bad("a1,r1\n2,zero\n4,1\n");
    CHECK_THROWS_AS(read_payoff_table(bad), std::invalid_argument);
  }
}
