#pragma once

#include <iosfwd>
#include <string>

#include "d2d/game.hpp"

namespace d2d {

// Payoff tables travel as CSV with header a1,..,aN,r1,..,rN: one row per
// joint action profile, action values first, then one reward per player.
// Every combination of the observed action values must appear exactly once.
StrategicGame read_payoff_table(std::istream& in);
StrategicGame load_payoff_table(const std::string& path);

void write_payoff_table(const StrategicGame& game, std::ostream& out);
void save_payoff_table(const StrategicGame& game, const std::string& path);

}  // namespace d2d
