#include "d2d/payoff_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace d2d {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding spaces
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    fields.push_back(first == std::string::npos
                         ? std::string()
                         : field.substr(first, last - first + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text) {
  std::size_t used = 0;
  const double value = std::stod(text, &used);
  if (used != text.size()) {
    throw std::invalid_argument("malformed number in payoff table: " + text);
  }
  return value;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

StrategicGame read_payoff_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("empty payoff table");
  }
  const std::vector<std::string> header = split_csv_line(line);
  int players = 0;
  while (players < static_cast<int>(header.size()) &&
         header[players] == "a" + std::to_string(players + 1)) {
    ++players;
  }
  if (players == 0 ||
      static_cast<int>(header.size()) != 2 * players) {
    throw std::invalid_argument(
        "payoff table header must be a1,..,aN,r1,..,rN");
  }
  for (int k = 0; k < players; ++k) {
    if (header[players + k] != "r" + std::to_string(k + 1)) {
      throw std::invalid_argument(
          "payoff table header must be a1,..,aN,r1,..,rN");
    }
  }

  std::vector<std::vector<double>> action_rows;
  std::vector<std::vector<double>> reward_rows;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != 2 * players) {
      throw std::invalid_argument("payoff table row has wrong field count");
    }
    std::vector<double> actions(players), rewards(players);
    for (int k = 0; k < players; ++k) {
      actions[k] = parse_number(fields[k]);
      rewards[k] = parse_number(fields[players + k]);
    }
    action_rows.push_back(std::move(actions));
    reward_rows.push_back(std::move(rewards));
  }

  std::vector<std::vector<double>> action_sets(players);
  for (int k = 0; k < players; ++k) {
    std::set<double> values;
    for (const auto& row : action_rows) values.insert(row[k]);
    action_sets[k].assign(values.begin(), values.end());
  }

  StrategicGame game(action_sets);
  if (static_cast<long long>(action_rows.size()) != game.profile_count()) {
    throw std::invalid_argument(
        "payoff table must list every action combination exactly once");
  }
  std::vector<char> seen(game.profile_count(), 0);
  for (std::size_t row = 0; row < action_rows.size(); ++row) {
    std::vector<int> indices(players);
    for (int k = 0; k < players; ++k) {
      const auto& set = action_sets[k];
      const auto it =
          std::lower_bound(set.begin(), set.end(), action_rows[row][k]);
      if (it == set.end() || *it != action_rows[row][k]) {
        throw std::logic_error("action lookup failed");
      }
      indices[k] = static_cast<int>(it - set.begin());
    }
    const long long profile = game.index_of(indices);
    if (seen[profile]) {
      throw std::invalid_argument("duplicate action profile in payoff table");
    }
    seen[profile] = 1;
    for (int k = 0; k < players; ++k) {
      game.set_payoff(profile, k, reward_rows[row][k]);
    }
  }
  return game;
}

StrategicGame load_payoff_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open payoff table: " + path);
  return read_payoff_table(in);
}

void write_payoff_table(const StrategicGame& game, std::ostream& out) {
  for (int k = 0; k < game.players(); ++k) out << "a" << k + 1 << ",";
  for (int k = 0; k < game.players(); ++k) {
    out << "r" << k + 1 << (k + 1 < game.players() ? "," : "\n");
  }
  for (long long profile = 0; profile < game.profile_count(); ++profile) {
    const std::vector<double> values = game.values_of(profile);
    for (double v : values) out << format_number(v) << ",";
    for (int k = 0; k < game.players(); ++k) {
      out << format_number(game.payoff(profile, k))
          << (k + 1 < game.players() ? "," : "\n");
    }
  }
}

void save_payoff_table(const StrategicGame& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write payoff table: " + path);
  write_payoff_table(game, out);
}

}  // namespace d2d
