#include "d2d/scenario_io.hpp"

#include <fstream>
#include <stdexcept>

namespace d2d {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) {
      if (it.key() == key) { ok = true; break; }
    }
    if (!ok) {
      throw std::invalid_argument("unknown field '" + it.key() + "' in " + where);
    }
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw std::invalid_argument(std::string("missing field '") + key + "' in " + where);
  }
  return *it;
}

Position parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("expected [x, y] in " + where);
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

ScenarioConfig parse_scenario_config(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("scenario must be a JSON object");
  reject_unknown(j, "scenario",
                 {"seed", "L", "K", "Q", "p_c", "power_levels", "price",
                  "pathloss", "fading", "positions", "gains"});

  ScenarioConfig cfg;
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  cfg.cellular_count = require(j, "L", "scenario").get<int>();
  cfg.d2d_count = require(j, "K", "scenario").get<int>();
  cfg.channel_count = require(j, "Q", "scenario").get<int>();
  cfg.cellular_power = require(j, "p_c", "scenario").get<double>();
  cfg.power_levels =
      require(j, "power_levels", "scenario").get<std::vector<double>>();

  if (j.contains("price")) {
    const json& p = j["price"];
    reject_unknown(p, "price", {"mode", "value"});
    const std::string mode = require(p, "mode", "price").get<std::string>();
    if (mode == "scalar") {
      cfg.price.mode = PriceMode::kScalar;
    } else if (mode == "proportional") {
      cfg.price.mode = PriceMode::kProportional;
    } else {
      throw std::invalid_argument("price mode must be 'scalar' or 'proportional'");
    }
    cfg.price.value = require(p, "value", "price").get<double>();
  }

  if (j.contains("pathloss")) {
    const json& p = j["pathloss"];
    reject_unknown(p, "pathloss", {"alpha", "d0"});
    if (p.contains("alpha")) cfg.pathloss.alpha = p["alpha"].get<double>();
    if (p.contains("d0")) cfg.pathloss.d0 = p["d0"].get<double>();
  }

  if (j.contains("fading")) {
    const json& f = j["fading"];
    reject_unknown(f, "fading", {"fmin"});
    if (f.contains("fmin")) cfg.fading.fmin = f["fmin"].get<double>();
  }

  const json& pos = require(j, "positions", "scenario");
  reject_unknown(pos, "positions", {"auto", "cellular", "d2d"});
  if (pos.contains("auto")) {
    if (pos.contains("cellular") || pos.contains("d2d")) {
      throw std::invalid_argument("positions must be auto or explicit, not both");
    }
    const json& a = pos["auto"];
    reject_unknown(a, "positions.auto", {"cell_radius", "d2d_max_separation"});
    AutoPositions ap;
    ap.cell_radius = require(a, "cell_radius", "positions.auto").get<double>();
    ap.d2d_max_separation =
        require(a, "d2d_max_separation", "positions.auto").get<double>();
    cfg.auto_positions = ap;
  } else {
    ExplicitPositions ep;
    for (const json& c : require(pos, "cellular", "positions")) {
      ep.cellular.push_back(parse_point(c, "positions.cellular"));
    }
    for (const json& d : require(pos, "d2d", "positions")) {
      reject_unknown(d, "positions.d2d entry", {"tx", "rx"});
      D2dPair pair;
      pair.tx = parse_point(require(d, "tx", "positions.d2d"), "positions.d2d.tx");
      pair.rx = parse_point(require(d, "rx", "positions.d2d"), "positions.d2d.rx");
      ep.d2d.push_back(pair);
    }
    cfg.explicit_positions = std::move(ep);
  }

  if (j.contains("gains")) {
    const json& g = j["gains"];
    reject_unknown(g, "gains", {"h_bl"});
    cfg.bs_cellular_gains =
        require(g, "h_bl", "gains").get<std::vector<std::vector<double>>>();
  }

  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("scenario file is not valid JSON: " +
                                std::string(e.what()));
  }
  return parse_scenario_config(j);
}

nlohmann::json scenario_config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["L"] = cfg.cellular_count;
  j["K"] = cfg.d2d_count;
  j["Q"] = cfg.channel_count;
  j["p_c"] = cfg.cellular_power;
  j["power_levels"] = cfg.power_levels;
  j["price"]["mode"] =
      cfg.price.mode == PriceMode::kScalar ? "scalar" : "proportional";
  j["price"]["value"] = cfg.price.value;
  j["pathloss"]["alpha"] = cfg.pathloss.alpha;
  j["pathloss"]["d0"] = cfg.pathloss.d0;
  j["fading"]["fmin"] = cfg.fading.fmin;
  if (cfg.auto_positions) {
    j["positions"]["auto"]["cell_radius"] = cfg.auto_positions->cell_radius;
    j["positions"]["auto"]["d2d_max_separation"] =
        cfg.auto_positions->d2d_max_separation;
  } else {
    json cell = json::array();
    for (const Position& p : cfg.explicit_positions->cellular) {
      cell.push_back({p.x, p.y});
    }
    json d2d = json::array();
    for (const D2dPair& p : cfg.explicit_positions->d2d) {
      d2d.push_back({{"tx", {p.tx.x, p.tx.y}}, {"rx", {p.rx.x, p.rx.y}}});
    }
    j["positions"]["cellular"] = std::move(cell);
    j["positions"]["d2d"] = std::move(d2d);
  }
  if (cfg.bs_cellular_gains) j["gains"]["h_bl"] = *cfg.bs_cellular_gains;
  return j;
}

void save_scenario_config(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scenario file: " + path);
  out << scenario_config_to_json(cfg).dump(2) << "\n";
}

}  // namespace d2d
