#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbmhedge/convex_payoff.hpp"

namespace fbmhedge {

// Payoff file format:
//   {"anchor_x": 0.0, "anchor_f": 0.0, "base_slope": 0.0,
//    "atoms": [[location, mass], ...]}
// Unknown keys are rejected.
inline nlohmann::json payoff_to_json(const ConvexPayoff& payoff) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : payoff.measure().atoms())
    atoms.push_back({a.location, a.mass});
  return {{"anchor_x", payoff.anchor_x()},
          {"anchor_f", payoff.anchor_value()},
          {"base_slope", payoff.base_slope()},
          {"atoms", atoms}};
}

inline ConvexPayoff payoff_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known{"anchor_x", "anchor_f", "base_slope", "atoms"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const auto& k : known) ok = ok || item.key() == k;
    if (!ok)
      throw std::domain_error("payoff file: unknown key '" + item.key() + "'");
  }
  for (const auto& k : known)
    if (!j.contains(k))
      throw std::domain_error("payoff file: missing key '" + k + "'");

  std::vector<MeasureAtom> atoms;
  for (const auto& a : j.at("atoms")) {
    if (!a.is_array() || a.size() != 2)
      throw std::domain_error("payoff file: each atom must be [location, mass]");
    atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
  }
  return ConvexPayoff(AtomicMeasure(std::move(atoms)), j.at("anchor_x").get<double>(),
                      j.at("anchor_f").get<double>(), j.at("base_slope").get<double>());
}

inline ConvexPayoff load_payoff_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open payoff file: " + path);
  nlohmann::json j;
  in >> j;
  return payoff_from_json(j);
}

// Payoff specs accepted on the command line: "call:K=1", "straddle:K=2.5"
// (K defaults to 1), or "file:path.json".
inline ConvexPayoff parse_payoff_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (name == "file") {
    if (rest.empty())
      throw std::domain_error("payoff spec 'file:' needs a path");
    return load_payoff_file(rest);
  }

  double strike = 1.0;
  if (!rest.empty()) {
    if (rest.rfind("K=", 0) != 0)
      throw std::domain_error("payoff spec: expected K=<value>, got '" + rest + "'");
    std::istringstream iss(rest.substr(2));
    if (!(iss >> strike) || !iss.eof())
      throw std::domain_error("payoff spec: bad strike '" + rest + "'");
  }
  if (name == "call") return ConvexPayoff::call(strike);
  if (name == "straddle") return ConvexPayoff::straddle(strike);
  throw std::domain_error("unknown payoff spec '" + spec + "' (use call:K=, straddle:K=, file:)");
}

}  // namespace fbmhedge
