#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "dytw/instance.hpp"
#include "dytw/tree.hpp"

namespace dytw {

/// Shortest round-trip decimal for a double; "inf"/"-inf"/"nan" spelled
/// out so CSV cells and JSON strings stay diff-able.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

/// JSON value for a double; non-finite values become strings since JSON
/// numbers cannot carry them (keeps serialization round-trips identical).
inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline double number_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("not a number: " + s);
  }
  return j.get<double>();
}

/// Instance file format: explicit leaf-mass lists in canonical leaf order,
/// lambda keyed by cube path strings "level:index".
inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["dimension"] = inst.tree.dimension();
  j["depth"] = inst.tree.depth();
  j["p"] = json_number(inst.p);
  j["q"] = json_number(inst.q);
  j["sigma"] = inst.sigma.leaf_masses();
  j["omega"] = inst.omega.leaf_masses();
  nlohmann::json lam = nlohmann::json::object();
  for (CubeId c = 0; c < inst.tree.cube_count(); ++c)
    if (inst.lambda[c] != 0.0) lam[inst.tree.path(c)] = inst.lambda[c];
  j["lambda"] = std::move(lam);
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  DyadicTree tree = build_tree(j.at("dimension").get<int>(), j.at("depth").get<int>());
  Measure sigma(tree, j.at("sigma").get<std::vector<double>>());
  Measure omega(tree, j.at("omega").get<std::vector<double>>());
  CubeFamily lambda(tree, 0.0);
  for (auto& [path, value] : j.at("lambda").items())
    lambda[tree.cube_from_path(path)] = value.get<double>();
  return Instance(std::move(tree), std::move(sigma), std::move(omega), std::move(lambda),
                  number_from_json(j.at("p")), number_from_json(j.at("q")));
}

/// FNV-1a 64-bit over the canonical dump; stable across runs and builds.
inline std::string instance_digest(const Instance& inst) {
  std::string dump = instance_to_json(inst).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 16);
}

/// One CSV line from preformatted cells.
inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

}  // namespace dytw
