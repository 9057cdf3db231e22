#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "seopf/case_model.hpp"

namespace seopf {

// Case files are JSON documents with top-level s_base, buses, lines,
// generators and aggregators (plus optional name and metadata). Powers are
// in MW/MVAr, impedances in p.u.

inline void to_json(nlohmann::ordered_json& j, const Bus& b) {
  j = {{"id", b.id}, {"is_slack", b.is_slack}, {"v_min", b.v_min}, {"v_max", b.v_max}};
}
inline void to_json(nlohmann::ordered_json& j, const Line& l) {
  j = {{"from_bus", l.from_bus}, {"to_bus", l.to_bus}, {"r", l.r}, {"x", l.x}, {"s_max", l.s_max}};
}
inline void to_json(nlohmann::ordered_json& j, const Generator& g) {
  j = {{"bus", g.bus},     {"a", g.a},         {"b", g.b},         {"c", g.c},
       {"p_min", g.p_min}, {"p_max", g.p_max}, {"q_min", g.q_min}, {"q_max", g.q_max}};
}
inline void to_json(nlohmann::ordered_json& j, const Aggregator& a) {
  j = {{"bus", a.bus}, {"sigma", a.sigma}, {"gamma", a.gamma}, {"mu", a.mu},
       {"p_n", a.p_n}, {"p_c", a.p_c},     {"q_n", a.q_n},     {"q_c", a.q_c}};
}

inline nlohmann::ordered_json case_to_json(const CaseData& cs) {
  nlohmann::ordered_json j;
  j["name"] = cs.name;
  j["s_base"] = cs.s_base;
  j["buses"] = cs.buses;
  j["lines"] = cs.lines;
  j["generators"] = cs.generators;
  j["aggregators"] = cs.aggregators;
  j["metadata"] = cs.metadata;
  return j;
}

namespace detail {

template <class Json>
double number_field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw InputError(where + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw InputError(where + ": field '" + key + "' must be a number");
  return v.template get<double>();
}

template <class Json>
int int_field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw InputError(where + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw InputError(where + ": field '" + key + "' must be an integer");
  return v.template get<int>();
}

template <class Json>
const Json& array_section(const Json& root, const char* key) {
  if (!root.contains(key) || !root.at(key).is_array())
    throw InputError(std::string("case file: section '") + key + "' must be an array");
  return root.at(key);
}

}  // namespace detail

inline CaseData case_from_json(const nlohmann::ordered_json& j) {
  using detail::int_field;
  using detail::number_field;
  if (!j.is_object()) throw InputError("case file: top level must be an object");
  CaseData cs;
  if (j.contains("name") && j["name"].is_string()) cs.name = j["name"].get<std::string>();
  cs.s_base = number_field(j, "s_base", "case file");

  std::size_t k = 0;
  for (const auto& e : detail::array_section(j, "buses")) {
    const std::string where = "buses[" + std::to_string(k++) + "]";
    Bus b;
    b.id = int_field(e, "id", where);
    if (!e.contains("is_slack") || !e["is_slack"].is_boolean())
      throw InputError(where + ": field 'is_slack' must be a boolean");
    b.is_slack = e["is_slack"].get<bool>();
    b.v_min = number_field(e, "v_min", where);
    b.v_max = number_field(e, "v_max", where);
    cs.buses.push_back(b);
  }
  k = 0;
  for (const auto& e : detail::array_section(j, "lines")) {
    const std::string where = "lines[" + std::to_string(k++) + "]";
    cs.lines.push_back({int_field(e, "from_bus", where), int_field(e, "to_bus", where),
                        number_field(e, "r", where), number_field(e, "x", where),
                        number_field(e, "s_max", where)});
  }
  k = 0;
  for (const auto& e : detail::array_section(j, "generators")) {
    const std::string where = "generators[" + std::to_string(k++) + "]";
    cs.generators.push_back({int_field(e, "bus", where), number_field(e, "a", where),
                             number_field(e, "b", where), number_field(e, "c", where),
                             number_field(e, "p_min", where), number_field(e, "p_max", where),
                             number_field(e, "q_min", where), number_field(e, "q_max", where)});
  }
  k = 0;
  for (const auto& e : detail::array_section(j, "aggregators")) {
    const std::string where = "aggregators[" + std::to_string(k++) + "]";
    cs.aggregators.push_back({int_field(e, "bus", where), number_field(e, "sigma", where),
                              number_field(e, "gamma", where), number_field(e, "mu", where),
                              number_field(e, "p_n", where), number_field(e, "p_c", where),
                              number_field(e, "q_n", where), number_field(e, "q_c", where)});
  }
  if (j.contains("metadata") && j["metadata"].is_object())
    for (const auto& [key, value] : j["metadata"].items())
      cs.metadata[key] = value.is_string() ? value.get<std::string>() : value.dump();
  return cs;
}

inline CaseData parse_case(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("case file is not valid JSON: ") + e.what());
  }
  return case_from_json(j);
}

inline CaseData load_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open case file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_case(buf.str());
}

inline std::string dump_case(const CaseData& cs) { return case_to_json(cs).dump(2) + "\n"; }

}  // namespace seopf
